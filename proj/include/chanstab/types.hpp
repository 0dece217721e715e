#ifndef CHANSTAB_TYPES_HPP_
#define CHANSTAB_TYPES_HPP_

#include <Eigen/Dense>
#include <complex>

namespace chanstab {

using Real = double;
using Complex = std::complex<double>;

using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr Real kPi = 3.14159265358979323846264338327950288;
inline const Complex kI{0.0, 1.0};

// Subsonic admissibility bound for the Mach number.
inline constexpr Real kMachBound = 0.57735026918962576451;  // 1/sqrt(3)

}  // namespace chanstab

#endif  // CHANSTAB_TYPES_HPP_
