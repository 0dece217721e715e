#ifndef CHANSTAB_ERRORS_HPP_
#define CHANSTAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace chanstab {

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Subsonic guard on A(y) = 1 - m^2 (U_s - c)^2 failed: min |A| <= 0.1.
struct NearSonic : NumericalError {
  using NumericalError::NumericalError;
};

// Weight positivity lost (Mach number too large for the weighted estimates).
struct SubsonicViolation : NumericalError {
  using NumericalError::NumericalError;
};

// Im c below the floor where the inviscid quadratures are trustworthy.
struct NearRealAxis : NumericalError {
  using NumericalError::NumericalError;
};

struct QuadratureFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct DivisionByZeroNear : NumericalError {
  using NumericalError::NumericalError;
};

struct SingularSystem : NumericalError {
  using NumericalError::NumericalError;
};

struct NonContraction : NumericalError {
  using NumericalError::NumericalError;
};

struct ModeConstructionFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct SingularMatching : NumericalError {
  using NumericalError::NumericalError;
};

struct NoRootInDisk : NumericalError {
  using NumericalError::NumericalError;
};

struct NewtonDivergence : NumericalError {
  using NumericalError::NumericalError;
};

struct NoEigenvalueInWindow : NumericalError {
  using NumericalError::NumericalError;
};

struct ResolutionFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace chanstab

#endif  // CHANSTAB_ERRORS_HPP_
