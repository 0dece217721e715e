#ifndef CHANSTAB_BVP_HPP_
#define CHANSTAB_BVP_HPP_

#include <utility>
#include <vector>

#include "chanstab/types.hpp"

namespace chanstab {

struct SolveInfo {
  Real rcond = 0.0;
  Real residual = 0.0;  // relative residual of the solved system
  bool ill_conditioned = false;
};

inline constexpr Real kIllConditionThreshold = 1e-12;  // rcond warning level

struct BoundaryRow {
  int row;
  CVec coeffs;
  Complex value;
};

// Dense collocation solve of op*x = rhs with selected rows replaced by
// boundary rows. Rows are equilibrated before the LU and one step of
// iterative refinement is applied. Throws SingularSystem on breakdown;
// conditioning trouble is reported through info, not thrown.
CVec bvp_solve(const CMat& op, const CVec& rhs, const std::vector<BoundaryRow>& bcs,
               SolveInfo* info = nullptr);

// Solves (A - sigma I) x = b for many shifts sigma and right-hand sides of a
// fixed matrix A: one Hessenberg reduction up front, then O(n^2) Givens
// factorizations per shift and O(n^2) triangular solves per right-hand side.
class HessenbergShiftSolver {
 public:
  explicit HessenbergShiftSolver(CMat a);

  void set_shift(Complex sigma);
  CVec solve(const CVec& b) const;
  const CMat& matrix() const { return a_; }
  int size() const { return static_cast<int>(a_.rows()); }

 private:
  CMat a_, q_, h_;
  CMat r_;  // upper triangular factor of H - sigma I
  std::vector<std::pair<Complex, Complex>> rot_;
  Complex shift_{0.0, 0.0};
  bool have_shift_ = false;
};

}  // namespace chanstab

#endif  // CHANSTAB_BVP_HPP_
