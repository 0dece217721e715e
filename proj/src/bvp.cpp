#include "chanstab/bvp.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "chanstab/errors.hpp"

namespace chanstab {

CVec bvp_solve(const CMat& op, const CVec& rhs, const std::vector<BoundaryRow>& bcs,
               SolveInfo* info) {
  const int n = static_cast<int>(op.rows());
  CMat m = op;
  CVec b = rhs;
  for (const auto& bc : bcs) {
    m.row(bc.row) = bc.coeffs.transpose();
    b[bc.row] = bc.value;
  }
  // row equilibration
  Vec scale(n);
  for (int i = 0; i < n; ++i) {
    Real s = m.row(i).cwiseAbs().maxCoeff();
    if (s == 0.0) throw SingularSystem("bvp_solve: zero row after boundary replacement");
    scale[i] = 1.0 / s;
  }
  CMat ms = scale.asDiagonal() * m;
  CVec bs = scale.asDiagonal() * b;
  Eigen::PartialPivLU<CMat> lu(ms);
  CVec x = lu.solve(bs);
  // one refinement pass
  CVec r = bs - ms * x;
  x += lu.solve(r);
  if (!x.allFinite()) throw SingularSystem("bvp_solve: non-finite solution");

  if (info) {
    info->rcond = lu.rcond();
    info->ill_conditioned = info->rcond < kIllConditionThreshold;
    Real bn = bs.norm();
    info->residual = (bn > 0.0) ? (bs - ms * x).norm() / bn : (bs - ms * x).norm();
  }
  return x;
}

HessenbergShiftSolver::HessenbergShiftSolver(CMat a) : a_(std::move(a)) {
  Eigen::HessenbergDecomposition<CMat> hd(a_);
  h_ = hd.matrixH();
  q_ = hd.matrixQ();
}

void HessenbergShiftSolver::set_shift(Complex sigma) {
  const int n = size();
  shift_ = sigma;
  r_ = h_;
  r_.diagonal().array() -= sigma;
  rot_.assign(n - 1, {Complex(1.0), Complex(0.0)});
  for (int j = 0; j < n - 1; ++j) {
    Complex a = r_(j, j), b = r_(j + 1, j);
    Real nrm = std::sqrt(std::norm(a) + std::norm(b));
    if (nrm == 0.0) throw SingularSystem("hessenberg shift solve: zero pivot column");
    Complex c = std::conj(a) / nrm;
    Complex s = std::conj(b) / nrm;
    rot_[j] = {c, s};
    for (int col = j; col < n; ++col) {
      Complex t1 = r_(j, col), t2 = r_(j + 1, col);
      r_(j, col) = c * t1 + s * t2;
      r_(j + 1, col) = -std::conj(s) * t1 + std::conj(c) * t2;
    }
  }
  for (int j = 0; j < n; ++j)
    if (std::abs(r_(j, j)) == 0.0) throw SingularSystem("hessenberg shift solve: singular R");
  have_shift_ = true;
}

CVec HessenbergShiftSolver::solve(const CVec& b) const {
  if (!have_shift_) throw SingularSystem("hessenberg shift solve: no shift set");
  const int n = size();
  auto triangular_pass = [&](const CVec& rhs) {
    CVec y = q_.adjoint() * rhs;
    for (int j = 0; j < n - 1; ++j) {
      Complex t1 = y[j], t2 = y[j + 1];
      y[j] = rot_[j].first * t1 + rot_[j].second * t2;
      y[j + 1] = -std::conj(rot_[j].second) * t1 + std::conj(rot_[j].first) * t2;
    }
    CVec z(n);
    for (int i = n - 1; i >= 0; --i) {
      Complex s = y[i];
      for (int col = i + 1; col < n; ++col) s -= r_(i, col) * z[col];
      z[i] = s / r_(i, i);
    }
    return CVec(q_ * z);
  };
  CVec x = triangular_pass(b);
  // one refinement pass against the unreduced matrix
  CVec resid = b - (a_ * x - shift_ * x);
  x += triangular_pass(resid);
  if (!x.allFinite()) throw SingularSystem("hessenberg shift solve: non-finite solution");
  return x;
}

}  // namespace chanstab
