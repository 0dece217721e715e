#ifndef CHANSTAB_RESOLVENT_HPP_
#define CHANSTAB_RESOLVENT_HPP_

#include <Eigen/LU>
#include <array>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "chanstab/base_flow.hpp"
#include "chanstab/bvp.hpp"
#include "chanstab/cheb.hpp"
#include "chanstab/coeffs.hpp"
#include "chanstab/fields.hpp"
#include "chanstab/params.hpp"

namespace chanstab {

// State of the quasi-compressible system. The density is stored in the
// m^{-2}-scaled form r (true density = m^2 r), which stays finite at mach 0.
struct QCState {
  CVec r, frak_u, frak_v;
  CVec phi, lambda_phi;
  SolveInfo os_info;
};

struct StokesState {
  CVec cal_p;  // m^{-2}-scaled density component
  CVec cal_u, cal_v;
};

struct IterationTrace {
  std::vector<Real> e_norms;
  std::vector<Real> ratios;
  Real final_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct Source {
  CVec fu, fv;
  CVec fu_d1, fv_d1;    // optional analytic derivatives (smooth branch only)
  bool smooth = false;  // start with the quasi-compressible step
};

struct ResolventOptions {
  Real tol = 1e-10;
  int max_iter = 40;
  int noncontraction_patience = 3;
};

// Orr-Sommerfeld-type operator OS(phi) = (i/n) L(D_k phi) + (U_s-c) L(phi)
// - d/dy(A^{-1} U_s') phi with L(phi) = d/dy(A^{-1} d/dy phi) - k^2 phi.
struct OsOperator {
  CMat op;         // full collocation rows of OS
  CMat lambda_op;  // rows of L
};
OsOperator build_os_operator(const ChebGrid& grid, const BaseFlow& flow, const Params& params,
                             Complex c);

struct OsSolution {
  CVec phi, lambda_phi;
  SolveInfo info;
};

// Solves OS(phi) = h with phi(+-1) = L(phi)(+-1) = 0.
OsSolution os_solve(const CVec& h, Complex c, const Params& params, const BaseFlow& flow,
                    const ChebGrid& grid);

// Omega(f_u, f_v) = -f_v + (1/ik) d/dy (A^{-1} f_u); derivative of f_u taken
// spectrally unless an analytic one is supplied.
CVec omega_op(const CVec& f_u, const CVec& f_v, Complex c, Real k, const BaseFlow& flow, Real m,
              const ChebGrid& grid, const CVec* fu_d1 = nullptr);

// Shared machinery for the remainder system: per-(grid, flow, params)
// factorizations reusable across wave speeds c.
class ResolventWorkspace {
 public:
  ResolventWorkspace(const ChebGrid& grid, const BaseFlow& flow, const Params& params);

  void set_c(Complex c);
  Complex c() const { return c_; }

  QCState quasi_solve(const CVec& s1, const CVec& s2, const CVec* s1_d1 = nullptr) const;
  StokesState stokes_solve(const CVec& q0, const CVec& q1, const CVec& q2) const;

  // Alternating quasi-compressible / Stokes iteration for the remainder
  // system with v(+-1) = 0. Throws NonContraction when the cycle-to-cycle
  // ratio stays above 1 for `noncontraction_patience` consecutive cycles.
  std::pair<ModeBundle, IterationTrace> solve(const Source& f, const ResolventOptions& opt) const;

  // One dense solve of the same discrete system (cross-check oracle). The
  // wall rows of the tangential momentum equation are redundant in the
  // continuum limit; pinning u(+-1) there yields the unique member of the
  // homogeneous family with the given traces. With no pins the raw
  // (near-singular) closure is solved as-is.
  ModeBundle monolithic_solve(const CVec& fu, const CVec& fv) const;
  ModeBundle monolithic_solve_pinned(const CVec& fu, const CVec& fv, Complex u_top,
                                     Complex u_bottom) const;

  // The remainder system imposes only v(+-1) = 0 on a fourth-order system,
  // so it carries a two-dimensional homogeneous family. These are its
  // discrete representatives (orthonormal, stacked in bundle convention);
  // solution comparisons are meaningful only modulo this span.
  std::vector<CVec> homogeneous_modes(int count = 2) const;
  static CVec stack_bundle(const ModeBundle& b);
  static CVec project_out(const CVec& x, const std::vector<CVec>& basis);

  // Row-wise application of the discretized operators (r-form density slot).
  std::array<CVec, 3> apply_linearized(const ModeBundle& x) const;
  std::array<CVec, 3> apply_quasi(const QCState& x) const;
  std::array<CVec, 3> apply_stokes(const StokesState& x) const;
  std::array<CVec, 3> e_q_error(const QCState& x) const;

  Real stokes_e_norm(const StokesState& s) const;
  Real triple_norm(const CVec& p_scaled, const CVec& u, const CVec& v) const;
  Real linearized_residual(const ModeBundle& x, const CVec& fu, const CVec& fv) const;

  const ChebGrid& grid() const { return grid_; }
  const BaseFlow& flow() const { return flow_; }
  const Params& params() const { return params_; }
  const SoundFactorFields& sound() const { return sf_; }
  const SolveInfo& os_info() const { return os_info_; }

 private:
  CVec reduced_stokes_rhs(const CVec& q0, const CVec& q1, const CVec& q2) const;
  StokesState unpack_stokes(const CVec& x) const;

  const ChebGrid& grid_;
  const BaseFlow& flow_;
  const Params& params_;
  Complex c_{0.0, 0.0};
  bool have_c_ = false;

  SoundFactorFields sf_;  // per-c analytic A fields

  // full linearized operator (c-free part) in r-form, and its shift diagonal
  CMat lin0_;
  Vec shift_diag_;

  // Stokes system, reduced by the boundary conditions
  CMat stokes0_red_;
  Vec stokes_shift_red_;  // 1 everywhere for m>0 (rows pre-scaled); 0/1 at m=0
  std::vector<int> keep_;
  Eigen::Matrix2d u_wall_inv_;
  Mat u_wall_t_;  // 2 x n_red recovery map for the eliminated wall u values
  std::unique_ptr<HessenbergShiftSolver> stokes_hess_;
  std::optional<Eigen::PartialPivLU<CMat>> stokes_lu_;  // mach = 0 fallback
  CMat stokes_shifted_;                                 // mach = 0 fallback matrix

  // per-c OS solve
  CMat os_op_, os_lambda_;
  Eigen::PartialPivLU<CMat> os_lu_;
  Vec os_row_scale_;
  SolveInfo os_info_;
};

// Spec-level wrappers (one-shot construction).
QCState quasi_solve(const CVec& s1, const CVec& s2, Complex c, const Params& params,
                    const BaseFlow& flow, const ChebGrid& grid);
StokesState stokes_solve(const CVec& q0, const CVec& q1, const CVec& q2, Complex c,
                         const Params& params, const BaseFlow& flow, const ChebGrid& grid);
std::pair<ModeBundle, IterationTrace> resolvent_solve(const CVec& f_u, const CVec& f_v, Complex c,
                                                      const Params& params, const BaseFlow& flow,
                                                      const ChebGrid& grid, Real tol,
                                                      int max_iter);

}  // namespace chanstab

#endif  // CHANSTAB_RESOLVENT_HPP_
