#ifndef CHANSTAB_DISPERSION_HPP_
#define CHANSTAB_DISPERSION_HPP_

#include <array>
#include <memory>

#include "chanstab/base_flow.hpp"
#include "chanstab/cheb.hpp"
#include "chanstab/fast_modes.hpp"
#include "chanstab/fields.hpp"
#include "chanstab/params.hpp"
#include "chanstab/resolvent.hpp"
#include "chanstab/slow_modes.hpp"

namespace chanstab {

// Boundary-matching state: the 3x3 system choosing the mode combination
// that satisfies v(-1) = u(-1) = v(1) = 0.
struct MatchState {
  Eigen::Matrix3cd m_matrix;
  Eigen::Vector3cd alpha;
  Complex det_m{};
  Eigen::Vector3cd alpha_asymptotic;  // leading-order closed forms
};

struct DispersionResult {
  Complex c_star{}, c0{};
  int winding = 0;
  Real residual = 0.0;
  bool in_disk = false;
  Real growth_rate = 0.0;
  Real disk_radius = 0.0;
  int newton_iterations = 0;
};

// Closed-form predicted root and the linear model I_lin(c) = a + b c.
struct PredictedRoot {
  Complex c0{};
  Real tau = 0.0, beta = 0.0;
  Complex ilin_const{}, ilin_slope{};
  Complex ilin(Complex c) const { return ilin_const + ilin_slope * c; }
};

PredictedRoot predicted_root(const Params& params, const BaseFlow& flow);

// The four boundary-corrected solutions at a given wave speed.
struct ExactModes {
  ModeBundle slow_plus, slow_minus, fast_minus, fast_plus;
  std::array<IterationTrace, 5> traces;  // slow+ (two solves), slow-, fast-, fast+
  bool remainders_converged = true;
};

struct DispersionOptions {
  Real resolvent_tol = 1e-9;
  int resolvent_max_iter = 25;
  int contour_points = 64;
  int contour_max_iter = 6;  // remainder cycles per contour evaluation
  int newton_max_iter = 50;
  int fine_n = 0;  // 0: automatic fine-grid choice for the inviscid integrals
};

class DispersionContext {
 public:
  DispersionContext(const Params& params, const BaseFlow& flow, const ChebGrid& grid,
                    const DispersionOptions& opt = {});

  ExactModes exact_modes(Complex c, const ResolventOptions& ropt) const;
  MatchState matching_coeffs(const ExactModes& modes, Complex c) const;
  Complex dispersion_value(Complex c, const ResolventOptions& ropt) const;

  // u(-1) of the combination matching the mirrored condition set
  // {v(-1), v(1), u(1)}; roots coincide with those of the primary function.
  Complex dispersion_value_mirror(Complex c, const ResolventOptions& ropt) const;

  ModeBundle assemble(const ExactModes& modes, const Eigen::Vector3cd& alpha) const;

  ResolventOptions accurate_options() const;
  ResolventOptions contour_options() const;
  const ResolventWorkspace& workspace() const { return ws_; }
  const DispersionOptions& options() const { return opt_; }

 private:
  Params params_;
  const BaseFlow& flow_;
  const ChebGrid& grid_;
  DispersionOptions opt_;
  mutable ResolventWorkspace ws_;
};

// Winding-number certificate on the disk |c - c0| <= t0^{-2} eps^{2/7}
// followed by Newton refinement from c0. Throws NoRootInDisk when the
// winding number is zero and NewtonDivergence when the iteration leaves
// twice the disk or stalls.
DispersionResult find_root(const Params& params, const BaseFlow& flow, const ChebGrid& grid,
                           Real tol, const DispersionOptions& opt = {});

// Damped Newton refinement of the dispersion function from an arbitrary
// seed, without the winding certificate. winding is reported as -1.
DispersionResult refine_root(const Params& params, const BaseFlow& flow, const ChebGrid& grid,
                             Complex seed, Real tol, const DispersionOptions& opt = {});

Complex dispersion_value(Complex c, const Params& params, const BaseFlow& flow,
                         const ChebGrid& grid);

}  // namespace chanstab

#endif  // CHANSTAB_DISPERSION_HPP_
