#include "chanstab/dispersion.hpp"

#include <cmath>
#include <sstream>

#include "chanstab/errors.hpp"

namespace chanstab {

PredictedRoot predicted_root(const Params& params, const BaseFlow& flow) {
  PredictedRoot pr;
  pr.tau = flow.tau;
  pr.beta = flow.beta;
  const Real tau = flow.tau, beta = flow.beta;
  const Real slope_top = std::abs(flow.us1_top());
  const Real e27 = std::pow(params.eps, 2.0 / 7.0);
  const Real t0 = params.t0;

  pr.c0 = tau * beta / (1.0 + beta) * t0 * t0 * e27 +
          std::pow(t0, -1.5) * std::polar(1.0, kPi / 4.0) * std::sqrt(slope_top) *
              (1.0 + std::pow(beta, 1.5)) / std::sqrt(tau * beta * (1.0 + beta)) * e27;

  const Complex r1 = std::polar(1.0, -kPi / 4.0) * std::sqrt(tau) * std::sqrt(slope_top) *
                     std::pow(beta, 5.0 / 6.0) / std::sqrt(1.0 + beta) * std::pow(t0, 1.5) /
                     e27;
  const Real r0 = flow.us1_top() - flow.us1_bottom() * std::sqrt(beta);
  pr.ilin_slope = r1 * (1.0 + beta) * std::pow(beta, -1.0 / 3.0);
  pr.ilin_const = r0 - r1 * tau * std::pow(beta, 2.0 / 3.0) * params.k * params.k;
  return pr;
}

DispersionContext::DispersionContext(const Params& params, const BaseFlow& flow,
                                     const ChebGrid& grid, const DispersionOptions& opt)
    : params_(params), flow_(flow), grid_(grid), opt_(opt), ws_(grid, flow, params) {}

ResolventOptions DispersionContext::accurate_options() const {
  ResolventOptions r;
  r.tol = opt_.resolvent_tol;
  r.max_iter = opt_.resolvent_max_iter;
  r.noncontraction_patience = 3;
  return r;
}

ResolventOptions DispersionContext::contour_options() const {
  ResolventOptions r;
  r.tol = 1e-7;
  r.max_iter = opt_.contour_max_iter;
  r.noncontraction_patience = 1 << 20;  // winding evaluations never bail out
  return r;
}

ExactModes DispersionContext::exact_modes(Complex c, const ResolventOptions& ropt) const {
  ws_.set_c(c);
  ExactModes out;
  try {
    SlowModes sm(flow_, c, params_.mach, opt_.fine_n);

    auto add = [](ModeBundle& dst, const ModeBundle& corr) {
      dst.rho += corr.rho;
      dst.u += corr.u;
      dst.v += corr.v;
      dst.record_boundary();
    };

    // slow plus: the error splits into a rough viscous part and a smooth
    // corrector tail, each routed through its own branch
    InviscidMode plus = inviscid_fields(sm, +1, grid_.nodes, params_.k, flow_.profile);
    SlowErrors se_p = slow_error_field(plus, params_, flow_.profile, grid_.nodes);
    Source f1;
    f1.fu = -se_p.part1.eu;
    f1.fv = -se_p.part1.ev;
    auto [r1, t1] = ws_.solve(f1, ropt);
    Source f2;
    f2.fu = CVec::Zero(grid_.size());
    f2.fv = -se_p.part2.ev;
    f2.fu_d1 = CVec::Zero(grid_.size());
    f2.smooth = true;
    auto [r2, t2] = ws_.solve(f2, ropt);
    out.slow_plus = plus.bundle;
    add(out.slow_plus, r1);
    add(out.slow_plus, r2);
    out.slow_plus.label = ModeLabel::slow_plus;
    out.traces[0] = t1;
    out.traces[1] = t2;

    // The minus-branch error carries critical-layer spikes; the Stokes-first
    // route handles them stably, whereas a quasi-compressible first step
    // amplifies their high derivatives catastrophically.
    InviscidMode minus = inviscid_fields(sm, -1, grid_.nodes, params_.k, flow_.profile);
    SlowErrors se_m = slow_error_field(minus, params_, flow_.profile, grid_.nodes);
    Source fm;
    fm.fu = -se_m.full.eu;
    fm.fv = -se_m.full.ev;
    auto [rm, tm] = ws_.solve(fm, ropt);
    out.slow_minus = minus.bundle;
    add(out.slow_minus, rm);
    out.slow_minus.label = ModeLabel::slow_minus;
    out.traces[2] = tm;

    for (int side : {-1, +1}) {
      LayerMode lm = bl_fields(side, grid_.nodes, params_, flow_, c);
      FastError fe = fast_error_field(lm, params_, flow_, grid_.nodes);
      Source ff;
      ff.fu = -fe.eu;
      ff.fv = -fe.ev;
      auto [rf, tf] = ws_.solve(ff, ropt);
      ModeBundle& dst = (side < 0) ? out.fast_minus : out.fast_plus;
      dst = lm.bundle;
      add(dst, rf);
      dst.label = (side < 0) ? ModeLabel::fast_minus : ModeLabel::fast_plus;
      out.traces[side < 0 ? 3 : 4] = tf;
    }

    for (const IterationTrace& t : out.traces)
      out.remainders_converged = out.remainders_converged && t.converged;
    return out;
  } catch (const NonContraction& e) {
    throw ModeConstructionFailure(std::string("mode correction did not contract: ") + e.what());
  }
}

MatchState DispersionContext::matching_coeffs(const ExactModes& modes, Complex c) const {
  MatchState st;
  const BoundaryValues& sm = modes.slow_minus.boundary;
  const BoundaryValues& fm = modes.fast_minus.boundary;
  const BoundaryValues& fp = modes.fast_plus.boundary;
  const BoundaryValues& sp = modes.slow_plus.boundary;
  st.m_matrix << sm.v_bottom, fm.v_bottom, fp.v_bottom,
                 sm.u_bottom, fm.u_bottom, fp.u_bottom,
                 sm.v_top, fm.v_top, fp.v_top;
  st.det_m = st.m_matrix.determinant();
  if (std::abs(st.det_m) < 1e-300)
    throw SingularMatching("boundary matching matrix is numerically singular");
  Eigen::Vector3cd rhs;
  rhs << -sp.v_bottom, -sp.u_bottom, -sp.v_top;
  st.alpha = st.m_matrix.fullPivLu().solve(rhs);

  // leading-order closed forms of the coefficients
  LayerScales bs = bl_scales(-1, params_, flow_, c);
  Complex ratio21 = 1.0 / airy_ratio(bs.z0);
  const Real tau = flow_.tau, beta = flow_.beta, k = params_.k;
  const Real slope_b = flow_.us1_bottom();
  st.alpha_asymptotic[0] =
      -bs.delta * slope_b * slope_b * ratio21 - slope_b * (c - tau * k * k);
  st.alpha_asymptotic[1] = slope_b * ratio21;
  st.alpha_asymptotic[2] =
      -((1.0 + beta) * std::pow(beta, -1.0 / 3.0) * c - tau * std::pow(beta, 2.0 / 3.0) * k * k) /
          bs.delta -
      slope_b * std::pow(beta, 2.0 / 3.0) * ratio21;
  return st;
}

Complex DispersionContext::dispersion_value(Complex c, const ResolventOptions& ropt) const {
  ExactModes modes = exact_modes(c, ropt);
  MatchState st = matching_coeffs(modes, c);
  return modes.slow_plus.boundary.u_top + st.alpha[0] * modes.slow_minus.boundary.u_top +
         st.alpha[1] * modes.fast_minus.boundary.u_top +
         st.alpha[2] * modes.fast_plus.boundary.u_top;
}

Complex DispersionContext::dispersion_value_mirror(Complex c, const ResolventOptions& ropt) const {
  ExactModes modes = exact_modes(c, ropt);
  const BoundaryValues& sm = modes.slow_minus.boundary;
  const BoundaryValues& fm = modes.fast_minus.boundary;
  const BoundaryValues& fp = modes.fast_plus.boundary;
  const BoundaryValues& sp = modes.slow_plus.boundary;
  Eigen::Matrix3cd m;
  m << sm.v_bottom, fm.v_bottom, fp.v_bottom,
       sm.v_top, fm.v_top, fp.v_top,
       sm.u_top, fm.u_top, fp.u_top;
  Eigen::Vector3cd rhs;
  rhs << -sp.v_bottom, -sp.v_top, -sp.u_top;
  Eigen::Vector3cd alpha = m.fullPivLu().solve(rhs);
  return sp.u_bottom + alpha[0] * sm.u_bottom + alpha[1] * fm.u_bottom + alpha[2] * fp.u_bottom;
}

ModeBundle DispersionContext::assemble(const ExactModes& modes,
                                       const Eigen::Vector3cd& alpha) const {
  ModeBundle out = modes.slow_plus;
  out.rho += alpha[0] * modes.slow_minus.rho + alpha[1] * modes.fast_minus.rho +
             alpha[2] * modes.fast_plus.rho;
  out.u += alpha[0] * modes.slow_minus.u + alpha[1] * modes.fast_minus.u +
           alpha[2] * modes.fast_plus.u;
  out.v += alpha[0] * modes.slow_minus.v + alpha[1] * modes.fast_minus.v +
           alpha[2] * modes.fast_plus.v;
  out.label = ModeLabel::exact;
  out.record_boundary();
  return out;
}

DispersionResult find_root(const Params& params, const BaseFlow& flow, const ChebGrid& grid,
                           Real tol, const DispersionOptions& opt) {
  DispersionContext ctx(params, flow, grid, opt);
  PredictedRoot pr = predicted_root(params, flow);
  const Real radius = std::pow(params.t0, -2.0) * std::pow(params.eps, 2.0 / 7.0);

  DispersionResult res;
  res.c0 = pr.c0;
  res.disk_radius = radius;

  // winding number of I over the disk boundary by phase tracking of the
  // logarithmic derivative
  const int m = std::max(opt.contour_points, 64);
  ResolventOptions copt = ctx.contour_options();
  std::vector<Complex> vals(m);
  for (int j = 0; j < m; ++j) {
    Complex cj = pr.c0 + radius * std::polar(1.0, 2.0 * kPi * j / m);
    vals[j] = ctx.dispersion_value(cj, copt);
  }
  Real total = 0.0;
  for (int j = 0; j < m; ++j) {
    Complex a = vals[j], b = vals[(j + 1) % m];
    if (a == Complex(0.0) || b == Complex(0.0))
      throw NumericalError("dispersion value vanished on the contour");
    total += std::arg(b / a);
  }
  res.winding = static_cast<int>(std::lround(total / (2.0 * kPi)));
  if (res.winding == 0)
    throw NoRootInDisk("winding number 0: no dispersion root inside the predicted disk");

  // Newton refinement from the predicted center
  ResolventOptions aopt = ctx.accurate_options();
  Complex c = pr.c0;
  const Real h = 1e-3 * std::abs(pr.c0) * std::pow(params.t0, -2.0);
  Complex val = ctx.dispersion_value(c, aopt);
  int it = 0;
  while (std::abs(val) >= tol) {
    if (++it > opt.newton_max_iter)
      throw NewtonDivergence("newton iteration exceeded the step budget");
    Complex dplus = ctx.dispersion_value(c + h, aopt);
    Complex dminus = ctx.dispersion_value(c - h, aopt);
    Complex deriv = (dplus - dminus) / (2.0 * h);
    if (deriv == Complex(0.0)) throw NewtonDivergence("flat dispersion derivative");
    c -= val / deriv;
    if (std::abs(c - pr.c0) > 2.0 * radius)
      throw NewtonDivergence("newton iteration left the predicted disk");
    val = ctx.dispersion_value(c, aopt);
  }
  res.c_star = c;
  res.residual = std::abs(val);
  res.in_disk = std::abs(c - pr.c0) <= radius;
  res.growth_rate = params.k * c.imag();
  res.newton_iterations = it;
  return res;
}

DispersionResult refine_root(const Params& params, const BaseFlow& flow, const ChebGrid& grid,
                             Complex seed, Real tol, const DispersionOptions& opt) {
  DispersionContext ctx(params, flow, grid, opt);
  PredictedRoot pr = predicted_root(params, flow);
  ResolventOptions aopt = ctx.accurate_options();
  const Real radius = std::pow(params.t0, -2.0) * std::pow(params.eps, 2.0 / 7.0);

  Complex c = seed;
  Complex val = ctx.dispersion_value(c, aopt);
  const Real h = std::max(1e-5, 1e-4 * std::abs(seed));
  int it = 0;
  while (std::abs(val) >= tol) {
    if (++it > opt.newton_max_iter)
      throw NewtonDivergence("newton iteration exceeded the step budget");
    Complex dplus = ctx.dispersion_value(c + h, aopt);
    Complex dminus = ctx.dispersion_value(c - h, aopt);
    Complex deriv = (dplus - dminus) / (2.0 * h);
    if (deriv == Complex(0.0)) throw NewtonDivergence("flat dispersion derivative");
    Complex step = -val / deriv;
    // damped update: halve the step until the residual decreases
    Complex cnext = c + step;
    Complex vnext = ctx.dispersion_value(cnext, aopt);
    int halvings = 0;
    while (std::abs(vnext) > std::abs(val) && halvings < 8) {
      step *= 0.5;
      cnext = c + step;
      vnext = ctx.dispersion_value(cnext, aopt);
      ++halvings;
    }
    if (std::abs(vnext) > std::abs(val))
      throw NewtonDivergence("newton step failed to reduce the residual");
    c = cnext;
    val = vnext;
  }
  DispersionResult res;
  res.c_star = c;
  res.c0 = pr.c0;
  res.winding = -1;
  res.residual = std::abs(val);
  res.in_disk = std::abs(c - pr.c0) <= radius;
  res.growth_rate = params.k * c.imag();
  res.disk_radius = radius;
  res.newton_iterations = it;
  return res;
}

Complex dispersion_value(Complex c, const Params& params, const BaseFlow& flow,
                         const ChebGrid& grid) {
  DispersionContext ctx(params, flow, grid);
  return ctx.dispersion_value(c, ctx.accurate_options());
}

}  // namespace chanstab
