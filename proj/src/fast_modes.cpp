#include "chanstab/fast_modes.hpp"

#include <cmath>
#include <sstream>

#include "chanstab/errors.hpp"

namespace chanstab {

LayerScales bl_scales(int side, const Params& params, const BaseFlow& flow, Complex c) {
  LayerScales s;
  s.side = side;
  const Complex phase = std::polar(1.0, -kPi / 6.0);
  if (side < 0) {
    Real slope = flow.us1_bottom();
    s.delta = phase / std::cbrt(slope * params.n);
    s.z0 = -c / (slope * s.delta);
  } else {
    Real slope = flow.us1_top();  // negative at the top wall
    s.delta = phase / std::cbrt(-slope * params.n);
    s.z0 = c / (slope * s.delta);
  }
  return s;
}

LayerRatios layer_ratios(Complex z0, Real t) {
  const Complex w = z0 + t * std::polar(1.0, kPi / 6.0);
  ScaledAiry base = airy_scaled(z0);
  if (std::abs(base.ai2) < 1e-280) {
    std::ostringstream os;
    os << "layer ratios: |Ai(2,z0)| mantissa " << std::abs(base.ai2) << " below guard";
    throw DivisionByZeroNear(os.str());
  }
  ScaledAiry at = airy_scaled(w);
  Real ediff = at.log_scale - base.log_scale;
  if (ediff < -700.0) return {Complex(0.0), Complex(0.0), Complex(0.0)};
  if (ediff > 700.0)
    throw DivisionByZeroNear("layer ratios: scale ratio overflow off the decay ray");
  Complex f = std::exp(ediff) / base.ai2;
  return {at.ai * f, at.ai1 * f, at.ai2 * f};
}

LayerMode bl_fields(int side, const Vec& y, const Params& params, const BaseFlow& flow,
                    Complex c) {
  LayerMode mode;
  mode.c = c;
  mode.scales = bl_scales(side, params, flow, c);
  mode.bundle.label = (side < 0) ? ModeLabel::fast_minus : ModeLabel::fast_plus;
  const long n = y.size();
  mode.bundle.rho = CVec::Zero(n);
  mode.bundle.u = CVec(n);
  mode.bundle.v = CVec(n);
  mode.u_d1 = CVec(n);
  mode.v_d1 = CVec(n);
  mode.v_d2 = CVec(n);
  const Complex ik = kI * params.k;
  const Complex delta = mode.scales.delta;
  const Real inv_abs_delta = 1.0 / std::abs(delta);
  const Real sign_u = (side < 0) ? -1.0 : 1.0;
  for (long j = 0; j < n; ++j) {
    Real dist = (side < 0) ? (1.0 + y[j]) : (1.0 - y[j]);
    LayerRatios r = layer_ratios(mode.scales.z0, dist * inv_abs_delta);
    mode.bundle.u[j] = sign_u * r.r1;
    mode.bundle.v[j] = ik * delta * r.r2;
    mode.u_d1[j] = -r.r0 / delta;
    mode.v_d1[j] = -static_cast<Real>(side) * ik * r.r1;
    mode.v_d2[j] = ik * r.r0 / delta;
  }
  mode.bundle.record_boundary();
  return mode;
}

FastError fast_error_field(const LayerMode& mode, const Params& params, const BaseFlow& flow,
                           const Vec& y) {
  const long n = y.size();
  FastError e;
  e.eu = CVec(n);
  e.ev = CVec(n);
  const Real k = params.k, eps = params.eps;
  const Complex ik = kI * k;
  const int side = mode.scales.side;
  const Real wall_slope = (side < 0) ? flow.us1_bottom() : flow.us1_top();
  for (long j = 0; j < n; ++j) {
    ProfilePoint p = flow.profile(y[j]);
    Real dist = (side < 0) ? (1.0 + y[j]) : (1.0 - y[j]);
    Real taylor_rem = p.u - wall_slope * dist * (side < 0 ? 1.0 : -1.0);
    // the second equation: only the profile-curvature and stretching pieces
    // survive after the layer balance
    e.eu[j] = k * k * eps * mode.bundle.u[j] + ik * taylor_rem * mode.bundle.u[j] +
              (p.d1 - wall_slope) * mode.bundle.v[j];
    Complex lap_v = mode.v_d2[j] - k * k * mode.bundle.v[j];
    e.ev[j] = -eps * lap_v + ik * (p.u - mode.c) * mode.bundle.v[j];
  }
  return e;
}

}  // namespace chanstab
