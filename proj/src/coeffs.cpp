#include "chanstab/coeffs.hpp"

#include <cmath>
#include <sstream>

#include "chanstab/errors.hpp"

namespace chanstab {

CVec sound_factor(const BaseFlow& flow, Complex c, Real m) {
  SoundFactorFields f = sound_factor_fields(flow, c, m, true);
  return f.a;
}

SoundFactorFields sound_factor_fields(const Vec& us, const Vec& us1, const Vec& us2,
                                      Complex c, Real m, bool guard) {
  const int n = static_cast<int>(us.size());
  SoundFactorFields f;
  f.a = CVec(n);
  f.a_d1 = CVec(n);
  f.a_d2 = CVec(n);
  f.a_d3 = CVec(n);
  f.ainv = CVec(n);
  f.ainv_d1 = CVec(n);
  f.ainv_d2 = CVec(n);
  f.ainv_d3 = CVec(n);
  f.dy_ainv_us1 = CVec(n);
  const Real m2 = m * m;
  Real min_abs = std::numeric_limits<Real>::infinity();
  for (int j = 0; j < n; ++j) {
    const Complex uc = us[j] - c;
    const Complex a = 1.0 - m2 * uc * uc;
    const Complex a1 = -2.0 * m2 * uc * us1[j];
    const Complex a2 = -2.0 * m2 * (us1[j] * us1[j] + uc * us2[j]);
    const Complex a3 = -6.0 * m2 * us1[j] * us2[j];
    min_abs = std::min(min_abs, std::abs(a));
    const Complex ai = 1.0 / a;
    const Complex ai2 = ai * ai;
    f.a[j] = a;
    f.a_d1[j] = a1;
    f.a_d2[j] = a2;
    f.a_d3[j] = a3;
    f.ainv[j] = ai;
    f.ainv_d1[j] = -a1 * ai2;
    f.ainv_d2[j] = -a2 * ai2 + 2.0 * a1 * a1 * ai2 * ai;
    f.ainv_d3[j] = -a3 * ai2 + 6.0 * a1 * a2 * ai2 * ai - 6.0 * a1 * a1 * a1 * ai2 * ai2;
    f.dy_ainv_us1[j] = f.ainv[j] * us2[j] + f.ainv_d1[j] * us1[j];
  }
  f.min_abs_a = min_abs;
  if (guard && min_abs <= 0.1) {
    std::ostringstream os;
    os << "sound factor guard failed: min |A| = " << min_abs << " <= 0.1";
    throw NearSonic(os.str());
  }
  return f;
}

SoundFactorFields sound_factor_fields(const BaseFlow& flow, Complex c, Real m, bool guard) {
  return sound_factor_fields(flow.u_s, flow.u_s1, flow.u_s2, c, m, guard);
}

CoeffFields weight_functions(const BaseFlow& flow, Complex c, Real m) {
  const int n = static_cast<int>(flow.u_s.size());
  CoeffFields out;
  SoundFactorFields sf = sound_factor_fields(flow, c, m, true);
  out.a_vals = sf.a;
  out.w_vals = CVec(n);
  out.script_w = Vec(n);
  out.w0 = Vec(n);
  out.w1 = Vec(n);
  const Real m2 = m * m;
  for (int j = 0; j < n; ++j) {
    const Real us = flow.u_s[j], us1 = flow.u_s1[j], us2 = flow.u_s2[j];
    const Real a0 = 1.0 - m2 * us * us;
    out.script_w[j] = -a0 * us2 - 2.0 * m2 * us * us1 * us1;
  }
  out.min_script_w = out.script_w.minCoeff();
  if (out.min_script_w <= 0.0) {
    std::ostringstream os;
    os << "weight positivity failed: min W = " << out.min_script_w;
    throw SubsonicViolation(os.str());
  }
  for (int j = 0; j < n; ++j) {
    const Real us = flow.u_s[j], us1 = flow.u_s1[j], us2 = flow.u_s2[j];
    const Complex uc = us - c;
    // w = -A^2 / (A U_s'' + 2 m^2 (U_s - c) U_s'^2)
    const Complex a = sf.a[j];
    const Complex den = a * us2 + 2.0 * m2 * uc * us1 * us1;
    out.w_vals[j] = -a * a / den;
    const Real a0 = 1.0 - m2 * us * us;
    const Real sw = out.script_w[j];
    out.w0[j] = a0 * a0 / sw;
    // dw/dc at c = 0
    out.w1[j] = 4.0 * m2 * us * a0 / sw +
                2.0 * m2 * a0 * a0 * (us * us2 - us1 * us1) / (sw * sw);
  }
  Vec combo = out.w0 - flow.u_s.cwiseProduct(out.w1);
  out.min_w0_minus_usw1 = combo.minCoeff();
  if (out.min_w0_minus_usw1 <= 0.0) {
    std::ostringstream os;
    os << "weight positivity failed: min (w0 - U_s w1) = " << out.min_w0_minus_usw1;
    throw SubsonicViolation(os.str());
  }
  return out;
}

}  // namespace chanstab
