#ifndef CHANSTAB_COEFFS_HPP_
#define CHANSTAB_COEFFS_HPP_

#include "chanstab/base_flow.hpp"
#include "chanstab/cheb.hpp"
#include "chanstab/params.hpp"

namespace chanstab {

// Pointwise A(y) = 1 - m^2 (U_s - c)^2 on the grid. Throws NearSonic when
// min |A| <= 0.1 (the subsonic guard used everywhere downstream).
CVec sound_factor(const BaseFlow& flow, Complex c, Real m);

// A and 1/A with analytic derivatives on an arbitrary node set. Derivatives
// assume U_s''' = U_s'''' = 0, which holds for the quadratic profiles
// admitted by validate_profile's exactness checks downstream.
struct SoundFactorFields {
  CVec a, a_d1, a_d2, a_d3;
  CVec ainv, ainv_d1, ainv_d2, ainv_d3;
  CVec dy_ainv_us1;  // d/dy (A^{-1} U_s')
  Real min_abs_a = 0.0;
};

SoundFactorFields sound_factor_fields(const Vec& us, const Vec& us1, const Vec& us2,
                                      Complex c, Real m, bool guard = true);
SoundFactorFields sound_factor_fields(const BaseFlow& flow, Complex c, Real m,
                                      bool guard = true);

// The weight w = -[d/dy (A^{-1} dU_s/dy)]^{-1}, its c-expansion coefficients
// w0, w1 at c = 0, and the real weight
//   W(y) = -(1 - m^2 U_s^2) U_s'' - 2 m^2 U_s |U_s'|^2.
struct CoeffFields {
  CVec a_vals;
  CVec w_vals;
  Vec script_w;
  Vec w0, w1;
  Real min_script_w = 0.0;
  Real min_w0_minus_usw1 = 0.0;
};

// Throws SubsonicViolation when min W <= 0 or min (w0 - U_s w1) <= 0.
CoeffFields weight_functions(const BaseFlow& flow, Complex c, Real m);

}  // namespace chanstab

#endif  // CHANSTAB_COEFFS_HPP_
