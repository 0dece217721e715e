#ifndef CHANSTAB_AIRY_HPP_
#define CHANSTAB_AIRY_HPP_

#include "chanstab/types.hpp"

namespace chanstab {

// Ai(z) together with the primitives Ai(1,z) and Ai(2,z) normalized so that
// all three decay at infinity along the ray e^{i pi/6} R_+, with
//   d/dz Ai(2,z) = Ai(1,z),  d/dz Ai(1,z) = Ai(z).
struct AiryTriple {
  Complex ai, ai1, ai2;
};

// Same triple in the representation value = field * exp(log_scale); the
// boundary-layer code works entirely in this form so that ratios of Airy
// values stay finite when the raw values overflow.
struct ScaledAiry {
  Complex ai, ai1, ai2;
  Real log_scale = 0.0;
};

Complex airy_ai(Complex z);
AiryTriple airy_primitives(Complex z);
ScaledAiry airy_scaled(Complex z);

// Ai(1,z) / Ai(2,z). Throws DivisionByZeroNear if |Ai(2,z)| is below guard.
Complex airy_ratio(Complex z);

namespace detail {

// Maclaurin evaluation (quad-precision accumulation); accurate for |z| <~ 12.
AiryTriple airy_series(Complex z);

// Exponentially scaled asymptotic evaluation, |arg z| < pi. The primitive
// series carry factorially growing coefficients, so optimal truncation is
// only e^{-|zeta|}-accurate; trustworthy for |z| >~ 10.
ScaledAiry airy_asymptotic(Complex z);

inline constexpr Real kSeriesRadius = 11.0;

}  // namespace detail

}  // namespace chanstab

#endif  // CHANSTAB_AIRY_HPP_
