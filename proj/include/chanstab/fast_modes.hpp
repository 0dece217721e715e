#ifndef CHANSTAB_FAST_MODES_HPP_
#define CHANSTAB_FAST_MODES_HPP_

#include "chanstab/airy.hpp"
#include "chanstab/base_flow.hpp"
#include "chanstab/fields.hpp"
#include "chanstab/params.hpp"

namespace chanstab {

// Boundary-layer scale and shifted origin for one wall. The scale carries
// the phase e^{-i pi/6} exactly; |delta| = [|U_s'(wall)| n]^{-1/3}.
struct LayerScales {
  Complex delta;
  Complex z0;
  int side = -1;  // -1: bottom wall y=-1, +1: top wall y=+1
};

LayerScales bl_scales(int side, const Params& params, const BaseFlow& flow, Complex c);

// Airy-profile viscous mode concentrated at one wall, with the analytic
// derivatives the error field needs. Density is identically zero.
struct LayerMode {
  ModeBundle bundle;
  CVec u_d1, v_d1, v_d2;
  LayerScales scales;
  Complex c;
};

LayerMode bl_fields(int side, const Vec& y, const Params& params, const BaseFlow& flow,
                    Complex c);

// Linearized-operator error of a layer mode (first component is zero; the
// divergence of the layer fields vanishes identically, so no bulk-viscosity
// terms survive).
struct FastError {
  CVec eu, ev;
};

FastError fast_error_field(const LayerMode& mode, const Params& params, const BaseFlow& flow,
                           const Vec& y);

// Stable evaluation of Ai(j, z0 + t e^{i pi/6}) / Ai(2, z0), j = 0, 1, 2.
struct LayerRatios {
  Complex r0, r1, r2;
};
LayerRatios layer_ratios(Complex z0, Real t);

}  // namespace chanstab

#endif  // CHANSTAB_FAST_MODES_HPP_
