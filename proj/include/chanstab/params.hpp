#ifndef CHANSTAB_PARAMS_HPP_
#define CHANSTAB_PARAMS_HPP_

#include <cmath>

#include "chanstab/errors.hpp"
#include "chanstab/types.hpp"

namespace chanstab {

// Scalar problem configuration. k and n are always derived from (t0, eps);
// they are never set independently.
struct Params {
  Real eps = 0.0;     // viscosity parameter, 0 < eps < 1
  Real mach = 0.0;    // Mach number, 0 <= mach < 1/sqrt(3); 0 is the incompressible limit
  Real lambda = 0.0;  // bulk viscosity ratio, >= 0
  Real t0 = 1.0;      // frequency amplitude, >= 1
  Real k = 0.0;       // tangential frequency t0 * eps^{1/7}
  Real n = 0.0;       // rescaled frequency k / eps

  static Params make(Real eps, Real mach, Real lambda, Real t0) {
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("eps must lie in (0,1)");
    if (!(mach >= 0.0 && mach < kMachBound)) throw ConfigError("Mach must be < 0.5774");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
    if (!(t0 >= 1.0)) throw ConfigError("t0 must be >= 1");
    Params p;
    p.eps = eps;
    p.mach = mach;
    p.lambda = lambda;
    p.t0 = t0;
    p.k = t0 * std::pow(eps, 1.0 / 7.0);
    p.n = p.k / eps;
    return p;
  }
};

}  // namespace chanstab

#endif  // CHANSTAB_PARAMS_HPP_
