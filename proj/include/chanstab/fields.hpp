#ifndef CHANSTAB_FIELDS_HPP_
#define CHANSTAB_FIELDS_HPP_

#include "chanstab/types.hpp"

namespace chanstab {

enum class ModeLabel { slow_plus, slow_minus, fast_plus, fast_minus, exact };

struct BoundaryValues {
  Complex rho_top{}, u_top{}, v_top{};
  Complex rho_bottom{}, u_bottom{}, v_bottom{};
};

// A (rho, u, v) triple sampled on a grid (descending nodes, index 0 = y=1).
// For mach = 0 the rho slot holds the pressure surrogate m^{-2} rho, which is
// the quantity that stays finite in the incompressible limit.
struct ModeBundle {
  CVec rho, u, v;
  BoundaryValues boundary{};
  ModeLabel label = ModeLabel::exact;

  void record_boundary() {
    const long m = rho.size() - 1;
    boundary.rho_top = rho[0];
    boundary.u_top = u[0];
    boundary.v_top = v[0];
    boundary.rho_bottom = rho[m];
    boundary.u_bottom = u[m];
    boundary.v_bottom = v[m];
  }
};

}  // namespace chanstab

#endif  // CHANSTAB_FIELDS_HPP_
