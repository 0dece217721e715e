#ifndef CHANSTAB_BASE_FLOW_HPP_
#define CHANSTAB_BASE_FLOW_HPP_

#include <functional>
#include <string>
#include <vector>

#include "chanstab/cheb.hpp"
#include "chanstab/types.hpp"

namespace chanstab {

// Profile value and first two derivatives at a point. Profiles are supplied
// analytically; nothing here is differenced numerically.
struct ProfilePoint {
  Real u, d1, d2;
};
using ProfileFn = std::function<ProfilePoint(Real)>;

// Shear profile sampled on a grid, with the derived constants
//   tau  = (1/U_s'(-1)) * int_{-1}^{1} U_s^2
//   beta = U_s'(-1) / |U_s'(1)|
struct BaseFlow {
  Vec u_s, u_s1, u_s2;
  Real tau = 0.0;
  Real beta = 0.0;
  ProfileFn profile;

  Real us1_bottom() const { return u_s1[u_s1.size() - 1]; }  // U_s'(-1)
  Real us1_top() const { return u_s1[0]; }                   // U_s'(+1)
};

BaseFlow sample_profile(const ChebGrid& grid, const ProfileFn& f);
BaseFlow make_poiseuille(const ChebGrid& grid);

struct ValidationReport {
  struct Item {
    std::string name;
    bool pass;
    Real value;
  };
  std::vector<Item> items;
  bool all_pass = false;
};

// Checks the admissibility conditions on the sampled profile: zero wall
// values, wall slopes of the right sign, and strict interior concavity
// (U_s'' <= -tol on interior nodes).
ValidationReport validate_profile(const BaseFlow& flow, Real tol = 1e-8);

}  // namespace chanstab

#endif  // CHANSTAB_BASE_FLOW_HPP_
