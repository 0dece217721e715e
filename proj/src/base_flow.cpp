#include "chanstab/base_flow.hpp"

#include <cmath>
#include <stdexcept>

namespace chanstab {

BaseFlow sample_profile(const ChebGrid& grid, const ProfileFn& f) {
  const int m = grid.size();
  if (m == 0) throw std::invalid_argument("sample_profile: empty grid");
  BaseFlow flow;
  flow.profile = f;
  flow.u_s = Vec(m);
  flow.u_s1 = Vec(m);
  flow.u_s2 = Vec(m);
  for (int j = 0; j < m; ++j) {
    ProfilePoint p = f(grid.nodes[j]);
    flow.u_s[j] = p.u;
    flow.u_s1[j] = p.d1;
    flow.u_s2[j] = p.d2;
  }
  Real slope_bottom = flow.us1_bottom();
  Real slope_top = flow.us1_top();
  if (slope_bottom != 0.0) flow.tau = integrate(grid, Vec(flow.u_s.array().square())) / slope_bottom;
  if (slope_top != 0.0) flow.beta = slope_bottom / std::abs(slope_top);
  return flow;
}

BaseFlow make_poiseuille(const ChebGrid& grid) {
  return sample_profile(grid, [](Real y) { return ProfilePoint{1.0 - y * y, -2.0 * y, -2.0}; });
}

ValidationReport validate_profile(const BaseFlow& flow, Real tol) {
  ValidationReport r;
  const int m = static_cast<int>(flow.u_s.size());
  if (m < 8) {
    r.items.push_back({"node count >= 8", false, static_cast<Real>(m)});
    r.all_pass = false;
    return r;
  }
  auto add = [&](const std::string& name, bool pass, Real value) {
    r.items.push_back({name, pass, value});
  };
  Real u_top = flow.u_s[0], u_bottom = flow.u_s[m - 1];
  add("U_s(1) = 0", std::abs(u_top) <= tol, u_top);
  add("U_s(-1) = 0", std::abs(u_bottom) <= tol, u_bottom);
  add("U_s'(-1) > 0", flow.us1_bottom() > tol, flow.us1_bottom());
  add("U_s'(1) < 0", flow.us1_top() < -tol, flow.us1_top());
  Real max_us2 = -std::numeric_limits<Real>::infinity();
  for (int j = 1; j < m - 1; ++j) max_us2 = std::max(max_us2, flow.u_s2[j]);
  add("U_s'' <= -tol interior", max_us2 <= -tol, max_us2);
  add("beta > 0", flow.beta > 0.0, flow.beta);
  add("tau > 0", flow.tau > 0.0, flow.tau);
  r.all_pass = true;
  for (const auto& it : r.items) r.all_pass = r.all_pass && it.pass;
  return r;
}

}  // namespace chanstab
