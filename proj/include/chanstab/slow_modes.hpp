#ifndef CHANSTAB_SLOW_MODES_HPP_
#define CHANSTAB_SLOW_MODES_HPP_

#include <memory>

#include "chanstab/base_flow.hpp"
#include "chanstab/cheb.hpp"
#include "chanstab/coeffs.hpp"
#include "chanstab/fields.hpp"
#include "chanstab/params.hpp"

namespace chanstab {

// A complex field with analytic derivatives at a set of points. d3/d4 may be
// empty when an evaluation order does not provide them.
struct ScalarField {
  CVec v, d1, d2, d3, d4;
};

// Inviscid (Rayleigh-type) solutions phi_+/phi_- around the shear profile
// and their k^2-corrected versions. All cumulative integrals are held as
// Chebyshev antiderivative series on an internal fine grid, so fields can be
// evaluated with analytic derivatives at arbitrary points. Profile
// derivatives beyond the second are taken as zero, exact for the quadratic
// profiles this toolkit targets.
class SlowModes {
 public:
  // fine_n = 0 chooses the resolution from the distance of the critical
  // point of U_s - c to the real interval. Throws NearRealAxis for
  // Im c < 1e-12.
  SlowModes(const BaseFlow& flow, Complex c, Real m, int fine_n = 0);

  ScalarField phi_plus(const Vec& y) const;
  ScalarField phi_minus(const Vec& y) const;
  ScalarField phi_plus_s(const Vec& y, Real k) const;   // derivatives to order 3
  ScalarField phi_minus_s(const Vec& y, Real k) const;  // derivatives to order 4

  // the k^2-corrector of the chosen branch (+1 or -1) and its derivative
  void corrector(int sign, const Vec& y, CVec* val, CVec* d1) const;

  // cumulative integrals, mostly for tests
  Complex cum_sq_inv(Real y) const;      // int_0^y (U_s-c)^{-2}
  Complex cum_pm_from_bottom(Real y) const;   // int_{-1}^y phi+ phi-
  Complex cum_pp_to_top(Real y) const;        // int_y^1 phi+^2
  Complex cum_mm_from_bottom(Real y) const;   // int_{-1}^y phi-^2

  Complex c() const { return c_; }
  Real mach() const { return m_; }
  int fine_n() const { return nf_; }

 private:
  ProfileFn profile_;
  Complex c_;
  Real m_;
  int nf_;
  CVec jc_;        // series of int_0^y (U_s-c)^{-2}
  CVec pm_c_;      // series of int_{-1}^y phi+ phi-
  CVec pp_c_;      // series of int_{-1}^y phi+^2
  CVec mm_c_;      // series of int_{-1}^y phi-^2
  Complex pm_total_, pp_total_;
};

// Pick a fine-grid degree resolving the critical point of U_s - Re c.
int slow_mode_fine_n(const BaseFlow& flow, Complex c);

// Spec-level pair of inviscid solutions materialized on a grid.
struct SlowModePair {
  ScalarField phi_plus, phi_minus;
  ScalarField phi_plus_s, phi_minus_s;
  CVec phi_plus_k, phi_plus_k_d1, phi_minus_k, phi_minus_k_d1;
  Complex c;
  Real k = 0.0, m = 0.0;
  bool corrected = false;
  std::shared_ptr<const SlowModes> detail;
};

SlowModePair phi_pair(const ChebGrid& grid, const BaseFlow& flow, Complex c, Real m,
                      int fine_n = 0);
void corrected_phi(SlowModePair& pair, const ChebGrid& grid, Complex c, Real k);

// Ray(phi) = d/dy { A^{-1} [ (U_s-c) phi' - U_s' phi ] } - k^2 (U_s-c) phi,
// evaluated from the field's analytic derivatives.
CVec rayleigh_residual(const ScalarField& phi, const Vec& y, const ProfileFn& profile, Complex c,
                       Real k, Real m);

// One inviscid mode with the derivative data needed by the error fields.
struct InviscidMode {
  ModeBundle bundle;
  CVec u_d1, u_d2, u_d3;      // u_d3 only for the minus branch
  CVec rho_d1;                // bundle-convention density derivative
  CVec v_d1, v_d2, v_d3;
  CVec phik, phik_d1;
  Complex c;
  int sign = +1;
};

InviscidMode inviscid_fields(const SlowModes& sm, int sign, const Vec& y, Real k,
                             const ProfileFn& profile);

// The linearized-operator error of an inviscid mode. First component is
// identically zero. part1/part2 split the plus-branch error into its
// viscous part and the corrector tail (0, 0, -k^4 (U_s-c) phi_k).
struct SlowErrorField {
  CVec eu, ev;
  CVec eu_d1;
};
struct SlowErrors {
  SlowErrorField full, part1, part2;
};

SlowErrors slow_error_field(const InviscidMode& mode, const Params& params,
                            const ProfileFn& profile, const Vec& y);

}  // namespace chanstab

#endif  // CHANSTAB_SLOW_MODES_HPP_
