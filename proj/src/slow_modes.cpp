#include "chanstab/slow_modes.hpp"

#include <algorithm>
#include <cmath>

#include "chanstab/errors.hpp"

namespace chanstab {

namespace {

struct ProfileAt {
  Vec us, us1, us2;
};

ProfileAt sample_at(const ProfileFn& f, const Vec& y) {
  ProfileAt p;
  p.us = Vec(y.size());
  p.us1 = Vec(y.size());
  p.us2 = Vec(y.size());
  for (int j = 0; j < y.size(); ++j) {
    ProfilePoint q = f(y[j]);
    p.us[j] = q.u;
    p.us1[j] = q.d1;
    p.us2[j] = q.d2;
  }
  return p;
}

}  // namespace

int slow_mode_fine_n(const BaseFlow& flow, Complex c) {
  // distance of the complex zero of U_s - c to [-1,1] in the theta plane,
  // estimated from the nearest real approach of U_s to Re c
  const int scan = 512;
  Real best = 1e300;
  for (int j = 0; j <= scan; ++j) {
    Real y = std::cos(kPi * j / scan);
    ProfilePoint p = flow.profile(y);
    Real gap = std::abs(Complex(p.u) - c);
    Real denom = std::max(std::abs(p.d1), std::sqrt(0.5 * std::abs(p.d2) * gap));
    if (denom == 0.0) continue;
    Real dist = gap / denom;
    Real theta = kPi * j / scan;
    Real tdist = dist / std::max(std::sin(theta), std::sqrt(2.0 * dist));
    best = std::min(best, tdist);
  }
  Real target = 16.0 / std::max(best, 1e-12);
  int nf = static_cast<int>(256.0 * std::ceil(target / 256.0));
  return std::clamp(nf, 1024, 8192);
}

SlowModes::SlowModes(const BaseFlow& flow, Complex c, Real m, int fine_n)
    : profile_(flow.profile), c_(c), m_(m) {
  if (!(c.imag() >= 1e-12))
    throw NearRealAxis("slow modes need Im c >= 1e-12 for pole-free quadrature");
  nf_ = (fine_n > 0) ? fine_n : slow_mode_fine_n(flow, c);
  const int P = nf_ + 1;

  Vec y(P);
  for (int j = 0; j <= nf_; ++j) y[j] = std::cos(kPi * j / nf_);
  y[0] = 1.0;
  y[nf_] = -1.0;
  ProfileAt p = sample_at(profile_, y);

  CVec integrand(P);
  for (int j = 0; j < P; ++j) {
    Complex uc = p.us[j] - c_;
    integrand[j] = 1.0 / (uc * uc);
  }
  jc_ = cheb_cumulative(cheb_coeffs(integrand), 0.0);

  // phi_- sampled through its own J values, then the product series
  CVec jvals = cheb_eval_many(jc_, y);
  CVec pm(P), pp(P), mm(P);
  for (int j = 0; j < P; ++j) {
    Complex uc = p.us[j] - c_;
    Complex phim = uc * jvals[j] - m_ * m_ * uc * y[j];
    Complex phip = uc;
    pm[j] = phip * phim;
    pp[j] = phip * phip;
    mm[j] = phim * phim;
  }
  pm_c_ = cheb_cumulative(cheb_coeffs(pm), -1.0);
  pp_c_ = cheb_cumulative(cheb_coeffs(pp), -1.0);
  mm_c_ = cheb_cumulative(cheb_coeffs(mm), -1.0);
  pm_total_ = cheb_eval(pm_c_, 1.0);
  pp_total_ = cheb_eval(pp_c_, 1.0);
}

Complex SlowModes::cum_sq_inv(Real y) const { return cheb_eval(jc_, y); }
Complex SlowModes::cum_pm_from_bottom(Real y) const { return cheb_eval(pm_c_, y); }
Complex SlowModes::cum_pp_to_top(Real y) const { return pp_total_ - cheb_eval(pp_c_, y); }
Complex SlowModes::cum_mm_from_bottom(Real y) const { return cheb_eval(mm_c_, y); }

ScalarField SlowModes::phi_plus(const Vec& y) const {
  ProfileAt p = sample_at(profile_, y);
  ScalarField f;
  f.v = CVec(y.size());
  f.d1 = CVec(y.size());
  f.d2 = CVec(y.size());
  f.d3 = CVec::Zero(y.size());
  f.d4 = CVec::Zero(y.size());
  for (int j = 0; j < y.size(); ++j) {
    f.v[j] = p.us[j] - c_;
    f.d1[j] = p.us1[j];
    f.d2[j] = p.us2[j];
  }
  return f;
}

ScalarField SlowModes::phi_minus(const Vec& y) const {
  ProfileAt p = sample_at(profile_, y);
  const Real m2 = m_ * m_;
  ScalarField f;
  f.v = CVec(y.size());
  f.d1 = CVec(y.size());
  f.d2 = CVec(y.size());
  f.d3 = CVec(y.size());
  f.d4 = CVec(y.size());
  for (int j = 0; j < y.size(); ++j) {
    Complex uc = p.us[j] - c_;
    Complex jv = cheb_eval(jc_, y[j]);
    Real us1 = p.us1[j], us2 = p.us2[j];
    f.v[j] = uc * jv - m2 * uc * y[j];
    f.d1[j] = us1 * jv + 1.0 / uc - m2 * (y[j] * us1 + uc);
    f.d2[j] = us2 * jv - m2 * (y[j] * us2 + 2.0 * us1);
    f.d3[j] = us2 / (uc * uc) - 3.0 * m2 * us2;
    f.d4[j] = -2.0 * us1 * us2 / (uc * uc * uc);
  }
  return f;
}

ScalarField SlowModes::phi_plus_s(const Vec& y, Real k) const {
  ScalarField fp = phi_plus(y);
  ScalarField fm = phi_minus(y);
  const Real k2 = k * k;
  ScalarField f;
  const long n = y.size();
  f.v = CVec(n);
  f.d1 = CVec(n);
  f.d2 = CVec(n);
  f.d3 = CVec(n);
  for (long j = 0; j < n; ++j) {
    Complex i1 = cheb_eval(pm_c_, y[j]);
    Complex i2 = pp_total_ - cheb_eval(pp_c_, y[j]);
    f.v[j] = fp.v[j] - k2 * fp.v[j] * i1 - k2 * fm.v[j] * i2;
    f.d1[j] = fp.d1[j] - k2 * fp.d1[j] * i1 - k2 * fm.d1[j] * i2;
    f.d2[j] = fp.d2[j] - k2 * fp.d2[j] * i1 - k2 * fm.d2[j] * i2 -
              k2 * fp.d1[j] * fp.v[j] * fm.v[j] + k2 * fm.d1[j] * fp.v[j] * fp.v[j];
    f.d3[j] = fp.d3[j] - k2 * fp.d3[j] * i1 - k2 * fm.d3[j] * i2 +
              2.0 * k2 * fm.d2[j] * fp.v[j] * fp.v[j] -
              2.0 * k2 * fp.d2[j] * fp.v[j] * fm.v[j] + k2 * fp.v[j] * fp.d1[j] * fm.d1[j] -
              k2 * fp.d1[j] * fp.d1[j] * fm.v[j];
  }
  return f;
}

ScalarField SlowModes::phi_minus_s(const Vec& y, Real k) const {
  ScalarField fp = phi_plus(y);
  ScalarField fm = phi_minus(y);
  const Real k2 = k * k;
  ScalarField f;
  const long n = y.size();
  f.v = CVec(n);
  f.d1 = CVec(n);
  f.d2 = CVec(n);
  f.d3 = CVec(n);
  f.d4 = CVec(n);
  for (long j = 0; j < n; ++j) {
    Complex q1 = cheb_eval(mm_c_, y[j]);
    Complex q2 = pm_total_ - cheb_eval(pm_c_, y[j]);
    f.v[j] = fm.v[j] - k2 * q1 * fp.v[j] - k2 * q2 * fm.v[j];
    f.d1[j] = fm.d1[j] - k2 * q1 * fp.d1[j] - k2 * q2 * fm.d1[j];
    f.d2[j] = fm.d2[j] - k2 * fp.d2[j] * q1 - k2 * fm.d2[j] * q2 -
              k2 * fp.d1[j] * fm.v[j] * fm.v[j] + k2 * fm.d1[j] * fp.v[j] * fm.v[j];
    f.d3[j] = fm.d3[j] - k2 * fp.d3[j] * q1 - k2 * fm.d3[j] * q2 -
              2.0 * k2 * fp.d2[j] * fm.v[j] * fm.v[j] +
              2.0 * k2 * fm.d2[j] * fp.v[j] * fm.v[j] + k2 * fp.v[j] * fm.d1[j] * fm.d1[j] -
              k2 * fm.d1[j] * fp.d1[j] * fm.v[j];
    f.d4[j] = fm.d4[j] - k2 * fp.d4[j] * q1 - k2 * fm.d4[j] * q2 -
              3.0 * k2 * fp.d3[j] * fm.v[j] * fm.v[j] +
              3.0 * k2 * fm.d3[j] * fp.v[j] * fm.v[j] -
              5.0 * k2 * fp.d2[j] * fm.d1[j] * fm.v[j] +
              4.0 * k2 * fm.d2[j] * fm.d1[j] * fp.v[j] + k2 * fm.d2[j] * fp.d1[j] * fm.v[j];
  }
  return f;
}

void SlowModes::corrector(int sign, const Vec& y, CVec* val, CVec* d1) const {
  ScalarField fp = phi_plus(y);
  ScalarField fm = phi_minus(y);
  const long n = y.size();
  *val = CVec(n);
  *d1 = CVec(n);
  for (long j = 0; j < n; ++j) {
    if (sign > 0) {
      Complex i1 = cheb_eval(pm_c_, y[j]);
      Complex i2 = pp_total_ - cheb_eval(pp_c_, y[j]);
      (*val)[j] = -(fp.v[j] * i1 + fm.v[j] * i2);
      (*d1)[j] = -(fp.d1[j] * i1 + fm.d1[j] * i2);
    } else {
      Complex q1 = cheb_eval(mm_c_, y[j]);
      Complex q2 = pm_total_ - cheb_eval(pm_c_, y[j]);
      (*val)[j] = -(q1 * fp.v[j] + q2 * fm.v[j]);
      (*d1)[j] = -(q1 * fp.d1[j] + q2 * fm.d1[j]);
    }
  }
}

SlowModePair phi_pair(const ChebGrid& grid, const BaseFlow& flow, Complex c, Real m, int fine_n) {
  SlowModePair pair;
  pair.detail = std::make_shared<SlowModes>(flow, c, m, fine_n);
  pair.c = c;
  pair.m = m;
  pair.phi_plus = pair.detail->phi_plus(grid.nodes);
  pair.phi_minus = pair.detail->phi_minus(grid.nodes);
  return pair;
}

void corrected_phi(SlowModePair& pair, const ChebGrid& grid, Complex c, Real k) {
  (void)c;
  pair.k = k;
  pair.phi_plus_s = pair.detail->phi_plus_s(grid.nodes, k);
  pair.phi_minus_s = pair.detail->phi_minus_s(grid.nodes, k);
  pair.detail->corrector(+1, grid.nodes, &pair.phi_plus_k, &pair.phi_plus_k_d1);
  pair.detail->corrector(-1, grid.nodes, &pair.phi_minus_k, &pair.phi_minus_k_d1);
  pair.corrected = true;
}

CVec rayleigh_residual(const ScalarField& phi, const Vec& y, const ProfileFn& profile, Complex c,
                       Real k, Real m) {
  ProfileAt p = sample_at(profile, y);
  SoundFactorFields sf = sound_factor_fields(p.us, p.us1, p.us2, c, m, /*guard=*/false);
  CVec out(y.size());
  for (int j = 0; j < y.size(); ++j) {
    Complex uc = p.us[j] - c;
    Complex g = uc * phi.d1[j] - p.us1[j] * phi.v[j];
    Complex g1 = uc * phi.d2[j] - p.us2[j] * phi.v[j];
    out[j] = sf.ainv_d1[j] * g + sf.ainv[j] * g1 - k * k * uc * phi.v[j];
  }
  return out;
}

InviscidMode inviscid_fields(const SlowModes& sm, int sign, const Vec& y, Real k,
                             const ProfileFn& profile) {
  ProfileAt p = sample_at(profile, y);
  const Complex c = sm.c();
  const Real m = sm.mach();
  const Real m2 = m * m;
  SoundFactorFields sf = sound_factor_fields(p.us, p.us1, p.us2, c, m, /*guard=*/false);
  ScalarField phi = (sign > 0) ? sm.phi_plus_s(y, k) : sm.phi_minus_s(y, k);
  const bool have_d4 = phi.d4.size() == y.size();

  const long n = y.size();
  InviscidMode mode;
  mode.sign = sign;
  mode.c = c;
  mode.bundle.label = (sign > 0) ? ModeLabel::slow_plus : ModeLabel::slow_minus;
  mode.bundle.rho = CVec(n);
  mode.bundle.u = CVec(n);
  mode.bundle.v = CVec(n);
  mode.rho_d1 = CVec(n);
  mode.u_d1 = CVec(n);
  mode.u_d2 = CVec(n);
  mode.u_d3 = have_d4 ? CVec(n) : CVec();
  mode.v_d1 = CVec(n);
  mode.v_d2 = CVec(n);
  mode.v_d3 = CVec(n);

  const Complex ik = kI * k;
  for (long j = 0; j < n; ++j) {
    Complex uc = p.us[j] - c;
    Real us1 = p.us1[j], us2 = p.us2[j];
    Complex g = uc * phi.d1[j] - us1 * phi.v[j];
    Complex g1 = uc * phi.d2[j] - us2 * phi.v[j];
    Complex g2 = uc * phi.d3[j] + us1 * phi.d2[j] - us2 * phi.d1[j];
    Complex r = -sf.ainv[j] * g;
    Complex r1 = -(sf.ainv_d1[j] * g + sf.ainv[j] * g1);
    Complex r2 = -(sf.ainv_d2[j] * g + 2.0 * sf.ainv_d1[j] * g1 + sf.ainv[j] * g2);
    mode.bundle.rho[j] = (m > 0.0) ? m2 * r : r;
    mode.rho_d1[j] = (m > 0.0) ? m2 * r1 : r1;
    mode.bundle.u[j] = phi.d1[j] - uc * m2 * r;
    mode.u_d1[j] = phi.d2[j] - us1 * m2 * r - uc * m2 * r1;
    mode.u_d2[j] = phi.d3[j] - us2 * m2 * r - 2.0 * us1 * m2 * r1 - uc * m2 * r2;
    if (have_d4) {
      Complex g3 = uc * phi.d4[j] + 2.0 * us1 * phi.d3[j];
      Complex r3 = -(sf.ainv_d3[j] * g + 3.0 * sf.ainv_d2[j] * g1 + 3.0 * sf.ainv_d1[j] * g2 +
                     sf.ainv[j] * g3);
      mode.u_d3[j] = phi.d4[j] - 3.0 * us2 * m2 * r1 - 3.0 * us1 * m2 * r2 - uc * m2 * r3;
    }
    mode.bundle.v[j] = -ik * phi.v[j];
    mode.v_d1[j] = -ik * phi.d1[j];
    mode.v_d2[j] = -ik * phi.d2[j];
    mode.v_d3[j] = -ik * phi.d3[j];
  }
  sm.corrector(sign, y, &mode.phik, &mode.phik_d1);
  mode.bundle.record_boundary();
  return mode;
}

SlowErrors slow_error_field(const InviscidMode& mode, const Params& params,
                            const ProfileFn& profile, const Vec& y) {
  ProfileAt p = sample_at(profile, y);
  const Real k = params.k, eps = params.eps, lam = params.lambda;
  const Real k2 = k * k, k4 = k2 * k2;
  const Complex ik = kI * k;
  const Complex c = mode.c;
  const Real m2 = params.mach * params.mach;
  const bool have_u3 = mode.u_d3.size() == y.size();

  const long n = y.size();
  SlowErrors out;
  out.full.eu = CVec(n);
  out.full.ev = CVec(n);
  if (have_u3) out.full.eu_d1 = CVec(n);
  out.part2.eu = CVec::Zero(n);
  out.part2.ev = CVec(n);
  out.part2.eu_d1 = CVec::Zero(n);

  for (long j = 0; j < n; ++j) {
    Complex uc = p.us[j] - c;
    Real us1 = p.us1[j], us2 = p.us2[j];
    // true density and its derivative; at mach 0 the slot already holds the
    // scaled variable and the true density vanishes
    Complex rho = (params.mach > 0.0) ? mode.bundle.rho[j] : Complex(0.0);
    Complex rho1 = (params.mach > 0.0) ? mode.rho_d1[j] : Complex(0.0);
    // continuity is exact for these modes: div = -ik (U_s - c) rho
    Complex div = -ik * uc * rho;
    Complex div1 = -ik * (us1 * rho + uc * rho1);
    Complex lap_u = mode.u_d2[j] - k2 * mode.bundle.u[j];
    Complex eu = -eps * lap_u - lam * ik * eps * div + eps * us2 * rho;
    Complex lap_v = mode.v_d2[j] - k2 * mode.bundle.v[j];
    Complex ev_visc = -eps * lap_v - lam * eps * div1;
    // the inviscid rows reduce to minus the Rayleigh residual of phi^s,
    // i.e. +k^4 (U_s - c) phi_k by the corrector identity
    Complex ev_corr = k4 * uc * mode.phik[j];
    out.full.eu[j] = eu;
    out.full.ev[j] = ev_visc + ev_corr;
    out.part2.ev[j] = ev_corr;
    if (have_u3) {
      Complex lap_u1 = mode.u_d3[j] - k2 * mode.u_d1[j];
      out.full.eu_d1[j] = -eps * lap_u1 - lam * ik * eps * div1 + eps * us2 * rho1;
    }
  }
  out.part1.eu = out.full.eu;
  out.part1.ev = out.full.ev - out.part2.ev;
  out.part1.eu_d1 = out.full.eu_d1;
  (void)m2;
  return out;
}

}  // namespace chanstab
