#include "chanstab/resolvent.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "chanstab/errors.hpp"

namespace chanstab {

namespace {

// Full collocation rows of the linearized operator in the r = m^{-2} rho
// form, without the -ikc shift. Row/column layout: [r; u; v], each of
// size P = n+1. The shift diagonal is m^2 on the r rows and 1 elsewhere.
CMat assemble_linearized(const ChebGrid& g, const BaseFlow& flow, const Params& p,
                         Vec* shift_diag) {
  const int P = g.size();
  const Real k = p.k, eps = p.eps, lam = p.lambda, m2 = p.mach * p.mach;
  const Complex ik = kI * k;
  CMat a = CMat::Zero(3 * P, 3 * P);
  for (int j = 0; j < P; ++j) {
    const Real us = flow.u_s[j], us1 = flow.u_s1[j], us2 = flow.u_s2[j];
    // continuity
    a(j, j) += ik * us * m2;
    a(j, P + j) += ik;
    a.row(j).segment(2 * P, P) += g.d1.row(j).cast<Complex>();
    // tangential momentum
    a.row(P + j).segment(P, P) += (-eps) * g.d2.row(j).cast<Complex>();
    a(P + j, P + j) += eps * k * k + lam * eps * k * k + ik * us;
    a.row(P + j).segment(2 * P, P) += (-lam * ik * eps) * g.d1.row(j).cast<Complex>();
    a(P + j, 2 * P + j) += us1;
    a(P + j, j) += ik + eps * us2 * m2;
    // normal momentum
    a.row(2 * P + j).segment(2 * P, P) += (-(1.0 + lam) * eps) * g.d2.row(j).cast<Complex>();
    a(2 * P + j, 2 * P + j) += eps * k * k + ik * us;
    a.row(2 * P + j).segment(P, P) += (-lam * ik * eps) * g.d1.row(j).cast<Complex>();
    a.row(2 * P + j).segment(0, P) += g.d1.row(j).cast<Complex>();
  }
  if (shift_diag) {
    *shift_diag = Vec::Ones(3 * P);
    shift_diag->head(P).setConstant(m2);
  }
  return a;
}

}  // namespace

OsOperator build_os_operator(const ChebGrid& grid, const BaseFlow& flow, const Params& params,
                             Complex c) {
  const int P = grid.size();
  SoundFactorFields sf = sound_factor_fields(flow, c, params.mach);
  const Real k = params.k;
  const Complex iovern = kI / params.n;

  OsOperator os;
  os.lambda_op = sf.ainv.asDiagonal() * grid.d2.cast<Complex>() +
                 sf.ainv_d1.asDiagonal() * grid.d1.cast<Complex>();
  os.lambda_op.diagonal().array() -= k * k;

  // L_Lambda * (D2 - k^2 I) expanded against the precomputed powers of D1
  CMat ld = sf.ainv.asDiagonal() * grid.d4.cast<Complex>() +
            sf.ainv_d1.asDiagonal() * grid.d3.cast<Complex>() -
            (k * k) * (sf.ainv.asDiagonal() * grid.d2.cast<Complex>() +
                       sf.ainv_d1.asDiagonal() * grid.d1.cast<Complex>()) -
            (k * k) * grid.d2.cast<Complex>();
  ld.diagonal().array() += k * k * k * k;

  CVec uc = flow.u_s.cast<Complex>();
  uc.array() -= c;
  os.op = iovern * ld + uc.asDiagonal() * os.lambda_op;
  os.op.diagonal() -= sf.dy_ainv_us1;
  return os;
}

OsSolution os_solve(const CVec& h, Complex c, const Params& params, const BaseFlow& flow,
                    const ChebGrid& grid) {
  const int n = grid.n;
  OsOperator os = build_os_operator(grid, flow, params, c);
  std::vector<BoundaryRow> bcs;
  CVec e_top = CVec::Zero(grid.size()), e_bot = CVec::Zero(grid.size());
  e_top[0] = 1.0;
  e_bot[n] = 1.0;
  bcs.push_back({0, e_top, 0.0});
  bcs.push_back({1, os.lambda_op.row(0).transpose(), 0.0});
  bcs.push_back({n - 1, os.lambda_op.row(n).transpose(), 0.0});
  bcs.push_back({n, e_bot, 0.0});
  OsSolution sol;
  sol.phi = bvp_solve(os.op, h, bcs, &sol.info);
  sol.lambda_phi = os.lambda_op * sol.phi;
  return sol;
}

CVec omega_op(const CVec& f_u, const CVec& f_v, Complex c, Real k, const BaseFlow& flow, Real m,
              const ChebGrid& grid, const CVec* fu_d1) {
  SoundFactorFields sf = sound_factor_fields(flow, c, m);
  const Complex ik = kI * k;
  CVec dterm;
  if (fu_d1) {
    dterm = sf.ainv_d1.cwiseProduct(f_u) + sf.ainv.cwiseProduct(*fu_d1);
  } else {
    dterm = grid.d1 * sf.ainv.cwiseProduct(f_u);
  }
  return -f_v + dterm / ik;
}

ResolventWorkspace::ResolventWorkspace(const ChebGrid& grid, const BaseFlow& flow,
                                       const Params& params)
    : grid_(grid), flow_(flow), params_(params) {
  const int P = grid_.size();
  const int n = grid_.n;
  const Real m2 = params_.mach * params_.mach;

  lin0_ = assemble_linearized(grid_, flow_, params_, &shift_diag_);

  // Stokes operator: drop the stretching term, then impose
  // d/dy U(+-1) = 0 and V(+-1) = 0 by row replacement and reduction.
  CMat s0 = lin0_;
  for (int j = 0; j < P; ++j) s0(P + j, 2 * P + j) -= flow_.u_s1[j];
  s0.row(P + 0).setZero();
  s0.row(P + 0).segment(P, P) = grid_.d1.row(0).cast<Complex>();
  s0.row(P + n).setZero();
  s0.row(P + n).segment(P, P) = grid_.d1.row(n).cast<Complex>();
  s0.row(2 * P + 0).setZero();
  s0(2 * P + 0, 2 * P + 0) = 1.0;
  s0.row(2 * P + n).setZero();
  s0(2 * P + n, 2 * P + n) = 1.0;

  std::vector<int> removed = {P + 0, P + n, 2 * P + 0, 2 * P + n};
  keep_.clear();
  for (int i = 0; i < 3 * P; ++i)
    if (i != removed[0] && i != removed[1] && i != removed[2] && i != removed[3])
      keep_.push_back(i);
  const int nr = static_cast<int>(keep_.size());

  // wall u values in terms of the interior ones through the derivative rows
  Eigen::Matrix2d gw;
  gw << grid_.d1(0, 0), grid_.d1(0, n), grid_.d1(n, 0), grid_.d1(n, n);
  u_wall_inv_ = gw.inverse();
  u_wall_t_ = Mat::Zero(2, nr);
  for (int idx = 0; idx < nr; ++idx) {
    int col = keep_[idx];
    if (col >= P + 1 && col <= P + n - 1) {
      int j = col - P;
      Eigen::Vector2d rhs(grid_.d1(0, j), grid_.d1(n, j));
      Eigen::Vector2d t = -u_wall_inv_ * rhs;
      u_wall_t_(0, idx) = t[0];
      u_wall_t_(1, idx) = t[1];
    }
  }

  stokes0_red_ = CMat::Zero(nr, nr);
  for (int ri = 0; ri < nr; ++ri)
    for (int ci = 0; ci < nr; ++ci) stokes0_red_(ri, ci) = s0(keep_[ri], keep_[ci]);
  for (int ri = 0; ri < nr; ++ri) {
    const Complex a0 = s0(keep_[ri], P + 0), aN = s0(keep_[ri], P + n);
    if (a0 != Complex(0.0) || aN != Complex(0.0))
      stokes0_red_.row(ri) +=
          (a0 * u_wall_t_.row(0) + aN * u_wall_t_.row(1)).cast<Complex>();
  }

  if (params_.mach > 0.0) {
    // scale the continuity rows so the shift is a uniform -ikc identity
    stokes0_red_.topRows(P) /= m2;
    stokes_shift_red_ = Vec::Ones(nr);
    stokes_hess_ = std::make_unique<HessenbergShiftSolver>(stokes0_red_);
  } else {
    stokes_shift_red_ = Vec::Ones(nr);
    stokes_shift_red_.head(P).setZero();  // continuity rows carry no c at mach 0
  }
}

void ResolventWorkspace::set_c(Complex c) {
  c_ = c;
  have_c_ = true;
  sf_ = sound_factor_fields(flow_, c, params_.mach);

  const int n = grid_.n;
  OsOperator os = build_os_operator(grid_, flow_, params_, c);
  os_lambda_ = os.lambda_op;
  os_op_ = os.op;
  // boundary rows: phi and Lambda(phi) at both walls
  os_op_.row(0).setZero();
  os_op_(0, 0) = 1.0;
  os_op_.row(1) = os_lambda_.row(0);
  os_op_.row(n - 1) = os_lambda_.row(n);
  os_op_.row(n).setZero();
  os_op_(n, n) = 1.0;
  os_row_scale_ = Vec(grid_.size());
  for (int i = 0; i < grid_.size(); ++i) {
    Real s = os_op_.row(i).cwiseAbs().maxCoeff();
    if (s == 0.0) throw SingularSystem("os operator: zero row");
    os_row_scale_[i] = 1.0 / s;
  }
  os_op_ = os_row_scale_.asDiagonal() * os_op_;
  os_lu_.compute(os_op_);
  os_info_.rcond = os_lu_.rcond();
  os_info_.ill_conditioned = os_info_.rcond < kIllConditionThreshold;

  const Complex shift = kI * params_.k * c;
  if (stokes_hess_) {
    stokes_hess_->set_shift(shift);
  } else {
    stokes_shifted_ = stokes0_red_;
    for (int i = 0; i < stokes_shifted_.rows(); ++i)
      stokes_shifted_(i, i) -= shift * stokes_shift_red_[i];
    stokes_lu_.emplace(stokes_shifted_);
  }
}

QCState ResolventWorkspace::quasi_solve(const CVec& s1, const CVec& s2, const CVec* s1_d1) const {
  if (!have_c_) throw SingularSystem("workspace: set_c before solving");
  const int n = grid_.n;
  const Real k = params_.k, m2 = params_.mach * params_.mach;
  const Complex ik = kI * k;
  const Complex iovern = kI / params_.n;

  CVec dterm = s1_d1 ? CVec(sf_.ainv_d1.cwiseProduct(s1) + sf_.ainv.cwiseProduct(*s1_d1))
                     : CVec(grid_.d1 * sf_.ainv.cwiseProduct(s1));
  CVec omega = -s2 + dterm / ik;

  CVec rhs = omega;
  rhs[0] = 0.0;
  rhs[1] = 0.0;
  rhs[n - 1] = 0.0;
  rhs[n] = 0.0;
  CVec rhs_s = os_row_scale_.asDiagonal() * rhs;
  CVec phi = os_lu_.solve(rhs_s);
  phi += os_lu_.solve(rhs_s - os_op_ * phi);
  if (!phi.allFinite()) throw SingularSystem("quasi_solve: non-finite solution");

  QCState st;
  st.phi = phi;
  st.lambda_phi = os_lambda_ * phi;
  st.os_info = os_info_;

  CVec uc = flow_.u_s.cast<Complex>();
  uc.array() -= c_;
  CVec d1phi = grid_.d1 * phi;
  // Delta_k phi reconstructed from Lambda(phi) to avoid third spectral
  // derivatives of the solve output
  CVec delta_phi = sf_.a.cwiseProduct(st.lambda_phi) +
                   (k * k) * (sf_.a - CVec::Ones(grid_.size())).cwiseProduct(phi) +
                   sf_.a_d1.cwiseProduct(sf_.ainv).cwiseProduct(d1phi);
  CVec dy_delta_phi = grid_.d1 * delta_phi;

  st.r = -sf_.ainv.cwiseProduct(iovern * dy_delta_phi + uc.cwiseProduct(d1phi) -
                                flow_.u_s1.cast<Complex>().cwiseProduct(phi) - s1 / ik);
  st.frak_u = d1phi - m2 * uc.cwiseProduct(st.r);
  st.frak_v = -ik * phi;
  return st;
}

CVec ResolventWorkspace::reduced_stokes_rhs(const CVec& q0, const CVec& q1, const CVec& q2) const {
  const int P = grid_.size();
  const int nr = static_cast<int>(keep_.size());
  const Real m2 = params_.mach * params_.mach;
  CVec rhs(nr);
  for (int i = 0; i < nr; ++i) {
    int idx = keep_[i];
    if (idx < P)
      rhs[i] = (params_.mach > 0.0) ? q0[idx] / m2 : q0[idx];
    else if (idx < 2 * P)
      rhs[i] = q1[idx - P];
    else
      rhs[i] = q2[idx - 2 * P];
  }
  return rhs;
}

StokesState ResolventWorkspace::unpack_stokes(const CVec& x) const {
  const int P = grid_.size();
  const int n = grid_.n;
  StokesState s;
  s.cal_p = CVec::Zero(P);
  s.cal_u = CVec::Zero(P);
  s.cal_v = CVec::Zero(P);
  const int nr = static_cast<int>(keep_.size());
  for (int i = 0; i < nr; ++i) {
    int idx = keep_[i];
    if (idx < P)
      s.cal_p[idx] = x[i];
    else if (idx < 2 * P)
      s.cal_u[idx - P] = x[i];
    else
      s.cal_v[idx - 2 * P] = x[i];
  }
  Complex u_top = 0.0, u_bot = 0.0;
  for (int i = 0; i < nr; ++i) {
    u_top += u_wall_t_(0, i) * x[i];
    u_bot += u_wall_t_(1, i) * x[i];
  }
  s.cal_u[0] = u_top;
  s.cal_u[n] = u_bot;
  return s;
}

StokesState ResolventWorkspace::stokes_solve(const CVec& q0, const CVec& q1,
                                             const CVec& q2) const {
  if (!have_c_) throw SingularSystem("workspace: set_c before solving");
  CVec rhs = reduced_stokes_rhs(q0, q1, q2);
  CVec x;
  if (stokes_hess_) {
    x = stokes_hess_->solve(rhs);
  } else {
    x = stokes_lu_->solve(rhs);
    x += stokes_lu_->solve(rhs - stokes_shifted_ * x);
    if (!x.allFinite()) throw SingularSystem("stokes_solve: non-finite solution");
  }
  return unpack_stokes(x);
}

std::array<CVec, 3> ResolventWorkspace::apply_linearized(const ModeBundle& xb) const {
  const int P = grid_.size();
  const Real m2 = params_.mach * params_.mach;
  CVec x(3 * P);
  // the assembled operator works on the scaled density r = m^{-2} rho
  x.segment(0, P) = (params_.mach > 0.0) ? CVec(xb.rho / m2) : xb.rho;
  x.segment(P, P) = xb.u;
  x.segment(2 * P, P) = xb.v;
  CVec y = lin0_ * x - (kI * params_.k * c_) * shift_diag_.cwiseProduct(x).matrix();
  return {y.segment(0, P), y.segment(P, P), y.segment(2 * P, P)};
}

std::array<CVec, 3> ResolventWorkspace::apply_quasi(const QCState& st) const {
  const int P = grid_.size();
  const Real k = params_.k, eps = params_.eps, m2 = params_.mach * params_.mach;
  const Complex ik = kI * k;
  CVec uc = flow_.u_s.cast<Complex>();
  uc.array() -= c_;
  CVec rho = m2 * st.r;
  CVec divk = ik * st.frak_u + grid_.d1 * st.frak_v;
  CVec q1 = ik * uc.cwiseProduct(rho) + divk;
  CVec combo = st.frak_u + uc.cwiseProduct(rho);
  CVec q2 = -eps * (grid_.d2 * combo - k * k * combo) + ik * uc.cwiseProduct(st.frak_u) +
            flow_.u_s1.cast<Complex>().cwiseProduct(st.frak_v) + ik * st.r;
  CVec q3 = -eps * (grid_.d2 * st.frak_v - k * k * st.frak_v) + ik * uc.cwiseProduct(st.frak_v) +
            grid_.d1 * st.r;
  (void)P;
  return {q1, q2, q3};
}

std::array<CVec, 3> ResolventWorkspace::apply_stokes(const StokesState& st) const {
  ModeBundle b;
  b.rho = (params_.mach > 0.0) ? CVec(params_.mach * params_.mach * st.cal_p) : st.cal_p;
  b.u = st.cal_u;
  b.v = st.cal_v;
  auto rows = apply_linearized(b);
  rows[1] -= flow_.u_s1.cast<Complex>().cwiseProduct(st.cal_v);
  return rows;
}

std::array<CVec, 3> ResolventWorkspace::e_q_error(const QCState& st) const {
  const int P = grid_.size();
  const Real k = params_.k, eps = params_.eps, lam = params_.lambda,
             m2 = params_.mach * params_.mach;
  const Complex ik = kI * k;
  CVec uc = flow_.u_s.cast<Complex>();
  uc.array() -= c_;
  CVec rho = m2 * st.r;
  CVec divk = ik * st.frak_u + grid_.d1 * st.frak_v;
  CVec prod = uc.cwiseProduct(rho);
  CVec eu = eps * (grid_.d2 * prod - k * k * prod) - lam * ik * eps * divk +
            eps * flow_.u_s2.cast<Complex>().cwiseProduct(rho);
  CVec ev = -lam * eps * (grid_.d1 * divk);
  return {CVec::Zero(P), eu, ev};
}

Real ResolventWorkspace::triple_norm(const CVec& p_scaled, const CVec& u, const CVec& v) const {
  const Real wp = (params_.mach > 0.0) ? params_.mach : 1.0;
  Real a = l2_norm(grid_, p_scaled) * wp;
  Real b = l2_norm(grid_, u);
  Real cdd = l2_norm(grid_, v);
  return std::sqrt(a * a + b * b + cdd * cdd);
}

Real ResolventWorkspace::stokes_e_norm(const StokesState& s) const {
  const Complex ik = kI * params_.k;
  CVec divk = ik * s.cal_u + grid_.d1 * s.cal_v;
  Real div_h1 = h1_norm(grid_, divk);
  Real dp = l2_norm(grid_, grid_.d1 * s.cal_p);
  return triple_norm(s.cal_p, s.cal_u, s.cal_v) +
         std::pow(params_.eps, -1.0 / 7.0) * (div_h1 + dp);
}

Real ResolventWorkspace::linearized_residual(const ModeBundle& x, const CVec& fu,
                                             const CVec& fv) const {
  const int n = grid_.n;
  auto rows = apply_linearized(x);
  CVec r1 = rows[0];
  CVec r2 = rows[1] - fu;
  CVec r3 = rows[2] - fv;
  // the wall rows of the momentum equations are boundary-condition slots
  r2[0] = 0.0;
  r2[n] = 0.0;
  r3[0] = x.v[0];
  r3[n] = x.v[n];
  Real num = std::sqrt(std::pow(l2_norm(grid_, r1), 2) + std::pow(l2_norm(grid_, r2), 2) +
                       std::pow(l2_norm(grid_, r3), 2));
  Real den = std::sqrt(std::pow(l2_norm(grid_, fu), 2) + std::pow(l2_norm(grid_, fv), 2));
  return den > 0.0 ? num / den : num;
}

std::pair<ModeBundle, IterationTrace> ResolventWorkspace::solve(const Source& f,
                                                                const ResolventOptions& opt) const {
  const int P = grid_.size();
  const CVec zero = CVec::Zero(P);
  IterationTrace trace;
  ModeBundle out;
  out.rho = zero;
  out.u = zero;
  out.v = zero;

  Real fnorm = std::sqrt(std::pow(l2_norm(grid_, f.fu), 2) + std::pow(l2_norm(grid_, f.fv), 2));
  if (fnorm == 0.0) {
    trace.converged = true;
    out.record_boundary();
    return {out, trace};
  }

  CVec acc_p = zero, acc_u = zero, acc_v = zero;  // density in scaled form
  CVec cur_fu = f.fu, cur_fv = f.fv;
  if (f.smooth) {
    const CVec* d1 = (f.fu_d1.size() == P) ? &f.fu_d1 : nullptr;
    QCState qc0 = quasi_solve(f.fu, f.fv, d1);
    auto eq = e_q_error(qc0);
    acc_p += qc0.r;
    acc_u += qc0.frak_u;
    acc_v += qc0.frak_v;
    cur_fu = -eq[1];
    cur_fv = -eq[2];
  }

  StokesState s = stokes_solve(zero, cur_fu, cur_fv);
  Real e0 = stokes_e_norm(s);
  trace.e_norms.push_back(e0);
  acc_p += s.cal_p;
  acc_u += s.cal_u;
  acc_v += s.cal_v;

  int bad = 0;
  Real prev = e0;
  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    CVec s1 = -flow_.u_s1.cast<Complex>().cwiseProduct(s.cal_v);
    QCState qc = quasi_solve(s1, zero);
    auto eq = e_q_error(qc);
    s = stokes_solve(zero, -eq[1], -eq[2]);
    acc_p += qc.r + s.cal_p;
    acc_u += qc.frak_u + s.cal_u;
    acc_v += qc.frak_v + s.cal_v;
    Real e = stokes_e_norm(s);
    trace.e_norms.push_back(e);
    trace.ratios.push_back(e / prev);
    trace.iterations = iter;
    if (e < opt.tol * e0) {
      trace.converged = true;
      break;
    }
    if (e > prev) {
      if (++bad >= opt.noncontraction_patience) {
        std::ostringstream os;
        os << "resolvent iteration not contracting: last ratios";
        for (size_t i = trace.ratios.size() >= 3 ? trace.ratios.size() - 3 : 0;
             i < trace.ratios.size(); ++i)
          os << " " << trace.ratios[i];
        throw NonContraction(os.str());
      }
    } else {
      bad = 0;
    }
    prev = e;
  }

  const Real m2 = params_.mach * params_.mach;
  out.rho = (params_.mach > 0.0) ? CVec(m2 * acc_p) : acc_p;
  out.u = acc_u;
  out.v = acc_v;
  out.record_boundary();
  trace.final_residual = linearized_residual(out, f.fu, f.fv);
  return {out, trace};
}

ModeBundle ResolventWorkspace::monolithic_solve(const CVec& fu, const CVec& fv) const {
  if (!have_c_) throw SingularSystem("workspace: set_c before solving");
  const int P = grid_.size();
  const int n = grid_.n;
  CMat m = lin0_;
  for (int i = 0; i < 3 * P; ++i) m(i, i) -= kI * params_.k * c_ * shift_diag_[i];
  m.row(2 * P + 0).setZero();
  m(2 * P + 0, 2 * P + 0) = 1.0;
  m.row(2 * P + n).setZero();
  m(2 * P + n, 2 * P + n) = 1.0;
  CVec rhs = CVec::Zero(3 * P);
  rhs.segment(P, P) = fu;
  rhs.segment(2 * P, P) = fv;
  rhs[2 * P + 0] = 0.0;
  rhs[2 * P + n] = 0.0;
  CVec x = bvp_solve(m, rhs, {}, nullptr);
  ModeBundle b;
  b.rho = params_.mach * params_.mach * x.segment(0, P);
  if (params_.mach == 0.0) b.rho = x.segment(0, P);
  b.u = x.segment(P, P);
  b.v = x.segment(2 * P, P);
  b.record_boundary();
  return b;
}

ModeBundle ResolventWorkspace::monolithic_solve_pinned(const CVec& fu, const CVec& fv,
                                                       Complex u_top, Complex u_bottom) const {
  if (!have_c_) throw SingularSystem("workspace: set_c before solving");
  const int P = grid_.size();
  const int n = grid_.n;
  CMat m = lin0_;
  for (int i = 0; i < 3 * P; ++i) m(i, i) -= kI * params_.k * c_ * shift_diag_[i];
  m.row(2 * P + 0).setZero();
  m(2 * P + 0, 2 * P + 0) = 1.0;
  m.row(2 * P + n).setZero();
  m(2 * P + n, 2 * P + n) = 1.0;
  m.row(P + 0).setZero();
  m(P + 0, P + 0) = 1.0;
  m.row(P + n).setZero();
  m(P + n, P + n) = 1.0;
  CVec rhs = CVec::Zero(3 * P);
  rhs.segment(P, P) = fu;
  rhs.segment(2 * P, P) = fv;
  rhs[P + 0] = u_top;
  rhs[P + n] = u_bottom;
  rhs[2 * P + 0] = 0.0;
  rhs[2 * P + n] = 0.0;
  CVec x = bvp_solve(m, rhs, {}, nullptr);
  ModeBundle b;
  b.rho = params_.mach * params_.mach * x.segment(0, P);
  if (params_.mach == 0.0) b.rho = x.segment(0, P);
  b.u = x.segment(P, P);
  b.v = x.segment(2 * P, P);
  b.record_boundary();
  return b;
}

std::vector<CVec> ResolventWorkspace::homogeneous_modes(int count) const {
  if (!have_c_) throw SingularSystem("workspace: set_c before solving");
  const int P = grid_.size();
  const int n = grid_.n;
  CMat m = lin0_;
  for (int i = 0; i < 3 * P; ++i) m(i, i) -= kI * params_.k * c_ * shift_diag_[i];
  m.row(2 * P + 0).setZero();
  m(2 * P + 0, 2 * P + 0) = 1.0;
  m.row(2 * P + n).setZero();
  m(2 * P + n, 2 * P + n) = 1.0;
  // row equilibration keeps the growth factor in check on this stiff matrix
  Vec scale(3 * P);
  for (int i = 0; i < 3 * P; ++i) scale[i] = 1.0 / m.row(i).cwiseAbs().maxCoeff();
  CMat ms = scale.asDiagonal() * m;
  Eigen::PartialPivLU<CMat> lu(ms);

  const Real m2 = params_.mach * params_.mach;
  std::vector<CVec> raw;  // r-form iterates
  std::mt19937 gen(0x9e3779b9u);
  std::uniform_real_distribution<Real> unif(-1.0, 1.0);
  for (int v = 0; v < count; ++v) {
    CVec x(3 * P);
    for (int i = 0; i < 3 * P; ++i) x[i] = Complex(unif(gen), unif(gen));
    CVec best = x;
    Real best_res = std::numeric_limits<Real>::infinity();
    for (int it = 0; it < 4; ++it) {
      x = lu.solve(scale.asDiagonal() * x);
      for (const CVec& b : raw) x -= b.dot(x) * b;
      x /= x.norm();
      Real res = (ms * x).norm();
      if (res < best_res) {
        best_res = res;
        best = x;
      }
    }
    raw.push_back(best);
  }
  // convert the scaled density slot to the bundle convention, re-orthonormalize
  std::vector<CVec> basis;
  for (CVec x : raw) {
    if (params_.mach > 0.0) x.head(P) *= m2;
    for (const CVec& b : basis) x -= b.dot(x) * b;
    x /= x.norm();
    basis.push_back(x);
  }
  return basis;
}

CVec ResolventWorkspace::stack_bundle(const ModeBundle& b) {
  const long P = b.rho.size();
  CVec x(3 * P);
  x.segment(0, P) = b.rho;
  x.segment(P, P) = b.u;
  x.segment(2 * P, P) = b.v;
  return x;
}

CVec ResolventWorkspace::project_out(const CVec& x, const std::vector<CVec>& basis) {
  CVec y = x;
  for (const CVec& b : basis) y -= b.dot(y) * b;
  return y;
}

QCState quasi_solve(const CVec& s1, const CVec& s2, Complex c, const Params& params,
                    const BaseFlow& flow, const ChebGrid& grid) {
  ResolventWorkspace ws(grid, flow, params);
  ws.set_c(c);
  return ws.quasi_solve(s1, s2);
}

StokesState stokes_solve(const CVec& q0, const CVec& q1, const CVec& q2, Complex c,
                         const Params& params, const BaseFlow& flow, const ChebGrid& grid) {
  ResolventWorkspace ws(grid, flow, params);
  ws.set_c(c);
  return ws.stokes_solve(q0, q1, q2);
}

std::pair<ModeBundle, IterationTrace> resolvent_solve(const CVec& f_u, const CVec& f_v, Complex c,
                                                      const Params& params, const BaseFlow& flow,
                                                      const ChebGrid& grid, Real tol,
                                                      int max_iter) {
  ResolventWorkspace ws(grid, flow, params);
  ws.set_c(c);
  Source f;
  f.fu = f_u;
  f.fv = f_v;
  ResolventOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  return ws.solve(f, opt);
}

}  // namespace chanstab
