#include "chanstab/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "chanstab/errors.hpp"

namespace chanstab {
namespace {

// Reduced standard eigenproblem M x = (ikc) x for the linearized system with
// no-slip walls: u and v wall unknowns and the replaced wall momentum rows
// are eliminated. Density stays unscaled (true rho), which requires mach > 0.
CMat eig_matrix(const Params& p, const BaseFlow& flow, const ChebGrid& g,
                std::vector<int>* keep_out) {
  if (!(p.mach > 0.0))
    throw ConfigError("direct spectrum requires mach > 0 (the incompressible limit "
                      "is reachable only through the dispersion pipeline)");
  const int P = g.size();
  const int n = g.n;
  const Real k = p.k, eps = p.eps, lam = p.lambda;
  const Real m2inv = 1.0 / (p.mach * p.mach);
  const Complex ik = kI * k;

  CMat a = CMat::Zero(3 * P, 3 * P);
  for (int j = 0; j < P; ++j) {
    const Real us = flow.u_s[j], us1 = flow.u_s1[j], us2 = flow.u_s2[j];
    a(j, j) += ik * us;
    a(j, P + j) += ik;
    a.row(j).segment(2 * P, P) += g.d1.row(j).cast<Complex>();

    a.row(P + j).segment(P, P) += (-eps) * g.d2.row(j).cast<Complex>();
    a(P + j, P + j) += eps * k * k + lam * eps * k * k + ik * us;
    a.row(P + j).segment(2 * P, P) += (-lam * ik * eps) * g.d1.row(j).cast<Complex>();
    a(P + j, 2 * P + j) += us1;
    a(P + j, j) += ik * m2inv + eps * us2;

    a.row(2 * P + j).segment(2 * P, P) += (-(1.0 + lam) * eps) * g.d2.row(j).cast<Complex>();
    a(2 * P + j, 2 * P + j) += eps * k * k + ik * us;
    a.row(2 * P + j).segment(P, P) += (-lam * ik * eps) * g.d1.row(j).cast<Complex>();
    a.row(2 * P + j).segment(0, P) += m2inv * g.d1.row(j).cast<Complex>();
  }

  std::vector<int> drop = {P + 0, P + n, 2 * P + 0, 2 * P + n};
  std::vector<int> keep;
  keep.reserve(3 * P - 4);
  for (int i = 0; i < 3 * P; ++i)
    if (std::find(drop.begin(), drop.end(), i) == drop.end()) keep.push_back(i);
  CMat red(keep.size(), keep.size());
  for (size_t r = 0; r < keep.size(); ++r)
    for (size_t c = 0; c < keep.size(); ++c) red(r, c) = a(keep[r], keep[c]);
  if (keep_out) *keep_out = keep;
  return red;
}

std::vector<Complex> eigenvalues_of(const Params& p, const BaseFlow& flow, const ChebGrid& g) {
  CMat m = eig_matrix(p, flow, g, nullptr);
  Eigen::ComplexEigenSolver<CMat> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw SingularSystem("eigen solve failed");
  const Complex ik = kI * p.k;
  std::vector<Complex> out;
  out.reserve(m.rows());
  for (int i = 0; i < m.rows(); ++i) out.push_back(es.eigenvalues()[i] / ik);
  return out;
}

}  // namespace

std::vector<Complex> direct_eigenvalues(const Params& params, const BaseFlow& flow,
                                        const ChebGrid& grid) {
  return eigenvalues_of(params, flow, grid);
}

Spectrum direct_spectrum(const Params& params, const BaseFlow& flow, const ChebGrid& grid,
                         Complex window_center, Real window_radius) {
  const int P = grid.size();
  const int n = grid.n;
  std::vector<int> keep;
  CMat m = eig_matrix(params, flow, grid, &keep);
  Eigen::ComplexEigenSolver<CMat> es(m, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) throw SingularSystem("eigen solve failed");
  const Complex ik = kI * params.k;

  std::vector<int> in_window;
  for (int i = 0; i < m.rows(); ++i) {
    Complex c = es.eigenvalues()[i] / ik;
    if (std::abs(c - window_center) <= window_radius) in_window.push_back(i);
  }
  if (in_window.empty()) throw NoEigenvalueInWindow("no eigenvalue inside the requested window");

  // refinement pass on a grid 1.5x finer
  int n2 = (3 * n) / 2;
  ChebGrid g2 = cheb_grid(n2);
  BaseFlow flow2 = sample_profile(g2, flow.profile);
  Params p2 = params;
  std::vector<Complex> refined = eigenvalues_of(p2, flow2, g2);

  Spectrum spec;
  spec.n_used = n;
  spec.n_refined = n2;
  for (int idx : in_window) {
    Complex c = es.eigenvalues()[idx] / ik;
    Real best = std::numeric_limits<Real>::infinity();
    for (const Complex& c2 : refined) best = std::min(best, std::abs(c - c2));
    Real drift = best / (1.0 + std::abs(c));
    bool phys = drift < 1e-6;

    ModeBundle b;
    b.rho = CVec::Zero(P);
    b.u = CVec::Zero(P);
    b.v = CVec::Zero(P);
    for (size_t r = 0; r < keep.size(); ++r) {
      int full = keep[r];
      Complex val = es.eigenvectors()(r, idx);
      if (full < P)
        b.rho[full] = val;
      else if (full < 2 * P)
        b.u[full - P] = val;
      else
        b.v[full - 2 * P] = val;
    }
    b.record_boundary();
    spec.eigenvalues.push_back(c);
    spec.eigenvectors.push_back(std::move(b));
    spec.physical.push_back(phys);
    spec.drift.push_back(drift);
  }
  // order by distance from the window center
  std::vector<size_t> order(spec.eigenvalues.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::abs(spec.eigenvalues[a] - window_center) <
           std::abs(spec.eigenvalues[b] - window_center);
  });
  Spectrum sorted;
  sorted.n_used = spec.n_used;
  sorted.n_refined = spec.n_refined;
  for (size_t i : order) {
    sorted.eigenvalues.push_back(spec.eigenvalues[i]);
    sorted.eigenvectors.push_back(std::move(spec.eigenvectors[i]));
    sorted.physical.push_back(spec.physical[i]);
    sorted.drift.push_back(spec.drift[i]);
  }
  bool any_physical = false;
  for (bool f : sorted.physical) any_physical = any_physical || f;
  if (!any_physical)
    throw ResolutionFailure("no windowed eigenvalue passed the refinement test");
  return sorted;
}

}  // namespace chanstab
