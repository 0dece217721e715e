#ifndef CHANSTAB_CHEB_HPP_
#define CHANSTAB_CHEB_HPP_

#include <functional>

#include "chanstab/types.hpp"

namespace chanstab {

// Chebyshev-Gauss-Lobatto collocation data on [-1,1].
// Nodes are y_j = cos(j pi / n), j = 0..n, so y_0 = 1 and y_n = -1.
struct ChebGrid {
  int n = 0;  // polynomial degree; n+1 nodes
  Vec nodes;
  Mat d1, d2, d3, d4;
  Vec cc_weights;  // Clenshaw-Curtis quadrature weights

  int size() const { return n + 1; }
  int bottom() const { return n; }  // index of y = -1
  int top() const { return 0; }     // index of y = +1
};

ChebGrid cheb_grid(int n);

// Clenshaw-Curtis quadrature of samples on the grid nodes.
Complex integrate(const ChebGrid& grid, const CVec& f);
Real integrate(const ChebGrid& grid, const Vec& f);

Real l2_norm(const ChebGrid& grid, const CVec& f);
Real h1_norm(const ChebGrid& grid, const CVec& f);

// --- Chebyshev series utilities (node count independent of any ChebGrid) ---

// Coefficients a_k of sum a_k T_k(y) interpolating values at CGL nodes
// cos(j pi / n), j = 0..n, in that (descending) order.
CVec cheb_coeffs(const CVec& values);
CVec cheb_values(const CVec& coeffs);

// Coefficients of an antiderivative (the T_0 coefficient is left as 0).
CVec cheb_antiderivative(const CVec& coeffs);

Complex cheb_eval(const CVec& coeffs, Real y);
CVec cheb_eval_many(const CVec& coeffs, const Vec& y);

// Interpolate f on a degree-n CGL grid and return the series coefficients.
CVec cheb_fit(int n, const std::function<Complex(Real)>& f);

// Series of F(y) = int_{y0}^{y} f, built from the series of f.
CVec cheb_cumulative(const CVec& coeffs, Real y0);

}  // namespace chanstab

#endif  // CHANSTAB_CHEB_HPP_
