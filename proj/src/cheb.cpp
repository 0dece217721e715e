#include "chanstab/cheb.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace chanstab {

namespace {

// Half the DCT-I of x via an even extension and one complex FFT:
// out_k = sum''_j x_j cos(pi j k / n), j,k = 0..n.
CVec half_dct1_fft(const CVec& x) {
  const int n = static_cast<int>(x.size()) - 1;
  std::vector<Complex> w(2 * n);
  for (int j = 0; j <= n; ++j) w[j] = x[j];
  for (int j = 1; j < n; ++j) w[2 * n - j] = x[j];
  Eigen::FFT<Real> fft;
  std::vector<Complex> f;
  fft.fwd(f, w);
  CVec out(n + 1);
  for (int k = 0; k <= n; ++k) out[k] = 0.5 * f[k];
  return out;
}

constexpr int kFftThreshold = 512;

}  // namespace

ChebGrid cheb_grid(int n) {
  if (n < 4) throw std::invalid_argument("cheb_grid: need n >= 4");
  ChebGrid g;
  g.n = n;
  g.nodes = Vec(n + 1);
  for (int j = 0; j <= n; ++j) g.nodes[j] = std::cos(kPi * j / n);
  g.nodes[0] = 1.0;
  g.nodes[n] = -1.0;
  if (n % 2 == 0) g.nodes[n / 2] = 0.0;

  // First differentiation matrix with the negative-sum trick on the diagonal.
  Mat& d = g.d1;
  d = Mat::Zero(n + 1, n + 1);
  auto c = [n](int i) { return (i == 0 || i == n) ? 2.0 : 1.0; };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = (c(i) / c(j)) * sign / (g.nodes[i] - g.nodes[j]);
    }
    d(i, i) = -d.row(i).sum();
  }
  g.d2 = g.d1 * g.d1;
  g.d3 = g.d2 * g.d1;
  g.d4 = g.d2 * g.d2;

  // Clenshaw-Curtis weights for the CGL nodes.
  g.cc_weights = Vec::Zero(n + 1);
  const int nhalf = n / 2;
  for (int j = 0; j <= n; ++j) {
    double theta = kPi * j / n;
    double s = 0.0;
    for (int m = 1; m <= nhalf; ++m) {
      double b = (2 * m == n) ? 1.0 : 2.0;
      s += b / (4.0 * m * m - 1.0) * std::cos(2.0 * m * theta);
    }
    double w = 1.0 - s;
    double scale = 2.0 / n;
    if (j == 0 || j == n) scale = 1.0 / n;
    g.cc_weights[j] = scale * w;
  }
  return g;
}

Complex integrate(const ChebGrid& grid, const CVec& f) {
  Complex s = 0.0;
  for (int j = 0; j < grid.size(); ++j) s += grid.cc_weights[j] * f[j];
  return s;
}

Real integrate(const ChebGrid& grid, const Vec& f) {
  return grid.cc_weights.dot(f);
}

Real l2_norm(const ChebGrid& grid, const CVec& f) {
  Real s = 0.0;
  for (int j = 0; j < grid.size(); ++j) s += grid.cc_weights[j] * std::norm(f[j]);
  return std::sqrt(s);
}

Real h1_norm(const ChebGrid& grid, const CVec& f) {
  CVec df = grid.d1 * f;
  Real a = l2_norm(grid, f), b = l2_norm(grid, df);
  return std::sqrt(a * a + b * b);
}

CVec cheb_coeffs(const CVec& values) {
  const int n = static_cast<int>(values.size()) - 1;
  if (n < 1) return values;
  if (n >= kFftThreshold) {
    CVec s = half_dct1_fft(values);
    CVec a(n + 1);
    for (int k = 0; k <= n; ++k) {
      double ck = (k == 0 || k == n) ? 2.0 : 1.0;
      a[k] = s[k] * (2.0 / (n * ck));
    }
    return a;
  }
  CVec a(n + 1);
  // DCT-I, direct evaluation with a shared cosine table.
  Vec cost(2 * n);
  for (int i = 0; i < 2 * n; ++i) cost[i] = std::cos(kPi * i / n);
  for (int k = 0; k <= n; ++k) {
    Complex s = 0.5 * (values[0] + ((k % 2 == 0) ? values[n] : -values[n]));
    for (int j = 1; j < n; ++j) s += values[j] * cost[(static_cast<long>(k) * j) % (2 * n)];
    double ck = (k == 0 || k == n) ? 2.0 : 1.0;
    a[k] = s * (2.0 / (n * ck));
  }
  return a;
}

CVec cheb_values(const CVec& coeffs) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n >= kFftThreshold) {
    CVec x = coeffs;
    x[0] *= 2.0;
    x[n] *= 2.0;
    return half_dct1_fft(x);
  }
  CVec v(n + 1);
  Vec cost(2 * n);
  for (int i = 0; i < 2 * n; ++i) cost[i] = std::cos(kPi * i / n);
  for (int j = 0; j <= n; ++j) {
    Complex s = coeffs[0];
    for (int k = 1; k <= n; ++k) s += coeffs[k] * cost[(static_cast<long>(k) * j) % (2 * n)];
    v[j] = s;
  }
  return v;
}

CVec cheb_antiderivative(const CVec& a) {
  const int n = static_cast<int>(a.size()) - 1;
  CVec b = CVec::Zero(n + 2);
  auto coef = [&](int k) -> Complex { return (k <= n) ? a[k] : Complex(0.0); };
  b[1] = a[0] - coef(2) / 2.0;
  for (int k = 2; k <= n + 1; ++k) b[k] = (coef(k - 1) - coef(k + 1)) / (2.0 * k);
  return b;
}

Complex cheb_eval(const CVec& coeffs, Real y) {
  // Clenshaw recurrence.
  const int n = static_cast<int>(coeffs.size()) - 1;
  Complex b1 = 0.0, b2 = 0.0;
  for (int k = n; k >= 1; --k) {
    Complex b0 = coeffs[k] + 2.0 * y * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs[0] + y * b1 - b2;
}

CVec cheb_eval_many(const CVec& coeffs, const Vec& y) {
  CVec out(y.size());
  for (int i = 0; i < y.size(); ++i) out[i] = cheb_eval(coeffs, y[i]);
  return out;
}

CVec cheb_fit(int n, const std::function<Complex(Real)>& f) {
  CVec v(n + 1);
  for (int j = 0; j <= n; ++j) {
    double y = std::cos(kPi * j / n);
    if (j == 0) y = 1.0;
    if (j == n) y = -1.0;
    v[j] = f(y);
  }
  return cheb_coeffs(v);
}

CVec cheb_cumulative(const CVec& coeffs, Real y0) {
  CVec b = cheb_antiderivative(coeffs);
  b[0] = -cheb_eval(b, y0);
  return b;
}

}  // namespace chanstab
