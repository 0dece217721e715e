#ifndef CHANSTAB_TESTS_TEST_UTIL_HPP_
#define CHANSTAB_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "chanstab/types.hpp"

namespace chanstab::testutil {

// Least-squares slope of y against x.
inline Real slope_fit(const std::vector<Real>& x, const std::vector<Real>& y) {
  const int n = static_cast<int>(x.size());
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Composite Simpson rule for a complex line integral along the straight
// segment from a to b.
inline Complex simpson_segment(const std::function<Complex(Complex)>& f, Complex a, Complex b,
                               int n) {
  if (n % 2 == 1) ++n;
  const Complex h = (b - a) / static_cast<Real>(n);
  Complex s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + static_cast<Real>(i) * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline std::mt19937& rng() {
  static std::mt19937 gen(0x5eed1234u);
  return gen;
}

inline CVec random_smooth_field(const Vec& nodes, int modes, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<Real> unif(-1.0, 1.0);
  CVec out = CVec::Zero(nodes.size());
  for (int m = 0; m < modes; ++m) {
    Complex amp(unif(gen), unif(gen));
    Real freq = 0.5 * m;
    Real phase = unif(gen);
    for (int j = 0; j < nodes.size(); ++j)
      out[j] += amp * std::cos(freq * nodes[j] + phase) / (1.0 + m * m);
  }
  return out;
}

}  // namespace chanstab::testutil

#endif  // CHANSTAB_TESTS_TEST_UTIL_HPP_
