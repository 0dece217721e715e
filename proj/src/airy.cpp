#include "chanstab/airy.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "chanstab/errors.hpp"

namespace chanstab {
namespace {

// Minimal quad-precision complex arithmetic for the Maclaurin sums. The
// series suffers cancellation of order exp((4/3)|z|^{3/2}); double loses
// all accuracy near |z| = 6 while __float128 carries the sums to |z| ~ 9.
struct QC {
  __float128 re, im;
};

inline QC qc(Complex z) { return {static_cast<__float128>(z.real()), static_cast<__float128>(z.imag())}; }
inline QC mul(QC a, QC b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
inline QC mul(QC a, __float128 s) { return {a.re * s, a.im * s}; }
inline QC add(QC a, QC b) { return {a.re + b.re, a.im + b.im}; }
inline Complex to_complex(QC a) { return {static_cast<double>(a.re), static_cast<double>(a.im)}; }
inline double abs2d(QC a) {
  double x = static_cast<double>(a.re), y = static_cast<double>(a.im);
  return x * x + y * y;
}

constexpr double kC1Hi = 0.3550280538878172;    // Ai(0)
constexpr double kC1Lo = 2.05233632436212e-17;
constexpr double kC2Hi = 0.2588194037928068;    // -Ai'(0)
constexpr double kC2Lo = -2.522243111610832e-17;
constexpr double kInv2SqrtPi = 0.28209479177387814;
constexpr double kInv2SqrtPiLo = 3.83386490329147e-18;

// Coefficient tables of the asymptotic series: Ai and its two primitives as
//   Ai(z)   =  z^{-1/4} e^{-zeta} S_a(1/zeta) / (2 sqrt(pi))
//   Ai(1,z) = -z^{-3/4} e^{-zeta} S_p(1/zeta) / (2 sqrt(pi))
//   Ai(2,z) =  z^{-5/4} e^{-zeta} S_q(1/zeta) / (2 sqrt(pi))
// with zeta = (2/3) z^{3/2}. S_p, S_q follow from termwise integration of
// S_a against the incomplete-gamma tails.
constexpr int kAsyTerms = 26;
struct AsyTables {
  std::array<double, kAsyTerms> a, p, q;
  AsyTables() {
    std::array<double, kAsyTerms> u{};
    u[0] = 1.0;
    for (int k = 0; k + 1 < kAsyTerms; ++k)
      u[k + 1] = u[k] * (6.0 * k + 5.0) * (6.0 * k + 1.0) / (72.0 * (k + 1.0));
    for (int k = 0; k < kAsyTerms; ++k) a[k] = (k % 2 == 0 ? 1.0 : -1.0) * u[k];
    auto fall = [](double x, int j) {
      double r = 1.0;
      for (int i = 1; i <= j; ++i) r *= (x - i);
      return r;
    };
    for (int m = 0; m < kAsyTerms; ++m) {
      double pm = 0.0;
      for (int k = 0; k <= m; ++k) pm += a[k] * fall(0.5 - k, m - k);
      p[m] = pm;
    }
    for (int m = 0; m < kAsyTerms; ++m) {
      double qm = 0.0;
      for (int k = 0; k <= m; ++k) qm += p[k] * fall(1.0 / 6.0 - k, m - k);
      q[m] = qm;
    }
  }
};
const AsyTables kTables;

// Sum of coef[k] w^k truncated at the smallest term (asymptotic series).
Complex asy_sum(const std::array<double, kAsyTerms>& coef, Complex w) {
  Complex sum = coef[0];
  Complex wk = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < kAsyTerms; ++k) {
    wk *= w;
    Complex term = coef[k] * wk;
    double mag = std::abs(term);
    if (mag > prev) break;
    sum += term;
    prev = mag;
  }
  return sum;
}

}  // namespace

namespace detail {

AiryTriple airy_series(Complex z) {
  const QC zq = qc(z);
  const QC z2 = mul(zq, zq);
  const QC z3 = mul(z2, zq);

  // f = sum cf_j z^{3j}, g = sum cg_j z^{3j+1}, plus their first and second
  // antiderivatives accumulated termwise.
  QC sf{1.0, 0.0}, sg = zq;
  QC sF = zq, sG = mul(z2, __float128(0.5));
  QC sFF = mul(z2, __float128(0.5)), sGG = mul(z3, __float128(1.0) / 6);

  __float128 cf = 1.0, cg = 1.0;
  QC pf{1.0, 0.0};  // z^{3j}
  QC pg = zq;       // z^{3j+1}
  double floor_sq = 0.0;
  for (int j = 1; j <= 400; ++j) {
    cf /= static_cast<__float128>(3 * j) * (3 * j - 1);
    cg /= static_cast<__float128>(3 * j + 1) * (3 * j);
    pf = mul(pf, z3);
    pg = mul(pg, z3);
    const QC tf = mul(pf, cf);
    const QC tg = mul(pg, cg);
    sf = add(sf, tf);
    sg = add(sg, tg);
    const QC tF = mul(mul(tf, zq), __float128(1.0) / (3 * j + 1));
    const QC tG = mul(mul(tg, zq), __float128(1.0) / (3 * j + 2));
    sF = add(sF, tF);
    sG = add(sG, tG);
    sFF = add(sFF, mul(mul(tf, z2), __float128(1.0) / ((3 * j + 1) * (3 * j + 2))));
    sGG = add(sGG, mul(mul(tg, z2), __float128(1.0) / ((3 * j + 2) * (3 * j + 3))));
    double t = std::max(abs2d(tf), abs2d(tg));
    floor_sq = std::max({abs2d(sf), abs2d(sg), 1.0});
    if (t < floor_sq * 1e-76) break;
  }

  const __float128 c1 = static_cast<__float128>(kC1Hi) + static_cast<__float128>(kC1Lo);
  const __float128 c2 = static_cast<__float128>(kC2Hi) + static_cast<__float128>(kC2Lo);
  const __float128 third = static_cast<__float128>(1.0) / 3;

  AiryTriple out;
  out.ai = to_complex(add(mul(sf, c1), mul(sg, -c2)));
  // Ai(1,0) = -1/3, Ai(2,0) = -Ai'(0).
  QC ai1 = add(mul(sF, c1), mul(sG, -c2));
  ai1.re -= third;
  out.ai1 = to_complex(ai1);
  QC ai2 = add(mul(sFF, c1), mul(sGG, -c2));
  ai2.re += c2;
  ai2 = add(ai2, mul(zq, -third));
  out.ai2 = to_complex(ai2);
  return out;
}

ScaledAiry airy_asymptotic(Complex z) {
  const Complex zsqrt = std::sqrt(z);  // principal branch
  const Complex zeta = (2.0 / 3.0) * z * zsqrt;
  const Complex w = 1.0 / zeta;

  const Complex sa = asy_sum(kTables.a, w);
  const Complex sp = asy_sum(kTables.p, w);
  const Complex sq = asy_sum(kTables.q, w);

  const double c = kInv2SqrtPi + kInv2SqrtPiLo;
  const Complex zm14 = 1.0 / std::sqrt(zsqrt);  // z^{-1/4}
  const Complex zm34 = zm14 / zsqrt;            // z^{-3/4}
  const Complex zm54 = zm14 / z;                // z^{-5/4}

  ScaledAiry out;
  out.log_scale = -zeta.real();
  const Complex phase = std::polar(1.0, -zeta.imag());
  out.ai = c * zm14 * sa * phase;
  out.ai1 = -c * zm34 * sp * phase;
  out.ai2 = c * zm54 * sq * phase;
  return out;
}

}  // namespace detail

ScaledAiry airy_scaled(Complex z) {
  if (std::abs(z) <= detail::kSeriesRadius) {
    AiryTriple t = detail::airy_series(z);
    return {t.ai, t.ai1, t.ai2, 0.0};
  }
  return detail::airy_asymptotic(z);
}

Complex airy_ai(Complex z) {
  ScaledAiry s = airy_scaled(z);
  return s.ai * std::exp(s.log_scale);
}

AiryTriple airy_primitives(Complex z) {
  ScaledAiry s = airy_scaled(z);
  const Real e = std::exp(s.log_scale);
  return {s.ai * e, s.ai1 * e, s.ai2 * e};
}

Complex airy_ratio(Complex z) {
  if (std::abs(z) > detail::kSeriesRadius) {
    // The exponential factors cancel exactly; no scaling needed.
    const Complex zsqrt = std::sqrt(z);
    const Complex w = 1.0 / ((2.0 / 3.0) * z * zsqrt);
    return -zsqrt * asy_sum(kTables.p, w) / asy_sum(kTables.q, w);
  }
  AiryTriple t = detail::airy_series(z);
  if (std::abs(t.ai2) < 1e-300) {
    std::ostringstream os;
    os << "airy_ratio: |Ai(2,z)| = " << std::abs(t.ai2) << " below guard at z = (" << z.real()
       << "," << z.imag() << ")";
    throw DivisionByZeroNear(os.str());
  }
  return t.ai1 / t.ai2;
}

}  // namespace chanstab
