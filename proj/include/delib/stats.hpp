#ifndef DELIB_STATS_HPP_
#define DELIB_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "delib/error.hpp"

namespace delib::stats {

enum class TestMethod { ks, welch_t, one_sample_t };

constexpr std::string_view to_string(TestMethod m) {
  switch (m) {
    case TestMethod::ks: return "ks";
    case TestMethod::welch_t: return "welch_t";
    case TestMethod::one_sample_t: return "one_sample_t";
  }
  return "ks";
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  TestMethod method = TestMethod::ks;
  std::optional<double> df;  // t-tests only

  bool operator==(const TestResult &) const = default;
};

struct EffectSize {
  double d = 0.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double pooled_sd = 0.0;

  bool operator==(const EffectSize &) const = default;
};

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Unbiased (n-1) sample variance.
inline double sample_variance(std::span<const double> x) {
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

// ---------------------------------------------------------------------------
// Special functions

namespace detail {

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b).
inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_cf(a, b, x) / a;
  return 1.0 - front * detail::beta_cf(b, a, 1.0 - x) / b;
}

/// Two-sided tail probability P(|T| >= |t|) for Student's t with df degrees
/// of freedom.
inline double student_t_two_sided(double t, double df) {
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  const double x = df / (df + t * t);
  return std::clamp(incomplete_beta(df / 2.0, 0.5, x), 0.0, 1.0);
}

/// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2),
/// truncated once terms drop below 1e-10.
inline double kolmogorov_q(double lambda) {
  if (lambda <= 0.0) return 1.0;
  // The alternating series converges too slowly near zero; Q is 1 to double
  // precision there.
  if (lambda < 0.18) return 1.0;
  double sum = 0.0;
  const double l2 = -2.0 * lambda * lambda;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(l2 * k * k);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-10) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Tests

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value. The
/// approximation is coarse when n_a*n_b/(n_a+n_b) < 8.
inline TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::EmptySample, "ks_two_sample needs non-empty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double dmax = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    dmax = std::max(dmax, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  TestResult r;
  r.method = TestMethod::ks;
  r.n_a = x.size();
  r.n_b = y.size();
  r.statistic = dmax;
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * dmax);
  return r;
}

/// Welch's unequal-variance t-test, two-sided. Both samples constant: equal
/// means give t = 0, p = 1; unequal means give t = +/-inf, p = 0.
inline TestResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorCode::SampleTooSmall, "welch_t needs >= 2 values per sample");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double ma = mean(a), mb = mean(b);
  const double va = sample_variance(a) / na, vb = sample_variance(b) / nb;
  TestResult r;
  r.method = TestMethod::welch_t;
  r.n_a = a.size();
  r.n_b = b.size();
  const double se2 = va + vb;
  if (se2 == 0.0) {
    r.df = na + nb - 2.0;
    if (ma == mb) {
      r.statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.statistic = ma > mb ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.statistic = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_value = student_t_two_sided(r.statistic, *r.df);
  return r;
}

/// One-sample t-test of mean(x) against zero; used for paired differences.
inline TestResult one_sample_t(std::span<const double> x) {
  if (x.size() < 2) throw Error(ErrorCode::SampleTooSmall, "one_sample_t needs >= 2 values");
  const double n = static_cast<double>(x.size());
  const double m = mean(x);
  const double v = sample_variance(x);
  TestResult r;
  r.method = TestMethod::one_sample_t;
  r.n_a = x.size();
  r.n_b = x.size();
  r.df = n - 1.0;
  if (v == 0.0) {
    if (m == 0.0) {
      r.statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.statistic = m > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.statistic = m / std::sqrt(v / n);
  r.p_value = student_t_two_sided(r.statistic, *r.df);
  return r;
}

/// Cohen's d with pooled standard deviation.
inline EffectSize cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorCode::SampleTooSmall, "cohens_d needs >= 2 values per sample");
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  EffectSize e;
  e.mean_a = mean(a);
  e.mean_b = mean(b);
  e.pooled_sd = std::sqrt(((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0));
  if (e.pooled_sd == 0.0) {
    if (e.mean_a != e.mean_b)
      throw Error(ErrorCode::DegenerateVariance, "pooled sd is 0 but means differ");
    e.d = 0.0;
    return e;
  }
  e.d = (e.mean_a - e.mean_b) / e.pooled_sd;
  return e;
}

/// Least-squares slope of y on x.
inline double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw Error(ErrorCode::PreconditionViolation, "ols_slope needs equal lengths >= 2");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw Error(ErrorCode::DegenerateX, "all x values are equal");
  return sxy / sxx;
}

}  // namespace delib::stats

#endif  // DELIB_STATS_HPP_
