#ifndef DELIB_EVOLUTION_HPP_
#define DELIB_EVOLUTION_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "delib/csv.hpp"
#include "delib/error.hpp"
#include "delib/vector_ops.hpp"

namespace delib {

struct EvolutionParams {
  std::size_t w_min = 2;
  std::size_t w_max = 50;
  std::size_t min_arguments = 3;

  void validate() const {
    if (!(1 < w_min && w_min <= w_max))
      throw Error(ErrorCode::InvalidConfig, "evolution bounds must satisfy 1 < w_min <= w_max");
  }

  bool operator==(const EvolutionParams &) const = default;
};

struct EvolutionSeries {
  std::size_t n = 0;
  std::size_t w = 0;
  std::vector<std::size_t> positions;
  std::vector<double> raw;
  std::vector<double> smoothed;
  double slope = 0.0;
  double volatility = 0.0;
  std::array<double, 3> phase_volatility{0.0, 0.0, 0.0};
  std::vector<std::string> warnings;

  bool operator==(const EvolutionSeries &) const = default;
};

/// clamp(floor(sqrt(n)), w_min, w_max).
inline std::size_t adaptive_window_size(std::size_t n, const EvolutionParams &params = {}) {
  params.validate();
  if (n < params.min_arguments)
    throw Error(ErrorCode::TooFewArguments,
                std::to_string(n) + " < " + std::to_string(params.min_arguments));
  auto w = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (w * w > n) --w;
  while ((w + 1) * (w + 1) <= n) ++w;
  return std::clamp(w, params.w_min, params.w_max);
}

/// s_0 = x_0, s_t = a*x_t + (1-a)*s_{t-1} with a = 2/(span+1).
inline std::vector<double> ewma(std::span<const double> x, std::size_t span) {
  std::vector<double> s;
  if (x.empty()) return s;
  const double a = 2.0 / (static_cast<double>(span) + 1.0);
  s.reserve(x.size());
  s.push_back(x[0]);
  for (std::size_t t = 1; t < x.size(); ++t) s.push_back(a * x[t] + (1.0 - a) * s.back());
  return s;
}

/// OLS slope of y against t_i = i/(m-1).
inline double normalized_time_slope(std::span<const double> y) {
  const std::size_t m = y.size();
  if (m < 2) throw Error(ErrorCode::DegenerateSeries, "series length < 2");
  const double denom = static_cast<double>(m - 1);
  double tbar = 0.5, ybar = 0.0;
  for (double v : y) ybar += v;
  ybar /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double t = static_cast<double>(i) / denom - tbar;
    sxy += t * (y[i] - ybar);
    sxx += t * t;
  }
  return sxy / sxx;
}

inline double trend_slope(const EvolutionSeries &series) {
  return normalized_time_slope(series.smoothed);
}

/// Sample standard deviation (n-1) of first differences. Fewer than two
/// differences give 0.
inline double difference_volatility(std::span<const double> y) {
  if (y.size() < 3) return 0.0;
  const std::size_t k = y.size() - 1;
  double mean = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) mean += y[i] - y[i - 1];
  mean /= static_cast<double>(k);
  double ss = 0.0;
  for (std::size_t i = 1; i < y.size(); ++i) {
    double d = y[i] - y[i - 1] - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(k - 1));
}

struct VolatilityResult {
  double overall = 0.0;
  std::array<double, 3> phases{0.0, 0.0, 0.0};
  std::vector<std::string> warnings;
};

/// Overall difference volatility plus per-phase volatility over three
/// contiguous segments of sizes floor(m/3), floor(m/3), remainder.
inline VolatilityResult volatility(std::span<const double> smoothed) {
  const std::size_t m = smoothed.size();
  if (m < 4) throw Error(ErrorCode::DegenerateSeries, "volatility needs at least 4 points");
  VolatilityResult r;
  r.overall = difference_volatility(smoothed);
  const std::size_t third = m / 3;
  const std::array<std::size_t, 4> cut{0, third, 2 * third, m};
  for (std::size_t p = 0; p < 3; ++p) {
    auto seg = smoothed.subspan(cut[p], cut[p + 1] - cut[p]);
    if (seg.size() < 2) r.warnings.push_back("phase " + std::to_string(p + 1) + " has fewer than 2 points");
    r.phases[p] = difference_volatility(seg);
  }
  return r;
}

inline VolatilityResult volatility(const EvolutionSeries &series) { return volatility(series.smoothed); }

/// Adaptive sliding-window coherence series. For each window start i the
/// value is the mean cosine distance of the window's members to the
/// window's own mean vector; the series is then EWMA-smoothed with span w.
/// Slope and volatility are filled in when the series is long enough,
/// otherwise left at 0 with a warning.
inline EvolutionSeries evolution_series(std::span<const Embedding> e, const EvolutionParams &params = {}) {
  EvolutionSeries s;
  s.n = e.size();
  s.w = adaptive_window_size(s.n, params);
  const auto dim = e.front().size();
  for (const auto &v : e)
    if (v.size() != dim)
      throw Error(ErrorCode::DimensionMismatch, std::to_string(dim) + " vs " + std::to_string(v.size()));

  const std::size_t w = s.w;
  if (s.n < w) {
    s.warnings.push_back("fewer arguments than the minimum window: series is empty");
    return s;
  }
  const std::size_t m = s.n - w + 1;
  s.positions.reserve(m);
  s.raw.reserve(m);
  Embedding center(dim);
  for (std::size_t i = 0; i < m; ++i) {
    s.positions.push_back(i);
    // a window of one repeated vector has no spread; skip the rounding in its mean
    if (std::all_of(e.begin() + i + 1, e.begin() + i + w, [&](const Embedding &v) { return v == e[i]; })) {
      s.raw.push_back(0.0);
      continue;
    }
    std::fill(center.begin(), center.end(), 0.0);
    for (std::size_t j = i; j < i + w; ++j)
      for (std::size_t d = 0; d < dim; ++d) center[d] += e[j][d];
    for (auto &x : center) x /= static_cast<double>(w);
    double total = 0.0;
    for (std::size_t j = i; j < i + w; ++j) total += cosine_distance(e[j], center);
    s.raw.push_back(total / static_cast<double>(w));
  }
  s.smoothed = ewma(s.raw, w);

  if (m >= 2) s.slope = normalized_time_slope(s.smoothed);
  else s.warnings.push_back("series shorter than 2 points: slope set to 0");
  if (m >= 4) {
    auto v = volatility(s.smoothed);
    s.volatility = v.overall;
    s.phase_volatility = v.phases;
    s.warnings.insert(s.warnings.end(), v.warnings.begin(), v.warnings.end());
  } else {
    s.warnings.push_back("series shorter than 4 points: volatility set to 0");
  }
  return s;
}

/// CSV: position,raw,smoothed
inline std::string evolution_csv(const EvolutionSeries &s) {
  std::string out;
  csv::append_row(out, {"position", "raw", "smoothed"});
  char a[32], b[32];
  for (std::size_t i = 0; i < s.raw.size(); ++i) {
    std::snprintf(a, sizeof a, "%.17g", s.raw[i]);
    std::snprintf(b, sizeof b, "%.17g", s.smoothed[i]);
    csv::append_row(out, {std::to_string(s.positions[i]), a, b});
  }
  return out;
}

}  // namespace delib

#endif  // DELIB_EVOLUTION_HPP_
