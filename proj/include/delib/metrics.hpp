#ifndef DELIB_METRICS_HPP_
#define DELIB_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "delib/clustering.hpp"
#include "delib/error.hpp"
#include "delib/vector_ops.hpp"

namespace delib {

inline constexpr double kDefaultAlpha = 0.5;
inline constexpr double kDefaultBeta = 0.5;

namespace detail {
inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }
}  // namespace detail

/// Unclamped component values, kept for diagnostics.
struct RawComponents {
  double narrative_diversity = 0.0;
  double narrative_distinctness = 0.0;
  double debater_diversity = 0.0;
  double argumentativeness = 0.0;

  bool operator==(const RawComponents &) const = default;
};

struct DeliberationProfile {
  std::size_t n_statements = 0;
  std::size_t n_arguments = 0;
  std::size_t n_debaters = 0;
  std::size_t n_clusters = 0;
  std::size_t n_outliers = 0;
  double narrative_diversity = 0.0;
  double coherence = 0.0;
  double narrative_distinctness = 0.0;
  double debater_diversity = 0.0;
  double argumentativeness = 0.0;
  double structure = 0.0;
  double participation = 0.0;
  double dis = 0.0;
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;
  ClusteringMethod clustering_method = ClusteringMethod::threshold_community;
  std::vector<std::string> warnings;
  RawComponents raw;

  bool operator==(const DeliberationProfile &) const = default;
};

inline double coherence(std::size_t n_arguments, std::size_t n_outliers) {
  if (n_arguments == 0) return 0.0;
  return 1.0 - static_cast<double>(n_outliers) / static_cast<double>(n_arguments);
}

inline double narrative_diversity_raw(std::size_t n_clusters, std::size_t n_arguments,
                                      std::size_t n_outliers) {
  if (n_arguments == 0) return 0.0;
  return static_cast<double>(n_clusters) / std::sqrt(static_cast<double>(n_arguments)) *
         coherence(n_arguments, n_outliers);
}

/// min(1, clusters / sqrt(arguments)) * coherence; 0 without arguments.
inline double narrative_diversity(std::size_t n_clusters, std::size_t n_arguments,
                                  std::size_t n_outliers) {
  if (n_arguments == 0) return 0.0;
  if (n_outliers > n_arguments)
    throw Error(ErrorCode::PreconditionViolation, "more outliers than arguments");
  double ratio = std::min(1.0, static_cast<double>(n_clusters) / std::sqrt(static_cast<double>(n_arguments)));
  return detail::clamp01(ratio * coherence(n_arguments, n_outliers));
}

inline double distinctness_raw_from_distances(std::span<const double> d) {
  if (d.empty()) return 0.0;
  double sum = 0.0, lo = d.front();
  for (double x : d) {
    sum += x;
    lo = std::min(lo, x);
  }
  double mean = sum / static_cast<double>(d.size());
  return std::sqrt(std::max(0.0, mean * std::max(0.0, lo)));
}

/// min(1, sqrt(mean(d) * min(d))) over the given pairwise distances.
inline double distinctness_from_distances(std::span<const double> d) {
  return std::min(1.0, distinctness_raw_from_distances(d));
}

inline std::vector<double> pairwise_cosine_distances(std::span<const Embedding> centroids) {
  std::vector<double> d;
  for (std::size_t i = 0; i < centroids.size(); ++i)
    for (std::size_t j = i + 1; j < centroids.size(); ++j)
      d.push_back(cosine_distance(centroids[i], centroids[j]));
  return d;
}

/// Cosine distances between every pair of centroids combined as
/// min(1, sqrt(mean * min)). Fewer than two centroids give 0.
inline double narrative_distinctness(std::span<const Embedding> centroids) {
  if (centroids.size() < 2) return 0.0;
  auto d = pairwise_cosine_distances(centroids);
  return distinctness_from_distances(d);
}

inline double debater_diversity_raw(std::size_t n_debaters, std::size_t n_arguments) {
  if (n_arguments == 0) return 0.0;
  return static_cast<double>(n_debaters) / std::sqrt(static_cast<double>(n_arguments));
}

/// min(1, debaters / sqrt(arguments)); debaters are argument-making speakers.
inline double debater_diversity(std::size_t n_debaters, std::size_t n_arguments) {
  return std::min(1.0, debater_diversity_raw(n_debaters, n_arguments));
}

inline double argumentativeness_raw(std::size_t n_arguments, std::size_t n_statements) {
  if (n_statements == 0) return 0.0;
  return static_cast<double>(n_arguments) / static_cast<double>(n_statements);
}

/// min(1, arguments / statements).
inline double argumentativeness(std::size_t n_arguments, std::size_t n_statements) {
  return std::min(1.0, argumentativeness_raw(n_arguments, n_statements));
}

struct ProfileInputs {
  std::size_t n_statements = 0;
  std::size_t n_arguments = 0;
  std::size_t n_debaters = 0;
  std::size_t n_clusters = 0;
  std::size_t n_outliers = 0;
  std::vector<Embedding> centroids;
  ClusteringMethod clustering_method = ClusteringMethod::threshold_community;
};

/// Recomputes structure/participation/dis from the stored components.
/// Only the weighted sum depends on alpha and beta.
inline void reweight(DeliberationProfile &p, double alpha, double beta) {
  if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0))
    throw Error(ErrorCode::PreconditionViolation, "alpha and beta must lie in [0,1]");
  p.alpha = alpha;
  p.beta = beta;
  p.structure = (p.narrative_diversity + p.narrative_distinctness) / 2.0;
  p.participation = (p.debater_diversity + p.argumentativeness) / 2.0;
  p.dis = alpha * p.structure + beta * p.participation;
  std::erase_if(p.warnings, [](const std::string &w) { return w.rfind("weights:", 0) == 0; });
  if (alpha + beta > 1.0)
    p.warnings.push_back("weights: alpha + beta > 1, dis may exceed 1");
}

/// Assembles the full profile. dis lies in [0,1] whenever alpha + beta <= 1.
inline DeliberationProfile deliberation_intensity(const ProfileInputs &in, double alpha = kDefaultAlpha,
                                                  double beta = kDefaultBeta) {
  DeliberationProfile p;
  p.n_statements = in.n_statements;
  p.n_arguments = in.n_arguments;
  p.n_debaters = in.n_debaters;
  p.n_clusters = in.n_clusters;
  p.n_outliers = in.n_outliers;
  p.clustering_method = in.clustering_method;

  if (in.n_arguments == 0) {
    p.warnings.push_back("no arguments: all components set to 0");
  } else {
    p.coherence = coherence(in.n_arguments, in.n_outliers);
    p.narrative_diversity = narrative_diversity(in.n_clusters, in.n_arguments, in.n_outliers);
    p.narrative_distinctness = narrative_distinctness(in.centroids);
    p.debater_diversity = debater_diversity(in.n_debaters, in.n_arguments);
    p.argumentativeness = argumentativeness(in.n_arguments, in.n_statements);

    p.raw.narrative_diversity = narrative_diversity_raw(in.n_clusters, in.n_arguments, in.n_outliers);
    p.raw.narrative_distinctness =
        in.centroids.size() < 2 ? 0.0 : distinctness_raw_from_distances(pairwise_cosine_distances(in.centroids));
    p.raw.debater_diversity = debater_diversity_raw(in.n_debaters, in.n_arguments);
    p.raw.argumentativeness = argumentativeness_raw(in.n_arguments, in.n_statements);
    if (in.centroids.size() < 2) p.warnings.push_back("fewer than two narratives: distinctness set to 0");
  }
  reweight(p, alpha, beta);
  return p;
}

/// Convenience: profile straight from a clustering plus counts.
inline DeliberationProfile profile_from_clustering(const Clustering &c, std::size_t n_statements,
                                                   std::size_t n_debaters, ClusteringMethod method,
                                                   double alpha = kDefaultAlpha, double beta = kDefaultBeta) {
  ProfileInputs in;
  in.n_statements = n_statements;
  in.n_arguments = c.labels.size();
  in.n_debaters = n_debaters;
  in.n_clusters = c.narratives.size();
  in.n_outliers = c.n_noise();
  in.clustering_method = method;
  for (const auto &nar : c.narratives) in.centroids.push_back(nar.centroid);
  return deliberation_intensity(in, alpha, beta);
}

}  // namespace delib

#endif  // DELIB_METRICS_HPP_
