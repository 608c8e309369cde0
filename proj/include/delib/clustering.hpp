#ifndef DELIB_CLUSTERING_HPP_
#define DELIB_CLUSTERING_HPP_

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "delib/error.hpp"
#include "delib/vector_ops.hpp"

namespace delib {

enum class ClusteringMethod { threshold_community, density };

constexpr std::string_view to_string(ClusteringMethod m) {
  return m == ClusteringMethod::density ? "density" : "threshold_community";
}

inline std::optional<ClusteringMethod> clustering_method_from_string(std::string_view s) {
  if (s == "threshold_community") return ClusteringMethod::threshold_community;
  if (s == "density") return ClusteringMethod::density;
  return std::nullopt;
}

inline constexpr int kNoiseLabel = -1;

struct ClusteringParams {
  ClusteringMethod method = ClusteringMethod::threshold_community;
  double similarity_threshold = 0.75;
  std::size_t min_community_size = 2;
  std::size_t density_min_pts = 3;
  double density_eps = 0.3;  // cosine distance

  void validate() const {
    if (!(similarity_threshold > 0.0 && similarity_threshold < 1.0))
      throw Error(ErrorCode::InvalidConfig, "similarity_threshold must lie in (0,1)");
    if (min_community_size < 1) throw Error(ErrorCode::InvalidConfig, "min_community_size must be >= 1");
    if (density_min_pts < 1) throw Error(ErrorCode::InvalidConfig, "density_min_pts must be >= 1");
    if (!(density_eps >= 0.0 && density_eps <= 2.0))
      throw Error(ErrorCode::InvalidConfig, "density_eps must lie in [0,2]");
  }

  bool operator==(const ClusteringParams &) const = default;
};

struct Narrative {
  int cluster_label = 0;
  std::vector<std::size_t> members;  // positions in the clustered list, ascending
  Embedding centroid;
  std::optional<std::string> summary;
  int color_index = 0;

  bool operator==(const Narrative &) const = default;
};

struct Clustering {
  std::vector<int> labels;  // one per input, kNoiseLabel for noise
  std::vector<Narrative> narratives;

  std::size_t n_noise() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoiseLabel));
  }
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

inline void check_dims(std::span<const Embedding> e) {
  for (const auto &v : e)
    if (v.size() != e.front().size())
      throw Error(ErrorCode::DimensionMismatch,
                  std::to_string(e.front().size()) + " vs " + std::to_string(v.size()));
}

/// Unit-normalized copies; zero vectors stay zero (similarity 0 to all).
inline std::vector<Embedding> unit_copies(std::span<const Embedding> e) {
  std::vector<Embedding> out(e.begin(), e.end());
  for (auto &v : out) normalize(v);
  return out;
}

inline double unit_dot(const Embedding &a, const Embedding &b) {
  const double *x = a.data();
  const double *y = b.data();
  const std::size_t n = a.size();
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * y[i];
  double s = (s0 + s1) + (s2 + s3);
  return s > 1.0 ? 1.0 : (s < -1.0 ? -1.0 : s);
}

/// Turns a group id per point (or nullopt for unassigned) into labels:
/// groups smaller than min_size become noise, the rest are numbered by
/// their smallest key.
inline Clustering finalize(std::span<const Embedding> e, const std::vector<std::optional<std::size_t>> &group,
                           std::span<const std::size_t> keys, std::size_t min_size) {
  const std::size_t n = e.size();
  auto key = [&](std::size_t i) { return keys.empty() ? i : keys[i]; };

  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i)
    if (group[i]) members[*group[i]].push_back(i);

  std::vector<std::size_t> kept;
  for (std::size_t g = 0; g < n; ++g)
    if (!members[g].empty() && members[g].size() >= min_size) kept.push_back(g);

  auto min_key = [&](std::size_t g) {
    std::size_t m = key(members[g].front());
    for (auto i : members[g]) m = std::min(m, key(i));
    return m;
  };
  std::sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) { return min_key(a) < min_key(b); });

  Clustering out;
  out.labels.assign(n, kNoiseLabel);
  for (std::size_t l = 0; l < kept.size(); ++l) {
    auto &m = members[kept[l]];
    std::sort(m.begin(), m.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    Narrative nar;
    nar.cluster_label = static_cast<int>(l);
    nar.color_index = static_cast<int>(l);
    nar.members = m;
    std::vector<Embedding> vecs;
    vecs.reserve(m.size());
    for (auto i : m) {
      out.labels[i] = static_cast<int>(l);
      vecs.push_back(e[i]);
    }
    nar.centroid = centroid(vecs);
    out.narratives.push_back(std::move(nar));
  }
  return out;
}

}  // namespace detail

/// Threshold community detection: edge (i,j) iff cosine similarity exceeds
/// the threshold; connected components of at least min_community_size
/// members become narratives, the rest are noise. `keys` (optional, one per
/// embedding) define label order; by default the input position is the key.
inline Clustering cluster_threshold(std::span<const Embedding> embeddings, const ClusteringParams &params,
                                    std::span<const std::size_t> keys = {}) {
  params.validate();
  const std::size_t n = embeddings.size();
  if (n == 0) return {};
  detail::check_dims(embeddings);
  auto unit = detail::unit_copies(embeddings);

  detail::DisjointSets ds(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (detail::unit_dot(unit[i], unit[j]) > params.similarity_threshold) ds.unite(i, j);

  std::vector<std::optional<std::size_t>> group(n);
  for (std::size_t i = 0; i < n; ++i) group[i] = ds.find(i);
  return detail::finalize(embeddings, group, keys, params.min_community_size);
}

/// Density-based clustering over cosine distance. A point is core when at
/// least density_min_pts points (itself included) lie within density_eps.
/// Cores within eps of each other share a cluster; a non-core point within
/// eps of some core joins the cluster of its nearest core (ties to the
/// smaller key); everything else is noise. Clusters below
/// min_community_size are relabeled as noise.
inline Clustering cluster_density(std::span<const Embedding> embeddings, const ClusteringParams &params,
                                  std::span<const std::size_t> keys = {}) {
  params.validate();
  const std::size_t n = embeddings.size();
  if (n == 0) return {};
  detail::check_dims(embeddings);
  auto unit = detail::unit_copies(embeddings);
  auto key = [&](std::size_t i) { return keys.empty() ? i : keys[i]; };
  const double min_sim = 1.0 - params.density_eps;

  std::vector<std::size_t> neighbors(n, 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (detail::unit_dot(unit[i], unit[j]) >= min_sim) {
        ++neighbors[i];
        ++neighbors[j];
      }
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = neighbors[i] >= params.density_min_pts;

  detail::DisjointSets ds(n);
  std::vector<std::optional<std::size_t>> nearest(n);
  std::vector<double> nearest_sim(n, -2.0);
  auto offer = [&](std::size_t border, std::size_t c, double sim) {
    if (!nearest[border] || sim > nearest_sim[border] ||
        (sim == nearest_sim[border] && key(c) < key(*nearest[border]))) {
      nearest[border] = c;
      nearest_sim[border] = sim;
    }
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!core[i] && !core[j]) continue;
      double sim = detail::unit_dot(unit[i], unit[j]);
      if (sim < min_sim) continue;
      if (core[i] && core[j]) ds.unite(i, j);
      else if (core[i]) offer(j, i, sim);
      else offer(i, j, sim);
    }

  std::vector<std::optional<std::size_t>> group(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) group[i] = ds.find(i);
    else if (nearest[i]) group[i] = ds.find(*nearest[i]);
  }
  return detail::finalize(embeddings, group, keys, params.min_community_size);
}

inline Clustering cluster(std::span<const Embedding> embeddings, const ClusteringParams &params,
                          std::span<const std::size_t> keys = {}) {
  return params.method == ClusteringMethod::density ? cluster_density(embeddings, params, keys)
                                                    : cluster_threshold(embeddings, params, keys);
}

}  // namespace delib

#endif  // DELIB_CLUSTERING_HPP_
