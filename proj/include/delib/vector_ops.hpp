#ifndef DELIB_VECTOR_OPS_HPP_
#define DELIB_VECTOR_OPS_HPP_

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "delib/error.hpp"

namespace delib {

/// Dense embedding. Provider outputs are unit-norm; centroids are raw means.
using Embedding = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double l2_norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Scales `v` to unit length in place. Returns false (and leaves `v`
/// untouched) when the norm is zero or not finite.
inline bool normalize(std::span<double> v) {
  double n = l2_norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) return false;
  for (auto &x : v) x /= n;
  return true;
}

/// dot(a,b)/(|a||b|), clamped to [-1,1]. A zero vector has similarity 0 to
/// everything.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  double c = ab / (std::sqrt(aa) * std::sqrt(bb));
  return c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
}

inline double cosine_distance(std::span<const double> a, std::span<const double> b) {
  return 1.0 - cosine_similarity(a, b);
}

/// Componentwise arithmetic mean (not re-normalized).
inline Embedding centroid(std::span<const Embedding> members) {
  if (members.empty()) throw Error(ErrorCode::EmptyCluster, "centroid of zero members");
  const auto dim = members.front().size();
  Embedding c(dim, 0.0);
  for (const auto &m : members) {
    if (m.size() != dim)
      throw Error(ErrorCode::DimensionMismatch,
                  std::to_string(dim) + " vs " + std::to_string(m.size()));
    for (std::size_t i = 0; i < dim; ++i) c[i] += m[i];
  }
  const double inv = 1.0 / static_cast<double>(members.size());
  for (auto &x : c) x *= inv;
  return c;
}

}  // namespace delib

#endif  // DELIB_VECTOR_OPS_HPP_
