#ifndef DELIB_PIPELINE_HPP_
#define DELIB_PIPELINE_HPP_

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "delib/clustering.hpp"
#include "delib/digest.hpp"
#include "delib/error.hpp"
#include "delib/evolution.hpp"
#include "delib/metrics.hpp"
#include "delib/providers.hpp"
#include "delib/segmentation.hpp"
#include "delib/serialize.hpp"
#include "delib/types.hpp"

namespace delib {

struct AnalysisParams {
  std::size_t k = kDefaultWindowSize;
  ClusteringParams clustering;
  EvolutionParams evolution;
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;

  void validate() const {
    if (k == 0) throw Error(ErrorCode::InvalidConfig, "k must be >= 1");
    clustering.validate();
    evolution.validate();
    if (!(alpha >= 0.0 && alpha <= 1.0) || !(beta >= 0.0 && beta <= 1.0))
      throw Error(ErrorCode::InvalidConfig, "alpha and beta must lie in [0,1]");
  }

  bool operator==(const AnalysisParams &) const = default;
};

inline void to_json(Json &j, const AnalysisParams &p) {
  j = Json{{"k", p.k}, {"clustering", p.clustering}, {"evolution", p.evolution}, {"alpha", p.alpha}, {"beta", p.beta}};
}

inline void from_json(const Json &j, AnalysisParams &p) {
  p = AnalysisParams{};
  if (auto v = detail::get_opt<std::size_t>(j, "k")) p.k = *v;
  if (auto it = j.find("clustering"); it != j.end() && !it->is_null()) p.clustering = it->get<ClusteringParams>();
  if (auto it = j.find("evolution"); it != j.end() && !it->is_null()) p.evolution = it->get<EvolutionParams>();
  if (auto v = detail::get_opt<double>(j, "alpha")) p.alpha = *v;
  if (auto v = detail::get_opt<double>(j, "beta")) p.beta = *v;
}

struct ClusterAssignment {
  std::string argument_id;
  int cluster_label = kNoiseLabel;

  bool operator==(const ClusterAssignment &) const = default;
};

inline void to_json(Json &j, const ClusterAssignment &a) {
  j = Json{{"argument_id", a.argument_id}, {"cluster_label", a.cluster_label}};
}

inline void from_json(const Json &j, ClusterAssignment &a) {
  a.argument_id = j.at("argument_id").get<std::string>();
  a.cluster_label = j.at("cluster_label").get<int>();
}

/// Narrative plus the ids of its member arguments.
struct NarrativeView {
  Narrative narrative;
  std::vector<std::string> member_ids;

  bool operator==(const NarrativeView &) const = default;
};

inline void to_json(Json &j, const NarrativeView &n) {
  to_json(j, n.narrative);
  j["member_ids"] = n.member_ids;
}

inline void from_json(const Json &j, NarrativeView &n) {
  from_json(j, n.narrative);
  n.member_ids = j.at("member_ids").get<std::vector<std::string>>();
}

/// Result of one analysis. Creation time lives in the store index so the
/// record itself is a pure function of (event, params, providers).
struct AnalysisRecord {
  std::string event_id;
  std::string params_fingerprint;
  AnalysisParams params;
  std::vector<ArgumentUnit> arguments;
  std::vector<ClusterAssignment> assignments;
  std::vector<NarrativeView> narratives;
  DeliberationProfile profile;
  EvolutionSeries evolution;

  bool operator==(const AnalysisRecord &) const = default;
};

inline void to_json(Json &j, const AnalysisRecord &r) {
  j = Json{{"event_id", r.event_id},       {"params_fingerprint", r.params_fingerprint},
           {"params", r.params},           {"arguments", r.arguments},
           {"assignments", r.assignments}, {"narratives", r.narratives},
           {"profile", r.profile},         {"evolution", r.evolution}};
}

inline void from_json(const Json &j, AnalysisRecord &r) {
  r.event_id = j.at("event_id").get<std::string>();
  r.params_fingerprint = j.at("params_fingerprint").get<std::string>();
  r.params = j.at("params").get<AnalysisParams>();
  r.arguments = j.at("arguments").get<std::vector<ArgumentUnit>>();
  r.assignments = j.at("assignments").get<std::vector<ClusterAssignment>>();
  r.narratives = j.at("narratives").get<std::vector<NarrativeView>>();
  r.profile = j.at("profile").get<DeliberationProfile>();
  r.evolution = j.at("evolution").get<EvolutionSeries>();
}

/// Canonical serialization: sorted keys, no whitespace.
template <typename T>
std::string canonical_json(const T &v) {
  return Json(v).dump();
}

// ---------------------------------------------------------------------------
// Fingerprints. Three nested keys: segmentation depends on k and the
// classifier/embedder; the structural key adds clustering, evolution and
// the summarizer; the full key adds the weights.

inline std::string segmentation_fingerprint(const AnalysisParams &p, const ProviderSuiteConfig &cfg) {
  return sha256_hex(Json{{"k", p.k}, {"classifier", cfg.classifier}, {"embedder", cfg.embedder}}.dump());
}

inline std::string structural_fingerprint(const AnalysisParams &p, const ProviderSuiteConfig &cfg) {
  return sha256_hex(Json{{"segmentation", segmentation_fingerprint(p, cfg)},
                         {"clustering", p.clustering},
                         {"evolution", p.evolution},
                         {"summarizer", cfg.summarizer}}
                        .dump());
}

inline std::string params_fingerprint(const AnalysisParams &p, const ProviderSuiteConfig &cfg) {
  return sha256_hex(
      Json{{"structural", structural_fingerprint(p, cfg)}, {"alpha", p.alpha}, {"beta", p.beta}}.dump());
}

// ---------------------------------------------------------------------------
// Stages

namespace detail {

template <typename F>
auto in_stage(const char *stage, F &&f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error &e) {
    if (!e.stage().empty()) throw;
    throw e.with_stage(stage);
  }
}

}  // namespace detail

inline SegmentationResult run_segmentation(const DiscourseEvent &ev, std::size_t k, const Providers &providers) {
  return detail::in_stage("segmentation", [&] { return segment_event(ev, k, providers); });
}

inline std::size_t count_debaters(const std::vector<ArgumentUnit> &units) {
  std::set<std::string_view> s;
  for (const auto &u : units) s.insert(u.speaker_id);
  return s.size();
}

/// Clustering, summaries, metrics and evolution over already segmented
/// arguments.
inline AnalysisRecord analyze_units(const DiscourseEvent &ev, std::vector<ArgumentUnit> units,
                                    const AnalysisParams &params, const Providers &providers) {
  params.validate();
  AnalysisRecord r;
  r.event_id = ev.id;
  r.params = params;
  r.params_fingerprint = params_fingerprint(params, providers.config);

  std::vector<Embedding> emb;
  emb.reserve(units.size());
  for (const auto &u : units) {
    if (!u.embedding) throw Error(ErrorCode::PreconditionViolation, "argument " + u.id + " has no embedding", "clustering");
    emb.push_back(*u.embedding);
  }

  Clustering c = detail::in_stage("clustering", [&] { return cluster(emb, params.clustering); });

  for (std::size_t i = 0; i < units.size(); ++i) r.assignments.push_back({units[i].id, c.labels[i]});

  detail::in_stage("summarization", [&] {
    for (auto &nar : c.narratives) {
      std::vector<std::string> texts;
      NarrativeView view;
      for (auto m : nar.members) {
        texts.push_back(units[m].text);
        view.member_ids.push_back(units[m].id);
      }
      nar.summary = providers.summarizer->summarize_cluster(texts);
      view.narrative = nar;
      r.narratives.push_back(std::move(view));
    }
    return 0;
  });

  r.profile = detail::in_stage("metrics", [&] {
    return profile_from_clustering(c, ev.statements.size(), count_debaters(units), params.clustering.method,
                                   params.alpha, params.beta);
  });

  r.evolution = detail::in_stage("evolution", [&] {
    if (emb.size() < params.evolution.min_arguments) {
      EvolutionSeries s;
      s.n = emb.size();
      s.warnings.push_back("TooFewArguments: " + std::to_string(emb.size()) + " < " +
                           std::to_string(params.evolution.min_arguments) + ", series omitted");
      return s;
    }
    return evolution_series(emb, params.evolution);
  });

  r.arguments = std::move(units);
  return r;
}

/// Full pipeline without any caching.
inline AnalysisRecord analyze_event(const DiscourseEvent &ev, const AnalysisParams &params, const Providers &providers) {
  params.validate();
  auto seg = run_segmentation(ev, params.k, providers);
  return analyze_units(ev, std::move(seg.units), params, providers);
}

/// Same record under new weights. Only the weighted aggregation changes.
inline AnalysisRecord reweighted(AnalysisRecord r, double alpha, double beta, const ProviderSuiteConfig &cfg) {
  r.params.alpha = alpha;
  r.params.beta = beta;
  r.params.validate();
  reweight(r.profile, alpha, beta);
  r.params_fingerprint = params_fingerprint(r.params, cfg);
  return r;
}

/// Narratives in the shape served to clients.
inline Json narratives_json(const AnalysisRecord &r) {
  return Json{{"event_id", r.event_id}, {"params_fingerprint", r.params_fingerprint}, {"narratives", r.narratives}};
}

inline std::string narratives_csv(const AnalysisRecord &r) {
  std::string out;
  csv::append_row(out, {"cluster_label", "color_index", "n_members", "member_ids", "summary"});
  for (const auto &n : r.narratives) {
    std::string ids;
    for (const auto &id : n.member_ids) {
      if (!ids.empty()) ids += ' ';
      ids += id;
    }
    csv::append_row(out, {std::to_string(n.narrative.cluster_label), std::to_string(n.narrative.color_index),
                          std::to_string(n.member_ids.size()), ids, n.narrative.summary.value_or("")});
  }
  return out;
}

inline std::string profile_csv(const DeliberationProfile &p) {
  Json j = p;
  std::string out;
  csv::append_row(out, {"field", "value"});
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it->is_array()) {
      std::string joined;
      for (const auto &w : *it) {
        if (!joined.empty()) joined += "; ";
        joined += w.get<std::string>();
      }
      csv::append_row(out, {it.key(), joined});
    } else if (it->is_string()) {
      csv::append_row(out, {it.key(), it->get<std::string>()});
    } else {
      csv::append_row(out, {it.key(), it->dump()});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Flat option names shared by the CLI flags, HTTP query strings and request
// bodies: k, alpha, beta, method, threshold, min_community_size, min_pts,
// eps, w_min, w_max, min_arguments.

namespace detail {

inline double parse_double_option(const std::string &name, const std::string &v) {
  char *end = nullptr;
  errno = 0;
  double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno != 0 || !std::isfinite(x))
    throw Error(ErrorCode::InvalidConfig, name + ": not a number: '" + v + "'");
  return x;
}

inline std::size_t parse_size_option(const std::string &name, const std::string &v) {
  std::size_t x = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw Error(ErrorCode::InvalidConfig, name + ": not a non-negative integer: '" + v + "'");
  return x;
}

}  // namespace detail

inline const std::vector<std::string> &analysis_option_names() {
  static const std::vector<std::string> names = {"k",   "alpha", "beta",  "method", "threshold",    "min_community_size",
                                                 "min_pts", "eps", "w_min", "w_max",  "min_arguments"};
  return names;
}

/// Builds parameters from flat string options; absent options keep their
/// defaults and unknown names are ignored.
inline AnalysisParams params_from_options(const std::map<std::string, std::string> &opts) {
  AnalysisParams p;
  auto get = [&](const char *name) -> const std::string * {
    auto it = opts.find(name);
    return it == opts.end() ? nullptr : &it->second;
  };
  if (auto v = get("k")) p.k = detail::parse_size_option("k", *v);
  if (auto v = get("alpha")) p.alpha = detail::parse_double_option("alpha", *v);
  if (auto v = get("beta")) p.beta = detail::parse_double_option("beta", *v);
  if (auto v = get("method")) {
    auto m = clustering_method_from_string(*v);
    if (!m) throw Error(ErrorCode::InvalidConfig, "method: expected threshold_community or density, got '" + *v + "'");
    p.clustering.method = *m;
  }
  if (auto v = get("threshold")) p.clustering.similarity_threshold = detail::parse_double_option("threshold", *v);
  if (auto v = get("min_community_size"))
    p.clustering.min_community_size = detail::parse_size_option("min_community_size", *v);
  if (auto v = get("min_pts")) p.clustering.density_min_pts = detail::parse_size_option("min_pts", *v);
  if (auto v = get("eps")) p.clustering.density_eps = detail::parse_double_option("eps", *v);
  if (auto v = get("w_min")) p.evolution.w_min = detail::parse_size_option("w_min", *v);
  if (auto v = get("w_max")) p.evolution.w_max = detail::parse_size_option("w_max", *v);
  if (auto v = get("min_arguments")) p.evolution.min_arguments = detail::parse_size_option("min_arguments", *v);
  p.validate();
  return p;
}

/// Same as params_from_options for a flat JSON object whose values are
/// numbers or strings.
inline AnalysisParams params_from_flat_json(const Json &j) {
  std::map<std::string, std::string> opts;
  if (j.is_null()) return params_from_options(opts);
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "params must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it->is_string()) opts[it.key()] = it->get<std::string>();
    else if (it->is_number()) opts[it.key()] = it->dump();
    else throw Error(ErrorCode::InvalidConfig, "params." + it.key() + " must be a number or string");
  }
  return params_from_options(opts);
}

}  // namespace delib

#endif  // DELIB_PIPELINE_HPP_
