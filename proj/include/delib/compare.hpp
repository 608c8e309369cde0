#ifndef DELIB_COMPARE_HPP_
#define DELIB_COMPARE_HPP_

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delib/clustering.hpp"
#include "delib/error.hpp"
#include "delib/evolution.hpp"
#include "delib/metrics.hpp"
#include "delib/segmentation.hpp"
#include "delib/stats.hpp"
#include "delib/types.hpp"

namespace delib {

/// Per-event inputs for group comparison.
struct EventAnalysis {
  std::string event_id;
  DeliberationProfile profile;
  EvolutionSeries evolution;
};

struct ComponentComparison {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_diff = 0.0;  // mean_a - mean_b
  std::optional<stats::TestResult> welch;
  std::optional<stats::EffectSize> effect;
};

struct EvolutionComparison {
  std::optional<stats::TestResult> ks;
  std::optional<stats::EffectSize> effect;
  double slope_a = 0.0;
  double slope_b = 0.0;
  double volatility_a = 0.0;
  double volatility_b = 0.0;
  std::array<double, 3> phase_volatility_a{0.0, 0.0, 0.0};
  std::array<double, 3> phase_volatility_b{0.0, 0.0, 0.0};
};

struct ComparisonReport {
  std::string group_a;
  std::string group_b;
  std::map<std::string, ComponentComparison> per_component;
  EvolutionComparison evolution;
  std::vector<std::string> warnings;
};

/// Pooled: every smoothed value of every event is one observation.
/// PerEvent: each event contributes the mean of its smoothed series.
enum class EvolutionUnit { pooled, per_event };

struct CompareOptions {
  EvolutionUnit evolution_unit = EvolutionUnit::pooled;
};

using ComponentAccessor = double (*)(const DeliberationProfile &);

inline const std::vector<std::pair<std::string, ComponentAccessor>> &profile_components() {
  static const std::vector<std::pair<std::string, ComponentAccessor>> c = {
      {"narrative_diversity", [](const DeliberationProfile &p) { return p.narrative_diversity; }},
      {"coherence", [](const DeliberationProfile &p) { return p.coherence; }},
      {"narrative_distinctness", [](const DeliberationProfile &p) { return p.narrative_distinctness; }},
      {"debater_diversity", [](const DeliberationProfile &p) { return p.debater_diversity; }},
      {"argumentativeness", [](const DeliberationProfile &p) { return p.argumentativeness; }},
      {"structure", [](const DeliberationProfile &p) { return p.structure; }},
      {"participation", [](const DeliberationProfile &p) { return p.participation; }},
      {"dis", [](const DeliberationProfile &p) { return p.dis; }},
  };
  return c;
}

namespace detail {

inline std::optional<stats::EffectSize> try_cohens_d(std::span<const double> a, std::span<const double> b,
                                                     const std::string &what, std::vector<std::string> &warnings) {
  try {
    return stats::cohens_d(a, b);
  } catch (const Error &e) {
    warnings.push_back(what + ": " + e.what());
    return std::nullopt;
  }
}

}  // namespace detail

/// Welch t and Cohen's d per DIS component over per-event values, plus a KS
/// test and effect size on the evolution series. Groups with fewer than two
/// events get no t-test/effect entries (a GroupTooSmall warning instead);
/// KS is still computed.
inline ComparisonReport compare_groups(std::string name_a, std::span<const EventAnalysis> a, std::string name_b,
                                       std::span<const EventAnalysis> b, const CompareOptions &options = {}) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::GroupTooSmall, "both groups need at least one event");
  ComparisonReport r;
  r.group_a = std::move(name_a);
  r.group_b = std::move(name_b);
  const bool testable = a.size() >= 2 && b.size() >= 2;
  if (!testable)
    r.warnings.push_back(std::string(to_string(ErrorCode::GroupTooSmall)) +
                         ": fewer than 2 events in a group, t-tests and effect sizes skipped");

  for (const auto &[name, get] : profile_components()) {
    std::vector<double> xa, xb;
    for (const auto &e : a) xa.push_back(get(e.profile));
    for (const auto &e : b) xb.push_back(get(e.profile));
    ComponentComparison c;
    c.mean_a = stats::mean(xa);
    c.mean_b = stats::mean(xb);
    c.mean_diff = c.mean_a - c.mean_b;
    if (testable) {
      c.welch = stats::welch_t(xa, xb);
      c.effect = detail::try_cohens_d(xa, xb, name, r.warnings);
    }
    r.per_component.emplace(name, std::move(c));
  }

  auto collect = [&](std::span<const EventAnalysis> g, std::vector<double> &values, double &slope, double &vol,
                     std::array<double, 3> &phases) {
    std::size_t counted = 0;
    for (const auto &e : g) {
      const auto &s = e.evolution.smoothed;
      if (s.empty()) continue;
      if (options.evolution_unit == EvolutionUnit::pooled) values.insert(values.end(), s.begin(), s.end());
      else values.push_back(stats::mean(s));
      slope += e.evolution.slope;
      vol += e.evolution.volatility;
      for (int p = 0; p < 3; ++p) phases[p] += e.evolution.phase_volatility[p];
      ++counted;
    }
    if (counted) {
      slope /= static_cast<double>(counted);
      vol /= static_cast<double>(counted);
      for (auto &p : phases) p /= static_cast<double>(counted);
    }
  };
  std::vector<double> ea, eb;
  auto &ev = r.evolution;
  collect(a, ea, ev.slope_a, ev.volatility_a, ev.phase_volatility_a);
  collect(b, eb, ev.slope_b, ev.volatility_b, ev.phase_volatility_b);
  if (ea.empty() || eb.empty()) {
    r.warnings.push_back("evolution: a group has no evolution series, KS skipped");
  } else {
    ev.ks = stats::ks_two_sample(ea, eb);
    if (ea.size() >= 2 && eb.size() >= 2) ev.effect = detail::try_cohens_d(ea, eb, "evolution", r.warnings);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Member-witness dyadic similarity

/// One event together with its embedded argument units.
struct EventArguments {
  const DiscourseEvent *event = nullptr;
  const std::vector<ArgumentUnit> *units = nullptr;
};

struct DyadCell {
  std::string party;
  bool majority = false;
  double mean_similarity = 0.0;
  std::size_t n_dyads = 0;
};

struct PartyDelta {
  std::string party;
  std::optional<double> majority_minus_minority;
  std::optional<stats::TestResult> welch;
};

struct DyadicSimilarityReport {
  std::vector<DyadCell> groups;   // sorted by (party, majority)
  std::vector<PartyDelta> deltas;  // sorted by party
  std::vector<std::string> warnings;
};

/// Dyad = one dyad similarity per observation; EventMean = the per-event
/// mean of a cell is one observation.
enum class DyadUnit { dyad, event_mean };

inline constexpr std::string_view kUnknownParty = "unknown";

/// Cosine similarity of every (member argument, witness argument) pair
/// within each event, grouped by the member's party and majority flag.
inline DyadicSimilarityReport dyadic_member_witness_similarity(std::span<const EventArguments> events,
                                                               DyadUnit unit = DyadUnit::dyad) {
  DyadicSimilarityReport r;
  using Cell = std::pair<std::string, bool>;
  std::map<Cell, std::vector<double>> samples;  // per `unit`
  std::map<Cell, std::pair<double, std::size_t>> totals;
  std::size_t skipped_members = 0;

  for (const auto &ea : events) {
    const auto &ev = *ea.event;
    bool any_role = false;
    for (const auto &s : ev.statements) any_role = any_role || s.role.has_value();
    if (!any_role) throw Error(ErrorCode::MissingRoleMetadata, "event " + ev.id + " has no role labels");

    std::vector<const ArgumentUnit *> witnesses;
    std::vector<std::pair<const ArgumentUnit *, Cell>> members;
    for (const auto &u : *ea.units) {
      if (!u.embedding) throw Error(ErrorCode::PreconditionViolation, "argument " + u.id + " has no embedding");
      if (u.statement_seq >= ev.statements.size())
        throw Error(ErrorCode::PreconditionViolation, "argument " + u.id + " refers to a missing statement");
      const auto &st = ev.statements[u.statement_seq];
      if (st.role == Role::witness) {
        witnesses.push_back(&u);
      } else if (st.role == Role::member) {
        if (!st.majority) {
          ++skipped_members;
          continue;
        }
        members.push_back({&u, Cell{st.party.value_or(std::string(kUnknownParty)), *st.majority}});
      }
    }
    if (members.empty() || witnesses.empty()) continue;

    std::map<Cell, std::pair<double, std::size_t>> event_cells;
    for (const auto &[m, cell] : members)
      for (const auto *w : witnesses) {
        const double sim = cosine_similarity(*m->embedding, *w->embedding);
        auto &t = totals[cell];
        t.first += sim;
        ++t.second;
        auto &ec = event_cells[cell];
        ec.first += sim;
        ++ec.second;
        if (unit == DyadUnit::dyad) samples[cell].push_back(sim);
      }
    if (unit == DyadUnit::event_mean)
      for (const auto &[cell, t] : event_cells) samples[cell].push_back(t.first / static_cast<double>(t.second));
  }
  if (totals.empty()) throw Error(ErrorCode::NoDyads, "no event has both member and witness arguments");
  if (skipped_members)
    r.warnings.push_back(std::to_string(skipped_members) + " member arguments lack a majority flag and were skipped");

  std::set<std::string> parties;
  for (const auto &[cell, t] : totals) {
    r.groups.push_back({cell.first, cell.second, t.first / static_cast<double>(t.second), t.second});
    parties.insert(cell.first);
  }
  for (const auto &party : parties) {
    PartyDelta d;
    d.party = party;
    auto maj = totals.find({party, true});
    auto min = totals.find({party, false});
    if (maj != totals.end() && min != totals.end()) {
      d.majority_minus_minority = maj->second.first / static_cast<double>(maj->second.second) -
                                  min->second.first / static_cast<double>(min->second.second);
      const auto &sa = samples[{party, true}];
      const auto &sb = samples[{party, false}];
      if (sa.size() >= 2 && sb.size() >= 2) d.welch = stats::welch_t(sa, sb);
      else r.warnings.push_back("party " + party + ": too few observations for a t-test");
    }
    r.deltas.push_back(std::move(d));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Clusterer robustness

struct ClustererInput {
  std::string event_id;
  std::size_t n_statements = 0;
  std::vector<Embedding> embeddings;  // in arg_seq order
  std::vector<std::string> speakers;  // one per argument
};

struct ClustererEventResult {
  std::string event_id;
  DeliberationProfile profile_a;
  DeliberationProfile profile_b;
};

struct FeatureDelta {
  double mean_diff = 0.0;  // mean over events of (a - b)
  std::vector<double> diffs;
  stats::TestResult test;
};

struct ClustererComparisonReport {
  std::vector<ClustererEventResult> events;
  std::map<std::string, FeatureDelta> features;  // structural features and dis
};

inline std::size_t count_distinct(const std::vector<std::string> &xs) {
  return std::set<std::string>(xs.begin(), xs.end()).size();
}

inline DeliberationProfile profile_for(const ClustererInput &in, const ClusteringParams &params, double alpha,
                                       double beta) {
  auto c = cluster(in.embeddings, params);
  return profile_from_clustering(c, in.n_statements, count_distinct(in.speakers), params.method, alpha, beta);
}

/// Structural features and DIS under two clusterings of the same events,
/// with paired differences (a - b) tested by a one-sample t-test.
/// Participation features must come out bit-identical; a difference is a
/// defect and raises InvariantViolation.
inline ClustererComparisonReport compare_clusterers(std::span<const ClustererInput> events,
                                                    const ClusteringParams &params_a,
                                                    const ClusteringParams &params_b,
                                                    double alpha = kDefaultAlpha, double beta = kDefaultBeta) {
  if (events.size() < 2) throw Error(ErrorCode::GroupTooSmall, "compare_clusterers needs at least 2 events");
  ClustererComparisonReport r;
  for (const auto &in : events) {
    if (in.speakers.size() != in.embeddings.size())
      throw Error(ErrorCode::PreconditionViolation, "event " + in.event_id + ": speakers/embeddings size mismatch");
    ClustererEventResult ev{in.event_id, profile_for(in, params_a, alpha, beta), profile_for(in, params_b, alpha, beta)};
    const auto &pa = ev.profile_a;
    const auto &pb = ev.profile_b;
    if (pa.debater_diversity != pb.debater_diversity || pa.argumentativeness != pb.argumentativeness ||
        pa.participation != pb.participation)
      throw Error(ErrorCode::InvariantViolation, "participation features differ between clusterers on " + in.event_id);
    r.events.push_back(std::move(ev));
  }
  const std::vector<std::pair<std::string, ComponentAccessor>> features = {
      {"narrative_diversity", [](const DeliberationProfile &p) { return p.narrative_diversity; }},
      {"coherence", [](const DeliberationProfile &p) { return p.coherence; }},
      {"narrative_distinctness", [](const DeliberationProfile &p) { return p.narrative_distinctness; }},
      {"structure", [](const DeliberationProfile &p) { return p.structure; }},
      {"dis", [](const DeliberationProfile &p) { return p.dis; }},
  };
  for (const auto &[name, get] : features) {
    FeatureDelta f;
    for (const auto &e : r.events) f.diffs.push_back(get(e.profile_a) - get(e.profile_b));
    f.mean_diff = stats::mean(f.diffs);
    f.test = stats::one_sample_t(f.diffs);
    r.features.emplace(name, std::move(f));
  }
  return r;
}

}  // namespace delib

#endif  // DELIB_COMPARE_HPP_
