#ifndef DELIB_SERIALIZE_HPP_
#define DELIB_SERIALIZE_HPP_

#include <optional>
#include <string>

#include "delib/clustering.hpp"
#include "delib/compare.hpp"
#include "delib/error.hpp"
#include "delib/evolution.hpp"
#include "delib/metrics.hpp"
#include "delib/segmentation.hpp"
#include "delib/stats.hpp"
#include "delib/types.hpp"
#include "json.hpp"

// JSON mappings for the domain types. Objects use nlohmann's default
// (sorted-key) representation, so dump() output is canonical and byte-stable.

namespace delib {

using Json = nlohmann::json;

namespace detail {

template <typename T>
Json opt(const std::optional<T> &v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const Json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

template <typename E, typename F>
std::optional<E> get_enum(const Json &j, const char *key, F parse) {
  auto s = get_opt<std::string>(j, key);
  if (!s) return std::nullopt;
  auto v = parse(*s);
  if (!v) throw Error(ErrorCode::MalformedDocument, std::string("bad value for ") + key + ": " + *s);
  return v;
}

inline Json enum_opt(const std::optional<Role> &r) {
  return r ? Json(std::string(to_string(*r))) : Json(nullptr);
}

}  // namespace detail

namespace stats {

inline void to_json(nlohmann::json &j, const TestResult &t) {
  j = nlohmann::json{{"statistic", t.statistic},
                     {"p_value", t.p_value},
                     {"n_a", t.n_a},
                     {"n_b", t.n_b},
                     {"method", std::string(to_string(t.method))},
                     {"df", t.df ? nlohmann::json(*t.df) : nlohmann::json(nullptr)}};
}

inline void to_json(nlohmann::json &j, const EffectSize &e) {
  j = nlohmann::json{{"d", e.d}, {"mean_a", e.mean_a}, {"mean_b", e.mean_b}, {"pooled_sd", e.pooled_sd}};
}

}  // namespace stats

// --- ingest ---------------------------------------------------------------

inline void to_json(Json &j, const Statement &s) {
  j = Json{{"seq_index", s.seq_index},       {"timestamp", detail::opt(s.timestamp)},
           {"speaker_id", s.speaker_id},     {"text", s.text},
           {"role", detail::enum_opt(s.role)}, {"party", detail::opt(s.party)},
           {"state", detail::opt(s.state)},  {"majority", detail::opt(s.majority)}};
}

inline void from_json(const Json &j, Statement &s) {
  s.seq_index = j.at("seq_index").get<std::size_t>();
  s.timestamp = detail::get_opt<std::int64_t>(j, "timestamp");
  s.speaker_id = j.at("speaker_id").get<std::string>();
  s.text = j.at("text").get<std::string>();
  s.role = detail::get_enum<Role>(j, "role", role_from_string);
  s.party = detail::get_opt<std::string>(j, "party");
  s.state = detail::get_opt<std::string>(j, "state");
  s.majority = detail::get_opt<bool>(j, "majority");
}

inline void to_json(Json &j, const SpeakerRecord &s) {
  j = Json{{"speaker_id", s.speaker_id},     {"display_name", s.display_name},
           {"role", detail::enum_opt(s.role)}, {"party", detail::opt(s.party)},
           {"state", detail::opt(s.state)},  {"majority", detail::opt(s.majority)}};
}

inline void from_json(const Json &j, SpeakerRecord &s) {
  s.speaker_id = j.at("speaker_id").get<std::string>();
  s.display_name = j.at("display_name").get<std::string>();
  s.role = detail::get_enum<Role>(j, "role", role_from_string);
  s.party = detail::get_opt<std::string>(j, "party");
  s.state = detail::get_opt<std::string>(j, "state");
  s.majority = detail::get_opt<bool>(j, "majority");
}

inline void to_json(Json &j, const DiscourseEvent &e) {
  j = Json{{"id", e.id},
           {"title", e.title},
           {"venue", std::string(to_string(e.venue))},
           {"topic", detail::opt(e.topic)},
           {"statements", e.statements},
           {"speakers", e.speakers}};
}

inline void from_json(const Json &j, DiscourseEvent &e) {
  e.id = j.at("id").get<std::string>();
  e.title = j.at("title").get<std::string>();
  e.venue = detail::get_enum<Venue>(j, "venue", venue_from_string).value_or(Venue::other);
  e.topic = detail::get_opt<std::string>(j, "topic");
  e.statements = j.at("statements").get<std::vector<Statement>>();
  e.speakers = j.at("speakers").get<std::vector<SpeakerRecord>>();
}

// --- segmentation -----------------------------------------------------------

inline void to_json(Json &j, const ArgumentUnit &u) {
  j = Json{{"id", u.id},
           {"event_id", u.event_id},
           {"statement_seq", u.statement_seq},
           {"speaker_id", u.speaker_id},
           {"first_sent", u.first_sent},
           {"last_sent", u.last_sent},
           {"text", u.text},
           {"confidence", u.confidence},
           {"topic", detail::opt(u.topic)},
           {"stance", u.stance ? Json(std::string(to_string(*u.stance))) : Json(nullptr)},
           {"embedding", detail::opt(u.embedding)},
           {"arg_seq", u.arg_seq}};
}

inline void from_json(const Json &j, ArgumentUnit &u) {
  u.id = j.at("id").get<std::string>();
  u.event_id = j.at("event_id").get<std::string>();
  u.statement_seq = j.at("statement_seq").get<std::size_t>();
  u.speaker_id = j.at("speaker_id").get<std::string>();
  u.first_sent = j.at("first_sent").get<std::size_t>();
  u.last_sent = j.at("last_sent").get<std::size_t>();
  u.text = j.at("text").get<std::string>();
  u.confidence = j.at("confidence").get<double>();
  u.topic = detail::get_opt<std::string>(j, "topic");
  u.stance = detail::get_enum<Stance>(j, "stance", stance_from_string);
  u.embedding = detail::get_opt<Embedding>(j, "embedding");
  u.arg_seq = j.at("arg_seq").get<std::size_t>();
}

inline void to_json(Json &j, const WindowOutcome &w) {
  j = Json{{"statement_seq", w.statement_seq}, {"first_sent", w.first_sent},
           {"last_sent", w.last_sent},         {"label", std::string(to_string(w.label))},
           {"confidence", w.confidence},       {"survived", w.survived}};
}

inline void from_json(const Json &j, WindowOutcome &w) {
  w.statement_seq = j.at("statement_seq").get<std::size_t>();
  w.first_sent = j.at("first_sent").get<std::size_t>();
  w.last_sent = j.at("last_sent").get<std::size_t>();
  w.label = j.at("label").get<std::string>() == "Argument" ? ArgumentLabel::Argument : ArgumentLabel::NoArgument;
  w.confidence = j.at("confidence").get<double>();
  w.survived = j.at("survived").get<bool>();
}

// --- clustering -------------------------------------------------------------

inline void to_json(Json &j, const ClusteringParams &p) {
  j = Json{{"method", std::string(to_string(p.method))},
           {"similarity_threshold", p.similarity_threshold},
           {"min_community_size", p.min_community_size},
           {"density_min_pts", p.density_min_pts},
           {"density_eps", p.density_eps}};
}

inline void from_json(const Json &j, ClusteringParams &p) {
  p = ClusteringParams{};
  if (auto m = detail::get_enum<ClusteringMethod>(j, "method", clustering_method_from_string)) p.method = *m;
  if (auto v = detail::get_opt<double>(j, "similarity_threshold")) p.similarity_threshold = *v;
  if (auto v = detail::get_opt<std::size_t>(j, "min_community_size")) p.min_community_size = *v;
  if (auto v = detail::get_opt<std::size_t>(j, "density_min_pts")) p.density_min_pts = *v;
  if (auto v = detail::get_opt<double>(j, "density_eps")) p.density_eps = *v;
}

inline void to_json(Json &j, const Narrative &n) {
  j = Json{{"cluster_label", n.cluster_label}, {"members", n.members},     {"centroid", n.centroid},
           {"summary", detail::opt(n.summary)}, {"color_index", n.color_index}};
}

inline void from_json(const Json &j, Narrative &n) {
  n.cluster_label = j.at("cluster_label").get<int>();
  n.members = j.at("members").get<std::vector<std::size_t>>();
  n.centroid = j.at("centroid").get<Embedding>();
  n.summary = detail::get_opt<std::string>(j, "summary");
  n.color_index = j.at("color_index").get<int>();
}

// --- metrics ----------------------------------------------------------------

inline void to_json(Json &j, const DeliberationProfile &p) {
  j = Json{{"n_statements", p.n_statements},
           {"n_arguments", p.n_arguments},
           {"n_debaters", p.n_debaters},
           {"n_clusters", p.n_clusters},
           {"n_outliers", p.n_outliers},
           {"narrative_diversity", p.narrative_diversity},
           {"coherence", p.coherence},
           {"narrative_distinctness", p.narrative_distinctness},
           {"debater_diversity", p.debater_diversity},
           {"argumentativeness", p.argumentativeness},
           {"structure", p.structure},
           {"participation", p.participation},
           {"dis", p.dis},
           {"alpha", p.alpha},
           {"beta", p.beta},
           {"clustering_method", std::string(to_string(p.clustering_method))},
           {"warnings", p.warnings},
           {"raw_narrative_diversity", p.raw.narrative_diversity},
           {"raw_narrative_distinctness", p.raw.narrative_distinctness},
           {"raw_debater_diversity", p.raw.debater_diversity},
           {"raw_argumentativeness", p.raw.argumentativeness}};
}

inline void from_json(const Json &j, DeliberationProfile &p) {
  p.n_statements = j.at("n_statements").get<std::size_t>();
  p.n_arguments = j.at("n_arguments").get<std::size_t>();
  p.n_debaters = j.at("n_debaters").get<std::size_t>();
  p.n_clusters = j.at("n_clusters").get<std::size_t>();
  p.n_outliers = j.at("n_outliers").get<std::size_t>();
  p.narrative_diversity = j.at("narrative_diversity").get<double>();
  p.coherence = j.at("coherence").get<double>();
  p.narrative_distinctness = j.at("narrative_distinctness").get<double>();
  p.debater_diversity = j.at("debater_diversity").get<double>();
  p.argumentativeness = j.at("argumentativeness").get<double>();
  p.structure = j.at("structure").get<double>();
  p.participation = j.at("participation").get<double>();
  p.dis = j.at("dis").get<double>();
  p.alpha = j.at("alpha").get<double>();
  p.beta = j.at("beta").get<double>();
  p.clustering_method =
      detail::get_enum<ClusteringMethod>(j, "clustering_method", clustering_method_from_string)
          .value_or(ClusteringMethod::threshold_community);
  p.warnings = j.at("warnings").get<std::vector<std::string>>();
  p.raw.narrative_diversity = j.at("raw_narrative_diversity").get<double>();
  p.raw.narrative_distinctness = j.at("raw_narrative_distinctness").get<double>();
  p.raw.debater_diversity = j.at("raw_debater_diversity").get<double>();
  p.raw.argumentativeness = j.at("raw_argumentativeness").get<double>();
}

// --- evolution --------------------------------------------------------------

inline void to_json(Json &j, const EvolutionParams &p) {
  j = Json{{"w_min", p.w_min}, {"w_max", p.w_max}, {"min_arguments", p.min_arguments}};
}

inline void from_json(const Json &j, EvolutionParams &p) {
  p = EvolutionParams{};
  if (auto v = detail::get_opt<std::size_t>(j, "w_min")) p.w_min = *v;
  if (auto v = detail::get_opt<std::size_t>(j, "w_max")) p.w_max = *v;
  if (auto v = detail::get_opt<std::size_t>(j, "min_arguments")) p.min_arguments = *v;
}

inline void to_json(Json &j, const EvolutionSeries &s) {
  j = Json{{"n", s.n},
           {"w", s.w},
           {"positions", s.positions},
           {"raw", s.raw},
           {"smoothed", s.smoothed},
           {"slope", s.slope},
           {"volatility", s.volatility},
           {"phase_volatility", s.phase_volatility},
           {"warnings", s.warnings}};
}

inline void from_json(const Json &j, EvolutionSeries &s) {
  s.n = j.at("n").get<std::size_t>();
  s.w = j.at("w").get<std::size_t>();
  s.positions = j.at("positions").get<std::vector<std::size_t>>();
  s.raw = j.at("raw").get<std::vector<double>>();
  s.smoothed = j.at("smoothed").get<std::vector<double>>();
  s.slope = j.at("slope").get<double>();
  s.volatility = j.at("volatility").get<double>();
  s.phase_volatility = j.at("phase_volatility").get<std::array<double, 3>>();
  s.warnings = j.at("warnings").get<std::vector<std::string>>();
}

// --- compare ----------------------------------------------------------------

inline void to_json(Json &j, const ComponentComparison &c) {
  j = Json{{"mean_a", c.mean_a},
           {"mean_b", c.mean_b},
           {"mean_diff", c.mean_diff},
           {"welch", detail::opt(c.welch)},
           {"effect", detail::opt(c.effect)}};
}

inline void to_json(Json &j, const EvolutionComparison &e) {
  j = Json{{"ks", detail::opt(e.ks)},
           {"effect", detail::opt(e.effect)},
           {"slope_a", e.slope_a},
           {"slope_b", e.slope_b},
           {"volatility_a", e.volatility_a},
           {"volatility_b", e.volatility_b},
           {"phase_volatility_a", e.phase_volatility_a},
           {"phase_volatility_b", e.phase_volatility_b}};
}

inline void to_json(Json &j, const ComparisonReport &r) {
  j = Json{{"group_a", r.group_a},
           {"group_b", r.group_b},
           {"per_component", r.per_component},
           {"evolution", r.evolution},
           {"warnings", r.warnings}};
}

inline void to_json(Json &j, const DyadCell &c) {
  j = Json{{"party", c.party},
           {"majority", c.majority},
           {"mean_similarity", c.mean_similarity},
           {"n_dyads", c.n_dyads}};
}

inline void to_json(Json &j, const PartyDelta &d) {
  j = Json{{"party", d.party},
           {"majority_minus_minority", detail::opt(d.majority_minus_minority)},
           {"welch", detail::opt(d.welch)}};
}

inline void to_json(Json &j, const DyadicSimilarityReport &r) {
  j = Json{{"groups", r.groups}, {"deltas", r.deltas}, {"warnings", r.warnings}};
}

inline void to_json(Json &j, const ClustererEventResult &e) {
  j = Json{{"event_id", e.event_id}, {"profile_a", e.profile_a}, {"profile_b", e.profile_b}};
}

inline void to_json(Json &j, const FeatureDelta &f) {
  j = Json{{"mean_diff", f.mean_diff}, {"diffs", f.diffs}, {"test", f.test}};
}

inline void to_json(Json &j, const ClustererComparisonReport &r) {
  j = Json{{"events", r.events}, {"features", r.features}};
}


}  // namespace delib

#endif  // DELIB_SERIALIZE_HPP_
