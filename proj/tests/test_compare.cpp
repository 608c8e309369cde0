#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "delib/compare.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace delib;

namespace {

EventAnalysis analysis_with(const std::string &id, double level, std::mt19937_64 &rng) {
  EventAnalysis e;
  e.event_id = id;
  auto &p = e.profile;
  p.n_arguments = 10;
  p.narrative_diversity = p.coherence = p.narrative_distinctness = level;
  p.debater_diversity = p.argumentativeness = level;
  reweight(p, 0.5, 0.5);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  for (int i = 0; i < 8; ++i) e.evolution.smoothed.push_back(level + u(rng));
  e.evolution.slope = level;
  e.evolution.volatility = level / 2;
  return e;
}

struct DyadFixture {
  DiscourseEvent event;
  std::vector<ArgumentUnit> units;

  void add(const std::string &speaker, std::optional<Role> role, std::optional<std::string> party,
           std::optional<bool> majority, Embedding e) {
    Statement s;
    s.seq_index = event.statements.size();
    s.speaker_id = speaker;
    s.text = "text";
    s.role = role;
    s.party = std::move(party);
    s.majority = majority;
    event.statements.push_back(s);
    ArgumentUnit u;
    u.id = "a" + std::to_string(units.size());
    u.statement_seq = s.seq_index;
    u.speaker_id = speaker;
    u.embedding = std::move(e);
    units.push_back(std::move(u));
  }

  EventArguments view() const { return {&event, &units}; }
};

ErrorCode code_of(auto &&f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  return ErrorCode::InvariantViolation;
}

}  // namespace

TEST_CASE("self comparison gives zero differences", "[compare]") {
  std::mt19937_64 rng(1);
  std::vector<EventAnalysis> g;
  for (int i = 0; i < 5; ++i) g.push_back(analysis_with("e" + std::to_string(i), 0.2 + 0.1 * i, rng));
  auto r = compare_groups("a", g, "a", g);
  REQUIRE(r.per_component.size() == 8);
  for (const auto &[name, c] : r.per_component) {
    CHECK(c.mean_diff == 0.0);
    REQUIRE(c.effect);
    CHECK(c.effect->d == 0.0);
  }
  REQUIRE(r.evolution.ks);
  CHECK(r.evolution.ks->statistic == 0.0);
}

TEST_CASE("extreme groups differ by one", "[compare]") {
  std::mt19937_64 rng(2);
  std::vector<EventAnalysis> a, b;
  for (int i = 0; i < 3; ++i) {
    a.push_back(analysis_with("a", 1.0, rng));
    b.push_back(analysis_with("b", 0.0, rng));
  }
  auto r = compare_groups("hi", a, "lo", b);
  CHECK(r.per_component.at("dis").mean_diff == 1.0);
  CHECK(r.per_component.at("structure").mean_diff == 1.0);
  CHECK(r.evolution.slope_a == 1.0);
  CHECK(r.evolution.ks->statistic == 1.0);
}

TEST_CASE("effect size of normal groups", "[compare]") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> ga(0.6, 0.1), gb(0.4, 0.1);
  std::vector<EventAnalysis> a, b;
  std::vector<double> da, db;
  for (int i = 0; i < 30; ++i) {
    a.push_back(analysis_with("a", 0, rng));
    b.push_back(analysis_with("b", 0, rng));
    a.back().profile.dis = ga(rng);
    b.back().profile.dis = gb(rng);
    da.push_back(a.back().profile.dis);
    db.push_back(b.back().profile.dis);
  }
  auto r = compare_groups("a", a, "b", b);
  const auto &dis = r.per_component.at("dis");
  CHECK(dis.effect->d == Catch::Approx(2.0).margin(0.5));
  CHECK(std::abs(dis.effect->d - oracle::cohens_d(da, db)) <= 1e-9);
  CHECK(std::abs(dis.welch->statistic - oracle::welch_t(da, db)) <= 1e-9);
}

TEST_CASE("single-event groups skip tests with a warning", "[compare]") {
  std::mt19937_64 rng(4);
  std::vector<EventAnalysis> a = {analysis_with("a", 0.3, rng)}, b = {analysis_with("b", 0.5, rng)};
  auto r = compare_groups("a", a, "b", b);
  CHECK_FALSE(r.per_component.at("dis").welch);
  REQUIRE_FALSE(r.warnings.empty());
  CHECK(r.warnings[0].rfind("GroupTooSmall", 0) == 0);
  CHECK(r.evolution.ks);
  CHECK(code_of([&] { compare_groups("a", a, "b", std::vector<EventAnalysis>{}); }) == ErrorCode::GroupTooSmall);
}

TEST_CASE("per-event evolution unit uses one value per event", "[compare]") {
  std::mt19937_64 rng(5);
  std::vector<EventAnalysis> a, b;
  for (int i = 0; i < 4; ++i) {
    a.push_back(analysis_with("a", 0.3, rng));
    b.push_back(analysis_with("b", 0.6, rng));
  }
  auto pooled = compare_groups("a", a, "b", b);
  auto per_event = compare_groups("a", a, "b", b, {EvolutionUnit::per_event});
  CHECK(pooled.evolution.ks->n_a == 32);
  CHECK(per_event.evolution.ks->n_a == 4);
}

TEST_CASE("dyadic similarity with identical arguments", "[compare]") {
  DyadFixture f;
  Embedding v = {0.6, 0.8};
  f.add("m1", Role::member, "D", true, v);
  f.add("m2", Role::member, "D", false, v);
  f.add("m3", Role::member, "D", true, v);
  f.add("m4", Role::member, "D", false, v);
  f.add("w1", Role::witness, std::nullopt, std::nullopt, v);
  f.add("w2", Role::witness, std::nullopt, std::nullopt, v);
  std::vector<EventArguments> ev = {f.view()};
  auto r = dyadic_member_witness_similarity(ev);
  REQUIRE(r.groups.size() == 2);
  for (const auto &g : r.groups) {
    CHECK(g.mean_similarity == Catch::Approx(1.0).margin(1e-15));
    CHECK(g.n_dyads == 4);
  }
  REQUIRE(r.deltas.size() == 1);
  CHECK(*r.deltas[0].majority_minus_minority == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("single orthogonal dyad", "[compare]") {
  DyadFixture f;
  f.add("m", Role::member, "R", true, {1, 0});
  f.add("w", Role::witness, std::nullopt, std::nullopt, {0, 1});
  std::vector<EventArguments> ev = {f.view()};
  auto r = dyadic_member_witness_similarity(ev);
  REQUIRE(r.groups.size() == 1);
  CHECK(r.groups[0].n_dyads == 1);
  CHECK(r.groups[0].mean_similarity == 0.0);
  CHECK_FALSE(r.deltas[0].majority_minus_minority);
}

TEST_CASE("dyadic deltas match a pairwise oracle", "[compare]") {
  std::mt19937_64 rng(6);
  auto witness_dir = fixtures::random_unit(rng, 16);
  std::vector<DyadFixture> fx(4);
  for (auto &f : fx) {
    for (int i = 0; i < 3; ++i) f.add("w" + std::to_string(i), Role::witness, std::nullopt, std::nullopt,
                                      fixtures::jitter(rng, witness_dir, 0.1));
    for (int i = 0; i < 4; ++i) f.add("maj" + std::to_string(i), Role::member, "D", true,
                                      fixtures::jitter(rng, witness_dir, 0.2));
    for (int i = 0; i < 4; ++i) f.add("min" + std::to_string(i), Role::member, "D", false,
                                      fixtures::random_unit(rng, 16));
    f.add("x", Role::member, "R", std::nullopt, fixtures::random_unit(rng, 16));  // no majority flag
  }
  std::vector<EventArguments> ev;
  for (const auto &f : fx) ev.push_back(f.view());
  auto r = dyadic_member_witness_similarity(ev);

  std::vector<double> maj, min;
  for (const auto &f : fx)
    for (const auto &m : f.units)
      for (const auto &w : f.units) {
        const auto &ms = f.event.statements[m.statement_seq];
        const auto &ws = f.event.statements[w.statement_seq];
        if (ms.role != Role::member || !ms.majority || ws.role != Role::witness) continue;
        (*ms.majority ? maj : min).push_back(oracle::cosine(*m.embedding, *w.embedding));
      }
  REQUIRE(r.groups.size() == 2);
  CHECK(r.groups[0].n_dyads == min.size());
  CHECK(r.groups[1].n_dyads == maj.size());
  CHECK(maj.size() == 4 * 4 * 3);
  const double delta = oracle::mean(maj) - oracle::mean(min);
  CHECK(delta > 0);
  CHECK(std::abs(*r.deltas[0].majority_minus_minority - delta) <= 1e-9);
  CHECK(std::abs(r.deltas[0].welch->statistic - oracle::welch_t(maj, min)) <= 1e-9);
  CHECK(r.warnings.size() == 1);

  auto per_event = dyadic_member_witness_similarity(ev, DyadUnit::event_mean);
  CHECK(per_event.deltas[0].welch->n_a == 4);
}

TEST_CASE("dyadic errors", "[compare]") {
  DyadFixture none;
  none.add("a", std::nullopt, std::nullopt, std::nullopt, {1, 0});
  std::vector<EventArguments> ev = {none.view()};
  CHECK(code_of([&] { dyadic_member_witness_similarity(ev); }) == ErrorCode::MissingRoleMetadata);

  DyadFixture members_only;
  members_only.add("m", Role::member, "D", true, {1, 0});
  ev = {members_only.view()};
  CHECK(code_of([&] { dyadic_member_witness_similarity(ev); }) == ErrorCode::NoDyads);
}

namespace {

ClustererInput clusterer_input(std::mt19937_64 &rng, const std::string &id) {
  ClustererInput in;
  in.event_id = id;
  std::uniform_int_distribution<std::size_t> nd(6, 30);
  in.embeddings = fixtures::clustered_cloud(rng, nd(rng), 12, 3, 0.25, 0.2);
  for (std::size_t i = 0; i < in.embeddings.size(); ++i) in.speakers.push_back("s" + std::to_string(i % 5));
  in.n_statements = in.embeddings.size() + 7;
  return in;
}

}  // namespace

TEST_CASE("identical clusterers give zero differences", "[compare]") {
  std::mt19937_64 rng(7);
  std::vector<ClustererInput> ev;
  for (int i = 0; i < 5; ++i) ev.push_back(clusterer_input(rng, "e" + std::to_string(i)));
  ClusteringParams p;
  auto r = compare_clusterers(ev, p, p);
  for (const auto &[name, f] : r.features) {
    CHECK(f.mean_diff == 0.0);
    for (double d : f.diffs) CHECK(d == 0.0);
  }
}

TEST_CASE("clusterer comparison matches direct recomputation", "[compare]") {
  std::mt19937_64 rng(8);
  std::vector<ClustererInput> ev;
  for (int i = 0; i < 20; ++i) ev.push_back(clusterer_input(rng, "e" + std::to_string(i)));
  ClusteringParams a;
  ClusteringParams b;
  b.method = ClusteringMethod::density;
  auto r = compare_clusterers(ev, a, b);
  std::vector<double> diffs;
  for (const auto &in : ev) {
    auto la = oracle::threshold_labels(in.embeddings, a.similarity_threshold, a.min_community_size);
    auto lb = oracle::density_labels(in.embeddings, b.density_eps, b.density_min_pts, b.min_community_size);
    auto structure = [&](const std::vector<int> &labels) {
      int k = 0;
      std::size_t noise = 0;
      for (int l : labels) {
        k = std::max(k, l + 1);
        noise += l < 0;
      }
      std::vector<oracle::Vec> centroids(k, oracle::Vec(12, 0.0));
      std::vector<std::size_t> sizes(k, 0);
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] >= 0) {
          ++sizes[labels[i]];
          for (std::size_t d = 0; d < 12; ++d) centroids[labels[i]][d] += in.embeddings[i][d];
        }
      for (int c = 0; c < k; ++c)
        for (auto &x : centroids[c]) x /= static_cast<double>(sizes[c]);
      return oracle::dis(k, labels.size(), noise, 5, in.n_statements, centroids, 0.5, 0.5).structure;
    };
    diffs.push_back(structure(la) - structure(lb));
  }
  CHECK(std::abs(r.features.at("structure").mean_diff - oracle::mean(diffs)) <= 1e-9);
  for (std::size_t i = 0; i < diffs.size(); ++i)
    CHECK(std::abs(r.features.at("structure").diffs[i] - diffs[i]) <= 1e-9);
  CHECK(r.events.size() == 20);
}

TEST_CASE("clusterer comparison needs two events", "[compare]") {
  std::mt19937_64 rng(9);
  std::vector<ClustererInput> ev = {clusterer_input(rng, "e")};
  CHECK(code_of([&] { compare_clusterers(ev, {}, {}); }) == ErrorCode::GroupTooSmall);
}
