// Seeded synthetic inputs shared by the unit and acceptance tests.
#ifndef DELIB_TESTS_FIXTURES_HPP_
#define DELIB_TESTS_FIXTURES_HPP_

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "delib/csv.hpp"
#include "delib/vector_ops.hpp"
#include "json.hpp"

namespace fixtures {

using delib::Embedding;

inline Embedding random_unit(std::mt19937_64 &rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Embedding v(dim);
  for (auto &x : v) x = n(rng);
  delib::normalize(v);
  return v;
}

/// `center` plus per-coordinate Gaussian noise, renormalized.
inline Embedding jitter(std::mt19937_64 &rng, const Embedding &center, double noise) {
  std::normal_distribution<double> n(0.0, noise);
  Embedding v = center;
  for (auto &x : v) x += n(rng);
  delib::normalize(v);
  return v;
}

/// Clustered point cloud: `k` random centers, points jittered around a
/// randomly chosen center; some points are isolated random directions.
inline std::vector<Embedding> clustered_cloud(std::mt19937_64 &rng, std::size_t n, std::size_t dim, std::size_t k,
                                              double noise, double isolated_fraction) {
  std::vector<Embedding> centers;
  for (std::size_t i = 0; i < k; ++i) centers.push_back(random_unit(rng, dim));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::vector<Embedding> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (u(rng) < isolated_fraction) out.push_back(random_unit(rng, dim));
    else out.push_back(jitter(rng, centers[pick(rng)], noise));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic transcripts

inline const std::vector<std::string> &topic_words() {
  static const std::vector<std::string> w = {
      "broadband", "tariffs", "pesticides", "labeling", "wetlands", "pensions", "vaccines", "subsidies",
      "drought",   "housing", "pipelines",  "fisheries", "privacy", "tuition",  "wildfires", "medicare"};
  return w;
}

inline const std::vector<std::string> &claim_templates() {
  static const std::vector<std::string> t = {
      "We should fund {w} programs because rural families depend on them.",
      "The agency must regulate {w} since the evidence shows real harm.",
      "Congress should oppose new {w} rules due to the cost to farmers.",
      "Therefore the committee must support {w} research in every state.",
      "States ban {w} practices as a result of repeated failures.",
      "Thus the data on {w} is clear and we should act now.",
  };
  return t;
}

inline const std::vector<std::string> &filler_templates() {
  static const std::vector<std::string> t = {
      "Thank you for the time today.",
      "I yield back the balance of my time.",
      "The witness described the {w} situation in detail.",
      "Our office received many letters about {w}.",
      "Mr. Chairman, I appreciate the opportunity to testify.",
      "Let me turn to the next question about {w}.",
  };
  return t;
}

inline std::string fill(std::string tpl, const std::string &word) {
  auto pos = tpl.find("{w}");
  if (pos != std::string::npos) tpl.replace(pos, 3, word);
  return tpl;
}

struct SpeakerSpec {
  std::string name;
  std::string role;
  std::string party;
  std::string state;
  std::string majority;
};

inline std::vector<SpeakerSpec> hearing_speakers(std::size_t n_members, std::size_t n_witnesses) {
  static const char *states[] = {"CA", "TX", "IA", "NY", "OH", "GA", "WA", "MN"};
  std::vector<SpeakerSpec> s;
  for (std::size_t i = 0; i < n_members; ++i) {
    const bool dem = i % 2 == 0;
    s.push_back({"Rep. Member" + std::to_string(i), "member", dem ? "D" : "R", states[i % 8], dem ? "true" : "false"});
  }
  for (std::size_t i = 0; i < n_witnesses; ++i) s.push_back({"Witness " + std::to_string(i), "witness", "", "", ""});
  return s;
}

/// Transcript CSV with `n` statements. Roughly `argument_share` of the
/// statements contain argumentative cue words; statements have 1-4
/// sentences. Texts may contain commas, quotes and newlines to exercise
/// CSV quoting.
inline std::string transcript_csv(std::size_t n, std::uint64_t seed, double argument_share = 0.5,
                                  std::size_t n_members = 6, std::size_t n_witnesses = 3,
                                  const std::string &title = "Synthetic hearing") {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto speakers = hearing_speakers(n_members, n_witnesses);
  std::uniform_int_distribution<std::size_t> who(0, speakers.size() - 1);
  std::uniform_int_distribution<std::size_t> word(0, topic_words().size() - 1);
  std::uniform_int_distribution<std::size_t> claim(0, claim_templates().size() - 1);
  std::uniform_int_distribution<std::size_t> filler(0, filler_templates().size() - 1);
  std::uniform_int_distribution<int> nsent(1, 4);

  std::string out;
  delib::csv::append_row(out, {"speaker", "text", "timestamp", "role", "party", "state", "majority", "title"});
  std::int64_t ts = 1'600'000'000;
  for (std::size_t i = 0; i < n; ++i) {
    const auto &sp = speakers[who(rng)];
    const bool argumentative = u(rng) < argument_share;
    const int s = nsent(rng);
    std::string text;
    for (int k = 0; k < s; ++k) {
      if (!text.empty()) text += (u(rng) < 0.05 ? "\n" : " ");
      const auto &w = topic_words()[word(rng)];
      if (argumentative && k == s / 2) text += fill(claim_templates()[claim(rng)], w);
      else text += fill(filler_templates()[filler(rng)], w);
    }
    if (u(rng) < 0.05) text += " He said, \"that is wrong, plainly.\"";
    ts += 1 + static_cast<std::int64_t>(u(rng) * 90);
    delib::csv::append_row(out, {sp.name, text, std::to_string(ts), sp.role, sp.party, sp.state, sp.majority,
                                 i == 0 ? title : ""});
  }
  return out;
}

/// Thread document with `n` comments, nested replies up to depth 4, and
/// shuffled timestamps (with some ties).
inline std::string thread_json(std::size_t n, std::uint64_t seed, const std::string &title = "Synthetic thread") {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> word(0, topic_words().size() - 1);
  std::uniform_int_distribution<std::size_t> claim(0, claim_templates().size() - 1);
  std::uniform_int_distribution<std::size_t> filler(0, filler_templates().size() - 1);
  std::uniform_int_distribution<int> ts(0, static_cast<int>(n));

  nlohmann::json top = nlohmann::json::array();
  std::size_t made = 0;
  auto make = [&](std::size_t i) {
    const auto &w = topic_words()[word(rng)];
    std::string body = u(rng) < 0.5 ? fill(claim_templates()[claim(rng)], w) : fill(filler_templates()[filler(rng)], w);
    return nlohmann::json{{"id", "c" + std::to_string(i)},
                          {"author", "user" + std::to_string(i % 97)},
                          {"body", body},
                          {"created_utc", 1'700'000'000 + ts(rng)},
                          {"replies", nlohmann::json::array()}};
  };
  // Iteratively build a forest: each new comment is top-level or a reply
  // to a recent comment, keeping depth <= 4.
  std::vector<std::pair<nlohmann::json::json_pointer, int>> open;
  while (made < n) {
    if (open.empty() || u(rng) < 0.3) {
      top.push_back(make(made++));
      open.assign(1, {nlohmann::json::json_pointer("/" + std::to_string(top.size() - 1)), 1});
      continue;
    }
    auto [ptr, depth] = open.back();
    if (depth >= 4) {
      open.pop_back();
      continue;
    }
    auto &replies = top[ptr]["replies"];
    replies.push_back(make(made++));
    open.push_back({ptr / "replies" / std::to_string(replies.size() - 1), depth + 1});
  }
  return nlohmann::json{{"title", title}, {"comments", top}}.dump();
}

/// Unique scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string &tag) {
  static std::uint64_t counter = 0;
  auto base = std::filesystem::temp_directory_path() /
              ("delib-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);
  return base;
}

}  // namespace fixtures

#endif  // DELIB_TESTS_FIXTURES_HPP_
