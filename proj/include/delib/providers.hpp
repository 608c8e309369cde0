#ifndef DELIB_PROVIDERS_HPP_
#define DELIB_PROVIDERS_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "delib/digest.hpp"
#include "delib/error.hpp"
#include "delib/text.hpp"
#include "delib/vector_ops.hpp"
#include "json.hpp"

namespace delib {

enum class ArgumentLabel { Argument, NoArgument };
enum class Stance { favor, against, none };

constexpr std::string_view to_string(ArgumentLabel l) {
  return l == ArgumentLabel::Argument ? "Argument" : "NoArgument";
}

constexpr std::string_view to_string(Stance s) {
  switch (s) {
    case Stance::favor: return "favor";
    case Stance::against: return "against";
    case Stance::none: return "none";
  }
  return "none";
}

inline std::optional<Stance> stance_from_string(std::string_view s) {
  if (s == "favor") return Stance::favor;
  if (s == "against") return Stance::against;
  if (s == "none") return Stance::none;
  return std::nullopt;
}

struct ClassifierVerdict {
  ArgumentLabel label = ArgumentLabel::NoArgument;
  double confidence = 0.5;

  bool operator==(const ClassifierVerdict &) const = default;
};

struct StanceVerdict {
  Stance stance = Stance::none;
  std::string topic;

  bool operator==(const StanceVerdict &) const = default;
};

/// Confidence strictly above this marks a window as an argument.
inline constexpr double kArgumentThreshold = 0.5;

inline const std::vector<std::string> &default_cue_list() {
  static const std::vector<std::string> cues = {
      "because", "therefore", "since",  "thus",     "hence", "consequently",
      "should",  "must",      "evidence", "so that", "due to", "as a result"};
  return cues;
}

enum class ProviderKind { deterministic, remote };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::deterministic;
  std::optional<std::string> endpoint;
  std::size_t batch_size = 32;
  int timeout_ms = 30000;
  std::vector<std::string> cue_list = default_cue_list();
  std::string seed_salt;
  std::size_t dim = 768;
  std::size_t max_in_flight = 4;

  void validate() const {
    if ((kind == ProviderKind::remote) != endpoint.has_value())
      throw Error(ErrorCode::InvalidConfig, "endpoint must be set iff kind is remote");
    if (batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch_size must be positive");
    if (timeout_ms <= 0) throw Error(ErrorCode::InvalidConfig, "timeout_ms must be positive");
    if (dim == 0) throw Error(ErrorCode::InvalidConfig, "dim must be positive");
    if (max_in_flight == 0) throw Error(ErrorCode::InvalidConfig, "max_in_flight must be positive");
  }
};

inline void to_json(nlohmann::json &j, const ProviderConfig &c) {
  j = nlohmann::json{{"kind", c.kind == ProviderKind::remote ? "remote" : "deterministic"},
                     {"batch_size", c.batch_size},
                     {"timeout_ms", c.timeout_ms},
                     {"cue_list", c.cue_list},
                     {"seed_salt", c.seed_salt},
                     {"dim", c.dim},
                     {"max_in_flight", c.max_in_flight}};
  j["endpoint"] = c.endpoint ? nlohmann::json(*c.endpoint) : nlohmann::json(nullptr);
}

inline void from_json(const nlohmann::json &j, ProviderConfig &c) {
  c = ProviderConfig{};
  if (auto it = j.find("kind"); it != j.end()) {
    auto k = it->get<std::string>();
    if (k == "remote") c.kind = ProviderKind::remote;
    else if (k == "deterministic") c.kind = ProviderKind::deterministic;
    else throw Error(ErrorCode::InvalidConfig, "unknown provider kind '" + k + "'");
  }
  if (auto it = j.find("endpoint"); it != j.end() && !it->is_null())
    c.endpoint = it->get<std::string>();
  if (auto it = j.find("batch_size"); it != j.end()) c.batch_size = it->get<std::size_t>();
  if (auto it = j.find("timeout_ms"); it != j.end()) c.timeout_ms = it->get<int>();
  if (auto it = j.find("cue_list"); it != j.end()) c.cue_list = it->get<std::vector<std::string>>();
  if (auto it = j.find("seed_salt"); it != j.end()) c.seed_salt = it->get<std::string>();
  if (auto it = j.find("dim"); it != j.end()) c.dim = it->get<std::size_t>();
  if (auto it = j.find("max_in_flight"); it != j.end()) c.max_in_flight = it->get<std::size_t>();
}

/// Configuration for the three provider roles. The classifier role also
/// serves topic extraction and stance detection.
struct ProviderSuiteConfig {
  ProviderConfig classifier;
  ProviderConfig embedder;
  ProviderConfig summarizer;

  void validate() const {
    classifier.validate();
    embedder.validate();
    summarizer.validate();
  }

  /// Applies DELIB_CLASSIFIER_URL / DELIB_EMBEDDER_URL /
  /// DELIB_SUMMARIZER_URL (switching that role to remote) and
  /// DELIB_PROVIDER_TIMEOUT_MS.
  void apply_env() {
    auto set_url = [](ProviderConfig &c, const char *var) {
      if (const char *v = std::getenv(var); v && *v) {
        c.kind = ProviderKind::remote;
        c.endpoint = std::string(v);
      }
    };
    set_url(classifier, "DELIB_CLASSIFIER_URL");
    set_url(embedder, "DELIB_EMBEDDER_URL");
    set_url(summarizer, "DELIB_SUMMARIZER_URL");
    if (const char *v = std::getenv("DELIB_PROVIDER_TIMEOUT_MS"); v && *v) {
      int ms = std::atoi(v);
      if (ms <= 0) throw Error(ErrorCode::InvalidConfig, "DELIB_PROVIDER_TIMEOUT_MS must be positive");
      classifier.timeout_ms = embedder.timeout_ms = summarizer.timeout_ms = ms;
    }
  }
};

inline void to_json(nlohmann::json &j, const ProviderSuiteConfig &c) {
  j = nlohmann::json{{"classifier", c.classifier}, {"embedder", c.embedder},
                     {"summarizer", c.summarizer}};
}

inline void from_json(const nlohmann::json &j, ProviderSuiteConfig &c) {
  c = ProviderSuiteConfig{};
  if (auto it = j.find("classifier"); it != j.end()) c.classifier = it->get<ProviderConfig>();
  if (auto it = j.find("embedder"); it != j.end()) c.embedder = it->get<ProviderConfig>();
  if (auto it = j.find("summarizer"); it != j.end()) c.summarizer = it->get<ProviderConfig>();
}

// ---------------------------------------------------------------------------
// Interfaces. Implementations hold no per-call mutable state and may be
// shared across threads.

class ArgumentModel {
 public:
  virtual ~ArgumentModel() = default;
  virtual std::vector<ClassifierVerdict> classify_batch(std::span<const std::string> texts) const = 0;
  virtual std::string extract_topic(std::string_view text) const = 0;
  virtual StanceVerdict classify_stance(std::string_view text, std::string_view topic) const = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<Embedding> embed_batch(std::span<const std::string> texts) const = 0;
};

class Summarizer {
 public:
  virtual ~Summarizer() = default;
  virtual std::string summarize_cluster(std::span<const std::string> texts) const = 0;
};

struct Providers {
  std::shared_ptr<const ArgumentModel> classifier;
  std::shared_ptr<const Embedder> embedder;
  std::shared_ptr<const Summarizer> summarizer;
  ProviderSuiteConfig config;
};

namespace detail {

inline void require_texts(std::span<const std::string> texts) {
  for (std::size_t i = 0; i < texts.size(); ++i)
    if (text::trim(texts[i]).empty())
      throw Error(ErrorCode::PreconditionViolation, "text " + std::to_string(i) + " is empty");
}

inline std::size_t count_occurrences(const std::vector<std::string> &hay,
                                     const std::vector<std::string> &needle) {
  if (needle.empty() || needle.size() > hay.size()) return 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i)
    if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i)))
      ++hits;
  return hits;
}

inline const std::unordered_set<std::string> &stopwords() {
  static const std::unordered_set<std::string> words = {
      "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and",
      "any", "are", "aren't", "as", "at", "be", "because", "been", "before", "being",
      "below", "between", "both", "but", "by", "can", "can't", "cannot", "could",
      "couldn't", "did", "didn't", "do", "does", "doesn't", "doing", "don't", "down",
      "during", "each", "few", "for", "from", "further", "had", "hadn't", "has",
      "hasn't", "have", "haven't", "having", "he", "he'd", "he'll", "he's", "her",
      "here", "here's", "hers", "herself", "him", "himself", "his", "how", "how's", "i",
      "i'd", "i'll", "i'm", "i've", "if", "in", "into", "is", "isn't", "it", "it's",
      "its", "itself", "just", "let's", "me", "more", "most", "must", "mustn't", "my",
      "myself", "no", "nor", "not", "now", "of", "off", "on", "once", "only", "or",
      "other", "ought", "our", "ours", "ourselves", "out", "over", "own", "same",
      "shall", "shan't", "she", "she'd", "she'll", "she's", "should", "shouldn't", "so",
      "some", "such", "than", "that", "that's", "the", "their", "theirs", "them",
      "themselves", "then", "there", "there's", "these", "they", "they'd", "they'll",
      "they're", "they've", "this", "those", "through", "to", "too", "under", "until",
      "up", "very", "was", "wasn't", "we", "we'd", "we'll", "we're", "we've", "were",
      "weren't", "what", "what's", "when", "when's", "where", "where's", "which",
      "while", "who", "who's", "whom", "why", "why's", "will", "with", "won't", "would",
      "wouldn't", "yes", "you", "you'd", "you'll", "you're", "you've", "your", "yours",
      "yourself", "yourselves"};
  return words;
}

}  // namespace detail

/// Rule-based stand-in for the argument model:
///   confidence = min(0.95, 0.5 + 0.1 * cue_hits), Argument iff cue_hits >= 1
/// where cue_hits counts token-sequence occurrences of every cue.
class DeterministicArgumentModel final : public ArgumentModel {
 public:
  explicit DeterministicArgumentModel(ProviderConfig config) : config_(std::move(config)) {
    for (const auto &c : config_.cue_list) {
      auto toks = text::tokenize(c);
      if (!toks.empty()) cue_tokens_.push_back(std::move(toks));
    }
  }

  ClassifierVerdict classify(std::string_view t) const {
    auto toks = text::tokenize(t);
    std::size_t hits = 0;
    for (const auto &cue : cue_tokens_) hits += detail::count_occurrences(toks, cue);
    if (hits == 0) return {ArgumentLabel::NoArgument, 0.5};
    return {ArgumentLabel::Argument, std::min(0.95, 0.5 + 0.1 * static_cast<double>(hits))};
  }

  std::vector<ClassifierVerdict> classify_batch(std::span<const std::string> texts) const override {
    detail::require_texts(texts);
    std::vector<ClassifierVerdict> out;
    out.reserve(texts.size());
    for (const auto &t : texts) out.push_back(classify(t));
    return out;
  }

  /// Most frequent non-stopword token; ties go to the lexicographically
  /// smallest token.
  std::string extract_topic(std::string_view t) const override {
    if (text::trim(t).empty()) throw Error(ErrorCode::PreconditionViolation, "empty text");
    std::map<std::string, std::size_t> freq;
    for (auto &tok : text::tokenize(t))
      if (!detail::stopwords().count(tok)) ++freq[tok];
    if (freq.empty()) throw Error(ErrorCode::DegenerateText, "text has no content words");
    auto best = freq.begin();
    for (auto it = freq.begin(); it != freq.end(); ++it)
      if (it->second > best->second) best = it;
    return best->first;
  }

  /// First stance keyword scanning left to right wins.
  StanceVerdict classify_stance(std::string_view t, std::string_view topic) const override {
    if (text::trim(t).empty() || text::trim(topic).empty())
      throw Error(ErrorCode::PreconditionViolation, "empty text or topic");
    static const std::unordered_set<std::string> favor = {"support", "supports", "supported",
                                                          "supporting", "should"};
    static const std::unordered_set<std::string> against = {
        "oppose", "opposes", "opposed", "opposing", "ban", "bans", "banned", "banning"};
    for (const auto &tok : text::tokenize(t)) {
      if (favor.count(tok)) return {Stance::favor, std::string(topic)};
      if (against.count(tok)) return {Stance::against, std::string(topic)};
    }
    return {Stance::none, std::string(topic)};
  }

 private:
  ProviderConfig config_;
  std::vector<std::vector<std::string>> cue_tokens_;
};

/// Hash-seeded random unit vectors. The text is normalized (lowercase,
/// whitespace collapsed) and hashed together with the salt; the digest seeds
/// mt19937_64 whose raw 64-bit outputs are mapped to [-1, 1) by hand so the
/// result is identical on every conforming platform.
class DeterministicEmbedder final : public Embedder {
 public:
  explicit DeterministicEmbedder(ProviderConfig config) : config_(std::move(config)) {}

  Embedding embed(std::string_view t) const {
    std::string key = text::normalize(t);
    key.push_back('\0');
    key += config_.seed_salt;
    std::mt19937_64 rng(sha256_u64(key));
    Embedding v(config_.dim);
    for (auto &x : v) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      x = 2.0 * u - 1.0;
    }
    normalize(v);
    return v;
  }

  std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override {
    detail::require_texts(texts);
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto &t : texts) out.push_back(embed(t));
    return out;
  }

 private:
  ProviderConfig config_;
};

/// Index of the member with maximal mean cosine similarity to all members
/// (ties to the lowest index). Members must be unit-norm.
inline std::size_t medoid_index(std::span<const Embedding> unit_members) {
  if (unit_members.empty()) throw Error(ErrorCode::PreconditionViolation, "empty cluster");
  const auto dim = unit_members.front().size();
  Embedding sum(dim, 0.0);
  for (const auto &e : unit_members)
    for (std::size_t i = 0; i < dim; ++i) sum[i] += e[i];
  std::size_t best = 0;
  double best_score = dot(unit_members[0], sum);
  for (std::size_t k = 1; k < unit_members.size(); ++k) {
    double s = dot(unit_members[k], sum);
    if (s > best_score) {
      best_score = s;
      best = k;
    }
  }
  return best;
}

/// Extractive summary: the cluster's medoid text under the deterministic
/// embedder configured by the same ProviderConfig.
class DeterministicSummarizer final : public Summarizer {
 public:
  explicit DeterministicSummarizer(ProviderConfig config) : embedder_(std::move(config)) {}

  std::string summarize_cluster(std::span<const std::string> texts) const override {
    if (texts.empty()) throw Error(ErrorCode::PreconditionViolation, "empty cluster");
    if (texts.size() == 1) return texts.front();
    auto vecs = embedder_.embed_batch(texts);
    return texts[medoid_index(vecs)];
  }

 private:
  DeterministicEmbedder embedder_;
};

}  // namespace delib

#endif  // DELIB_PROVIDERS_HPP_
