#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>

#include "delib/providers.hpp"
#include "delib/remote_providers.hpp"

using namespace delib;

namespace {

ProviderConfig with_cues(std::vector<std::string> cues) {
  ProviderConfig c;
  c.cue_list = std::move(cues);
  return c;
}

}  // namespace

TEST_CASE("classifier counts cue occurrences", "[providers]") {
  std::vector<std::string> texts = {"We should act because costs rise."};
  auto v = classify_batch(texts, with_cues({"because"}));
  REQUIRE(v.size() == 1);
  CHECK(v[0].label == ArgumentLabel::Argument);
  CHECK(v[0].confidence == Catch::Approx(0.6).margin(1e-15));

  texts = {"The weather is pleasant today."};
  v = classify_batch(texts, ProviderConfig{});
  CHECK(v[0] == ClassifierVerdict{ArgumentLabel::NoArgument, 0.5});
}

TEST_CASE("classifier confidence saturates at 0.95", "[providers]") {
  DeterministicArgumentModel m(with_cues({"because"}));
  CHECK(m.classify("because because because").confidence == Catch::Approx(0.8));
  CHECK(m.classify("because because because because because because because").confidence == 0.95);
}

TEST_CASE("multi-word cues match token sequences", "[providers]") {
  DeterministicArgumentModel m(with_cues({"due to", "as a result"}));
  CHECK(m.classify("Prices fell due to rain.").label == ArgumentLabel::Argument);
  CHECK(m.classify("Prices fell, due, to rain.").confidence == Catch::Approx(0.6));
  CHECK(m.classify("Due to the dew, residue toward.").confidence == Catch::Approx(0.6));
  CHECK(m.classify("As a result, we wait.").label == ArgumentLabel::Argument);
  CHECK(m.classify("a result as").label == ArgumentLabel::NoArgument);
}

TEST_CASE("classifier rejects empty text", "[providers]") {
  std::vector<std::string> texts = {"fine", "   "};
  CHECK_THROWS_MATCHES(classify_batch(texts, ProviderConfig{}), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error &e) { return e.code() == ErrorCode::PreconditionViolation; }));
}

TEST_CASE("embedder is normalization invariant and unit norm", "[providers]") {
  std::vector<std::string> texts = {"A b", "a  B", "something else"};
  auto e = embed_batch(texts, ProviderConfig{});
  REQUIRE(e.size() == 3);
  CHECK(e[0] == e[1]);
  CHECK(e[0] != e[2]);
  for (const auto &v : e) {
    CHECK(v.size() == 768);
    CHECK(l2_norm(v) == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("embedder salt and dim change the output", "[providers]") {
  ProviderConfig a, b;
  b.seed_salt = "x";
  DeterministicEmbedder ea(a), eb(b);
  CHECK(ea.embed("hello") != eb.embed("hello"));
  ProviderConfig small;
  small.dim = 16;
  CHECK(DeterministicEmbedder(small).embed("hello").size() == 16);
}

TEST_CASE("distinct texts embed nearly orthogonally", "[providers]") {
  DeterministicEmbedder emb(ProviderConfig{});
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    auto a = emb.embed("text number " + std::to_string(i));
    auto b = emb.embed("other text " + std::to_string(i));
    worst = std::max(worst, std::abs(cosine_similarity(a, b)));
  }
  CHECK(worst < 0.2);
}

TEST_CASE("topic is the most frequent content word", "[providers]") {
  ProviderConfig c;
  CHECK(extract_topic("Abortion bans harm abortion access", c) == "abortion");
  CHECK(extract_topic("GMOs", c) == "gmos");
  CHECK(extract_topic("zeta alpha", c) == "alpha");
  try {
    extract_topic("the and of it", c);
    FAIL("expected DegenerateText");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::DegenerateText);
  }
}

TEST_CASE("stance keyword scan", "[providers]") {
  ProviderConfig c;
  CHECK(classify_stance("We should fund this", "funding", c).stance == Stance::favor);
  CHECK(classify_stance("Ban this practice", "practice", c).stance == Stance::against);
  CHECK(classify_stance("We support this bill", "bill", c).stance == Stance::favor);
  CHECK(classify_stance("States ban the practice", "practice", c).stance == Stance::against);
  CHECK(classify_stance("I oppose it but we should talk", "it", c).stance == Stance::against);
  CHECK(classify_stance("Nothing to say", "x", c) == StanceVerdict{Stance::none, "x"});
  CHECK_THROWS_AS(classify_stance("text", " ", c), Error);
}

TEST_CASE("summary is the medoid text", "[providers]") {
  ProviderConfig c;
  std::vector<std::string> one = {"only one"};
  CHECK(summarize_cluster(one, c) == "only one");
  std::vector<std::string> texts = {"alpha claim", "beta claim", "Beta  Claim", "gamma"};
  auto s = summarize_cluster(texts, c);
  CHECK(s == "beta claim");  // ties go to the first member
  std::vector<std::string> none;
  CHECK_THROWS_AS(summarize_cluster(none, c), Error);
}

TEST_CASE("medoid of hand vectors", "[providers]") {
  std::vector<Embedding> v = {{1, 0}, {0.6, 0.8}, {0, 1}};
  CHECK(medoid_index(v) == 1);
  CHECK_THROWS_AS(medoid_index(std::vector<Embedding>{}), Error);
}

TEST_CASE("provider config validation and json", "[providers]") {
  ProviderConfig c;
  CHECK_NOTHROW(c.validate());
  c.kind = ProviderKind::remote;
  CHECK_THROWS_AS(c.validate(), Error);
  c.endpoint = "http://127.0.0.1:1";
  CHECK_NOTHROW(c.validate());
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), Error);

  ProviderSuiteConfig s;
  s.embedder.dim = 64;
  s.classifier.cue_list = {"because"};
  nlohmann::json j = s;
  auto back = j.get<ProviderSuiteConfig>();
  CHECK(back.embedder.dim == 64);
  CHECK(back.classifier.cue_list == std::vector<std::string>{"because"});
  CHECK_THROWS_AS(nlohmann::json({{"classifier", {{"kind", "magic"}}}}).get<ProviderSuiteConfig>(), Error);
}

TEST_CASE("environment switches a role to remote", "[providers]") {
  ::setenv("DELIB_EMBEDDER_URL", "http://127.0.0.1:9", 1);
  ::setenv("DELIB_PROVIDER_TIMEOUT_MS", "1234", 1);
  ProviderSuiteConfig s;
  s.apply_env();
  ::unsetenv("DELIB_EMBEDDER_URL");
  ::unsetenv("DELIB_PROVIDER_TIMEOUT_MS");
  CHECK(s.embedder.kind == ProviderKind::remote);
  CHECK(s.embedder.endpoint == "http://127.0.0.1:9");
  CHECK(s.classifier.kind == ProviderKind::deterministic);
  CHECK(s.summarizer.timeout_ms == 1234);
}
