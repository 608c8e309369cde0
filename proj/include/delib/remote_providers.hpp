#ifndef DELIB_REMOTE_PROVIDERS_HPP_
#define DELIB_REMOTE_PROVIDERS_HPP_

#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "delib/error.hpp"
#include "delib/providers.hpp"
#include "httplib.h"
#include "json.hpp"

namespace delib {

namespace detail {

/// Bounds concurrent requests issued by one provider instance.
class InFlightLimit {
 public:
  explicit InFlightLimit(std::size_t limit) : available_(limit) {}

  class Slot {
   public:
    explicit Slot(InFlightLimit &l) : l_(l) {
      std::unique_lock lock(l_.mu_);
      l_.cv_.wait(lock, [&] { return l_.available_ > 0; });
      --l_.available_;
    }
    ~Slot() {
      {
        std::lock_guard lock(l_.mu_);
        ++l_.available_;
      }
      l_.cv_.notify_one();
    }
    Slot(const Slot &) = delete;
    Slot &operator=(const Slot &) = delete;

   private:
    InFlightLimit &l_;
  };

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t available_;
};

struct ParsedUrl {
  std::string host_port;  // scheme://host[:port]
  std::string path;       // without trailing slash
};

inline ParsedUrl parse_endpoint(const std::string &url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.compare(0, scheme_end, "http") != 0)
    throw Error(ErrorCode::InvalidConfig, "endpoint must be an http:// URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  out.host_port = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

/// POSTs {"texts": [...], extra...} to `endpoint + route` and returns the
/// `results` array, which must hold exactly `expected` entries.
class JsonRpc {
 public:
  explicit JsonRpc(const ProviderConfig &config)
      : url_(parse_endpoint(*config.endpoint)),
        timeout_ms_(config.timeout_ms),
        limit_(std::make_unique<InFlightLimit>(config.max_in_flight)) {}

  nlohmann::json call(const std::string &route, nlohmann::json body, std::size_t expected) const {
    InFlightLimit::Slot slot(*limit_);
    httplib::Client cli(url_.host_port);
    auto secs = timeout_ms_ / 1000;
    auto usecs = (timeout_ms_ % 1000) * 1000;
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    const auto target = url_.path + route;
    auto res = cli.Post(target, body.dump(), "application/json");
    if (!res)
      throw Error(ErrorCode::RemoteUnavailable,
                  url_.host_port + target + ": " + httplib::to_string(res.error()));
    if (res->status != 200)
      throw Error(ErrorCode::RemoteUnavailable,
                  url_.host_port + target + ": HTTP " + std::to_string(res->status));
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::RemoteProtocol, target + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("results") || !doc["results"].is_array())
      throw Error(ErrorCode::RemoteProtocol, target + ": response lacks a results array");
    auto &results = doc["results"];
    if (results.size() != expected)
      throw Error(ErrorCode::RemoteProtocol,
                  target + ": expected " + std::to_string(expected) + " results, got " +
                      std::to_string(results.size()));
    return std::move(results);
  }

 private:
  ParsedUrl url_;
  int timeout_ms_;
  std::unique_ptr<InFlightLimit> limit_;
};

template <typename F>
void for_each_batch(std::span<const std::string> texts, std::size_t batch_size, F &&f) {
  for (std::size_t off = 0; off < texts.size(); off += batch_size)
    f(texts.subspan(off, std::min(batch_size, texts.size() - off)));
}

inline const nlohmann::json &field(const nlohmann::json &item, const char *name,
                                   const std::string &route) {
  if (!item.is_object() || !item.contains(name))
    throw Error(ErrorCode::RemoteProtocol, route + ": result item lacks '" + name + "'");
  return item[name];
}

}  // namespace detail

/// Client for an external argument model. Routes under the endpoint:
/// /classify, /topic, /stance.
class RemoteArgumentModel final : public ArgumentModel {
 public:
  explicit RemoteArgumentModel(ProviderConfig config)
      : config_(std::move(config)), rpc_(config_) {}

  std::vector<ClassifierVerdict> classify_batch(std::span<const std::string> texts) const override {
    detail::require_texts(texts);
    std::vector<ClassifierVerdict> out;
    out.reserve(texts.size());
    detail::for_each_batch(texts, config_.batch_size, [&](std::span<const std::string> chunk) {
      auto results = rpc_.call("/classify", {{"texts", std::vector<std::string>(chunk.begin(), chunk.end())}}, chunk.size());
      for (const auto &item : results) {
        const auto &label = detail::field(item, "label", "/classify");
        const auto &conf = detail::field(item, "confidence", "/classify");
        if (!label.is_string() || !conf.is_number())
          throw Error(ErrorCode::RemoteProtocol, "/classify: bad item types");
        auto l = label.get<std::string>();
        double c = conf.get<double>();
        if ((l != "Argument" && l != "NoArgument") || !(c >= 0.0 && c <= 1.0))
          throw Error(ErrorCode::RemoteProtocol, "/classify: invalid label or confidence");
        out.push_back({l == "Argument" ? ArgumentLabel::Argument : ArgumentLabel::NoArgument, c});
      }
    });
    return out;
  }

  std::string extract_topic(std::string_view t) const override {
    std::vector<std::string> texts{std::string(t)};
    detail::require_texts(texts);
    auto results = rpc_.call("/topic", {{"texts", texts}}, 1);
    const auto &topic = detail::field(results[0], "topic", "/topic");
    if (!topic.is_string() || text::trim(topic.get<std::string>()).empty())
      throw Error(ErrorCode::RemoteProtocol, "/topic: empty topic");
    return topic.get<std::string>();
  }

  StanceVerdict classify_stance(std::string_view t, std::string_view topic) const override {
    std::vector<std::string> texts{std::string(t)};
    detail::require_texts(texts);
    if (text::trim(topic).empty()) throw Error(ErrorCode::PreconditionViolation, "empty topic");
    auto results = rpc_.call("/stance", {{"texts", texts}, {"topic", topic}}, 1);
    const auto &s = detail::field(results[0], "stance", "/stance");
    std::optional<Stance> stance;
    if (s.is_string()) stance = stance_from_string(s.get<std::string>());
    if (!stance) throw Error(ErrorCode::RemoteProtocol, "/stance: invalid stance");
    return {*stance, std::string(topic)};
  }

 private:
  ProviderConfig config_;
  detail::JsonRpc rpc_;
};

/// Client for an external sentence embedder (route /embed). Vectors are
/// re-normalized on receipt.
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(ProviderConfig config) : config_(std::move(config)), rpc_(config_) {}

  std::vector<Embedding> embed_batch(std::span<const std::string> texts) const override {
    detail::require_texts(texts);
    std::vector<Embedding> out;
    out.reserve(texts.size());
    std::optional<std::size_t> dim;
    detail::for_each_batch(texts, config_.batch_size, [&](std::span<const std::string> chunk) {
      auto results = rpc_.call("/embed", {{"texts", std::vector<std::string>(chunk.begin(), chunk.end())}}, chunk.size());
      for (const auto &item : results) {
        const auto &arr = item.is_array() ? item : detail::field(item, "embedding", "/embed");
        if (!arr.is_array() || arr.empty())
          throw Error(ErrorCode::RemoteProtocol, "/embed: embedding is not a non-empty array");
        Embedding v;
        v.reserve(arr.size());
        for (const auto &x : arr) {
          if (!x.is_number()) throw Error(ErrorCode::RemoteProtocol, "/embed: non-numeric value");
          v.push_back(x.get<double>());
        }
        if (dim && *dim != v.size())
          throw Error(ErrorCode::RemoteProtocol, "/embed: inconsistent dimensions");
        dim = v.size();
        if (!normalize(v)) throw Error(ErrorCode::RemoteProtocol, "/embed: zero or non-finite vector");
        out.push_back(std::move(v));
      }
    });
    return out;
  }

 private:
  ProviderConfig config_;
  detail::JsonRpc rpc_;
};

/// Client for an external summarizer (route /summarize).
class RemoteSummarizer final : public Summarizer {
 public:
  explicit RemoteSummarizer(ProviderConfig config) : config_(std::move(config)), rpc_(config_) {}

  std::string summarize_cluster(std::span<const std::string> texts) const override {
    if (texts.empty()) throw Error(ErrorCode::PreconditionViolation, "empty cluster");
    detail::require_texts(texts);
    auto results = rpc_.call("/summarize", {{"texts", std::vector<std::string>(texts.begin(), texts.end())}}, 1);
    const auto &s = detail::field(results[0], "summary", "/summarize");
    if (!s.is_string() || text::trim(s.get<std::string>()).empty())
      throw Error(ErrorCode::RemoteProtocol, "/summarize: empty summary");
    return s.get<std::string>();
  }

 private:
  ProviderConfig config_;
  detail::JsonRpc rpc_;
};

inline Providers make_providers(ProviderSuiteConfig config) {
  config.validate();
  Providers p;
  if (config.classifier.kind == ProviderKind::remote)
    p.classifier = std::make_shared<RemoteArgumentModel>(config.classifier);
  else
    p.classifier = std::make_shared<DeterministicArgumentModel>(config.classifier);
  if (config.embedder.kind == ProviderKind::remote)
    p.embedder = std::make_shared<RemoteEmbedder>(config.embedder);
  else
    p.embedder = std::make_shared<DeterministicEmbedder>(config.embedder);
  if (config.summarizer.kind == ProviderKind::remote)
    p.summarizer = std::make_shared<RemoteSummarizer>(config.summarizer);
  else
    p.summarizer = std::make_shared<DeterministicSummarizer>(config.summarizer);
  p.config = std::move(config);
  return p;
}

// Single-call conveniences mirroring the provider operations.

inline std::vector<ClassifierVerdict> classify_batch(std::span<const std::string> texts,
                                                     const ProviderConfig &config) {
  config.validate();
  if (config.kind == ProviderKind::remote) return RemoteArgumentModel(config).classify_batch(texts);
  return DeterministicArgumentModel(config).classify_batch(texts);
}

inline std::vector<Embedding> embed_batch(std::span<const std::string> texts,
                                          const ProviderConfig &config) {
  config.validate();
  if (config.kind == ProviderKind::remote) return RemoteEmbedder(config).embed_batch(texts);
  return DeterministicEmbedder(config).embed_batch(texts);
}

inline std::string extract_topic(std::string_view text, const ProviderConfig &config) {
  config.validate();
  if (config.kind == ProviderKind::remote) return RemoteArgumentModel(config).extract_topic(text);
  return DeterministicArgumentModel(config).extract_topic(text);
}

inline StanceVerdict classify_stance(std::string_view text, std::string_view topic,
                                     const ProviderConfig &config) {
  config.validate();
  if (config.kind == ProviderKind::remote)
    return RemoteArgumentModel(config).classify_stance(text, topic);
  return DeterministicArgumentModel(config).classify_stance(text, topic);
}

inline std::string summarize_cluster(std::span<const std::string> texts,
                                     const ProviderConfig &config) {
  config.validate();
  if (config.kind == ProviderKind::remote) return RemoteSummarizer(config).summarize_cluster(texts);
  return DeterministicSummarizer(config).summarize_cluster(texts);
}

}  // namespace delib

#endif  // DELIB_REMOTE_PROVIDERS_HPP_
