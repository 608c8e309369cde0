#ifndef DELIB_ENGINE_HPP_
#define DELIB_ENGINE_HPP_

#include <atomic>
#include <chrono>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "delib/compare.hpp"
#include "delib/error.hpp"
#include "delib/ingest.hpp"
#include "delib/pipeline.hpp"
#include "delib/store.hpp"

namespace delib {

struct IngestResult {
  std::string event_id;
  bool created = false;
};

/// Store-backed analysis engine shared by the CLI and the HTTP service.
///
/// Records are cached under their full parameter fingerprint. A weight-only
/// change reuses the cached structure (clustering, summaries, evolution)
/// and a structural change with the same k and providers reuses the cached
/// segmentation. Concurrent requests for the same fingerprint share one
/// computation; a waiter that exceeds `coalesce_timeout` gets
/// AnalysisInProgress.
class Engine {
 public:
  Engine(std::shared_ptr<Store> store, Providers providers,
         std::chrono::milliseconds coalesce_timeout = std::chrono::minutes(10))
      : store_(std::move(store)), providers_(std::move(providers)), coalesce_timeout_(coalesce_timeout) {}

  const Providers &providers() const { return providers_; }
  Store &store() { return *store_; }

  IngestResult ingest(std::string_view bytes, InputFormat fmt) {
    auto ev = parse_event(bytes, fmt);
    bool created = store_->put_event(ev);
    return {ev.id, created};
  }

  DiscourseEvent event(const std::string &id) const {
    auto ev = store_->get_event(id);
    if (!ev) throw Error(ErrorCode::EventNotFound, id);
    return std::move(*ev);
  }

  std::vector<EventSummary> events() const { return store_->list_events(); }

  AnalysisRecord analyze(const std::string &event_id, const AnalysisParams &params) {
    params.validate();
    if (!store_->has_event(event_id)) throw Error(ErrorCode::EventNotFound, event_id);
    const std::string fp = params_fingerprint(params, providers_.config);
    if (auto doc = store_->get_document(DocKind::analysis, event_id, fp))
      return Json::parse(*doc).get<AnalysisRecord>();

    const std::string key = event_id + "/" + fp;
    std::shared_future<AnalysisRecord> fut;
    std::promise<AnalysisRecord> promise;
    bool owner = false;
    {
      std::lock_guard lock(mu_);
      auto it = inflight_.find(key);
      if (it != inflight_.end()) {
        fut = it->second;
      } else {
        fut = promise.get_future().share();
        inflight_.emplace(key, fut);
        owner = true;
      }
    }
    if (!owner) {
      if (fut.wait_for(coalesce_timeout_) != std::future_status::ready)
        throw Error(ErrorCode::AnalysisInProgress, "analysis " + fp + " for " + event_id + " is still running");
      return fut.get();
    }
    try {
      auto rec = compute(event_id, params, fp);
      promise.set_value(rec);
      finish(key);
      return rec;
    } catch (...) {
      promise.set_exception(std::current_exception());
      finish(key);
      throw;
    }
  }

  /// Argument units (with embeddings) and window outcomes for (event, k).
  SegmentationResult segmentation(const std::string &event_id, const AnalysisParams &params) {
    auto ev = event(event_id);
    return load_or_segment(ev, params);
  }

  ComparisonReport compare(const std::string &name_a, const std::vector<std::string> &ids_a,
                           const std::string &name_b, const std::vector<std::string> &ids_b,
                           const AnalysisParams &params, CompareOptions options = {}) {
    auto collect = [&](const std::vector<std::string> &ids) {
      std::vector<EventAnalysis> out;
      for (const auto &id : ids) {
        auto rec = analyze(id, params);
        out.push_back({id, rec.profile, rec.evolution});
      }
      return out;
    };
    auto a = collect(ids_a);
    auto b = collect(ids_b);
    return compare_groups(name_a, a, name_b, b, options);
  }

  DyadicSimilarityReport dyadic(const std::vector<std::string> &ids, const AnalysisParams &params,
                                DyadUnit unit = DyadUnit::dyad) {
    std::vector<DiscourseEvent> events;
    std::vector<std::vector<ArgumentUnit>> units;
    events.reserve(ids.size());
    units.reserve(ids.size());
    for (const auto &id : ids) {
      events.push_back(event(id));
      units.push_back(load_or_segment(events.back(), params).units);
    }
    std::vector<EventArguments> in;
    for (std::size_t i = 0; i < ids.size(); ++i) in.push_back({&events[i], &units[i]});
    return dyadic_member_witness_similarity(in, unit);
  }

  ClustererComparisonReport robustness(const std::vector<std::string> &ids, const AnalysisParams &params,
                                       const ClusteringParams &a, const ClusteringParams &b) {
    std::vector<ClustererInput> in;
    for (const auto &id : ids) {
      auto ev = event(id);
      auto seg = load_or_segment(ev, params);
      ClustererInput ci;
      ci.event_id = id;
      ci.n_statements = ev.statements.size();
      for (const auto &u : seg.units) {
        ci.embeddings.push_back(*u.embedding);
        ci.speakers.push_back(u.speaker_id);
      }
      in.push_back(std::move(ci));
    }
    return compare_clusterers(in, a, b, params.alpha, params.beta);
  }

  /// Number of full structural computations (clustering onward) run.
  std::size_t pipeline_runs() const { return pipeline_runs_.load(); }
  /// Number of segmentation passes run (provider-heavy stage).
  std::size_t segmentation_runs() const { return segmentation_runs_.load(); }

 private:
  void finish(const std::string &key) {
    std::lock_guard lock(mu_);
    inflight_.erase(key);
  }

  SegmentationResult load_or_segment(const DiscourseEvent &ev, const AnalysisParams &params) {
    const std::string sfp = segmentation_fingerprint(params, providers_.config);
    if (auto doc = store_->get_document(DocKind::segmentation, ev.id, sfp)) {
      auto j = Json::parse(*doc);
      return SegmentationResult{j.at("units").get<std::vector<ArgumentUnit>>(),
                                j.at("windows").get<std::vector<WindowOutcome>>()};
    }
    auto seg = run_segmentation(ev, params.k, providers_);
    ++segmentation_runs_;
    store_->put_document(DocKind::segmentation, ev.id, sfp,
                         Json{{"units", seg.units}, {"windows", seg.windows}}.dump());
    return seg;
  }

  AnalysisRecord compute(const std::string &event_id, const AnalysisParams &params, const std::string &fp) {
    const std::string structural = structural_fingerprint(params, providers_.config);
    AnalysisRecord rec;
    if (auto doc = store_->get_document(DocKind::structure, event_id, structural)) {
      rec = reweighted(Json::parse(*doc).get<AnalysisRecord>(), params.alpha, params.beta, providers_.config);
    } else {
      auto ev = event(event_id);
      auto seg = load_or_segment(ev, params);
      rec = analyze_units(ev, std::move(seg.units), params, providers_);
      ++pipeline_runs_;
      store_->put_document(DocKind::structure, event_id, structural, canonical_json(rec));
    }
    if (rec.params_fingerprint != fp)
      throw Error(ErrorCode::InvariantViolation, "fingerprint drift for " + event_id);
    store_->put_document(DocKind::analysis, event_id, fp, canonical_json(rec));
    return rec;
  }

  std::shared_ptr<Store> store_;
  Providers providers_;
  std::chrono::milliseconds coalesce_timeout_;
  std::mutex mu_;
  std::map<std::string, std::shared_future<AnalysisRecord>> inflight_;
  std::atomic<std::size_t> pipeline_runs_{0};
  std::atomic<std::size_t> segmentation_runs_{0};
};

}  // namespace delib

#endif  // DELIB_ENGINE_HPP_
