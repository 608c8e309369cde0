#ifndef DELIB_SERVICE_HPP_
#define DELIB_SERVICE_HPP_

#include <cstdlib>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "delib/engine.hpp"
#include "delib/error.hpp"
#include "delib/ingest.hpp"
#include "delib/pipeline.hpp"
#include "httplib.h"

namespace delib {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store_root = "delib-store";
  std::string cors_origin = "*";
  ProviderSuiteConfig providers;

  /// DELIB_HOST, DELIB_PORT, DELIB_STORE, DELIB_CORS_ORIGIN, then the
  /// provider variables.
  void apply_env() {
    if (const char *v = std::getenv("DELIB_HOST"); v && *v) host = v;
    if (const char *v = std::getenv("DELIB_PORT"); v && *v) {
      int p = std::atoi(v);
      if (p < 0 || p > 65535) throw Error(ErrorCode::InvalidConfig, "DELIB_PORT out of range");
      port = p;
    }
    if (const char *v = std::getenv("DELIB_STORE"); v && *v) store_root = v;
    if (const char *v = std::getenv("DELIB_CORS_ORIGIN"); v && *v) cors_origin = v;
    providers.apply_env();
  }
};

inline void from_json(const Json &j, ServiceConfig &c) {
  c = ServiceConfig{};
  if (auto v = detail::get_opt<std::string>(j, "host")) c.host = *v;
  if (auto v = detail::get_opt<int>(j, "port")) c.port = *v;
  if (auto v = detail::get_opt<std::string>(j, "store")) c.store_root = *v;
  if (auto v = detail::get_opt<std::string>(j, "cors_origin")) c.cors_origin = *v;
  if (auto it = j.find("providers"); it != j.end() && !it->is_null()) c.providers = it->get<ProviderSuiteConfig>();
}

inline ServiceConfig load_service_config(const std::string &path) {
  try {
    return Json::parse(detail::read_file(path)).get<ServiceConfig>();
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::InvalidConfig, path + ": " + e.what());
  }
}

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::EventNotFound: return 404;
    case ErrorCode::AnalysisInProgress: return 409;
    case ErrorCode::RemoteUnavailable:
    case ErrorCode::RemoteProtocol: return 502;
    case ErrorCode::MissingColumn:
    case ErrorCode::EmptyFile:
    case ErrorCode::MalformedRow:
    case ErrorCode::InvalidEncoding:
    case ErrorCode::MalformedDocument:
    case ErrorCode::EmptyThread:
    case ErrorCode::InvalidConfig:
    case ErrorCode::PreconditionViolation:
    case ErrorCode::GroupTooSmall:
    case ErrorCode::MissingRoleMetadata:
    case ErrorCode::NoDyads:
    case ErrorCode::TooFewArguments:
    case ErrorCode::SampleTooSmall: return 400;
    default: return 500;
  }
}

inline Json error_body(const Error &e) {
  Json j{{"error", std::string(to_string(e.code()))}, {"message", e.detail()}};
  if (!e.stage().empty()) j["stage"] = e.stage();
  return j;
}

/// HTTP front end over an Engine.
///
///   POST /events?format=transcript-csv|thread-json   raw body or multipart field "file"
///   GET  /events
///   GET  /events/{id}
///   GET  /events/{id}/analysis?alpha=&beta=&threshold=&method=&k=...
///   GET  /events/{id}/evolution?...
///   GET  /events/{id}/narratives?...
///   GET  /events/{id}/windows?k=
///   POST /compare     {group_a, group_b, params?, name_a?, name_b?, evolution_unit?}
///   POST /dyadic      {event_ids, params?, unit?}
///   POST /robustness  {event_ids, params?, method_a?, method_b?}
///   GET  /health
class Service {
 public:
  Service(std::shared_ptr<Engine> engine, ServiceConfig cfg) : engine_(std::move(engine)), cfg_(std::move(cfg)) {
    routes();
  }

  ~Service() { stop(); }

  Service(const Service &) = delete;
  Service &operator=(const Service &) = delete;

  /// Binds the listening socket; port 0 picks a free port. Returns the port.
  int bind() {
    if (cfg_.port == 0) {
      port_ = server_.bind_to_any_port(cfg_.host);
    } else {
      port_ = server_.bind_to_port(cfg_.host, cfg_.port) ? cfg_.port : -1;
    }
    if (port_ < 0) throw Error(ErrorCode::InvalidConfig, "cannot bind " + cfg_.host + ":" + std::to_string(cfg_.port));
    return port_;
  }

  /// Serves on the calling thread until stop().
  void run() {
    if (port_ < 0) bind();
    server_.listen_after_bind();
  }

  /// Serves on a background thread. Returns the bound port.
  int start() {
    if (port_ < 0) bind();
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }

 private:
  using Req = httplib::Request;
  using Res = httplib::Response;

  static void send_json(Res &res, const Json &j, int status = 200) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
  }

  template <typename F>
  static void guarded(Res &res, F &&f) {
    try {
      f();
    } catch (const Error &e) {
      send_json(res, error_body(e), http_status(e.code()));
    } catch (const Json::exception &e) {
      send_json(res, Json{{"error", "MalformedDocument"}, {"message", e.what()}}, 400);
    } catch (const std::exception &e) {
      send_json(res, Json{{"error", "Internal"}, {"message", e.what()}}, 500);
    }
  }

  static AnalysisParams query_params(const Req &req) {
    std::map<std::string, std::string> opts;
    for (const auto &name : analysis_option_names())
      if (req.has_param(name)) opts[name] = req.get_param_value(name);
    return params_from_options(opts);
  }

  static std::vector<std::string> id_list(const Json &body, const char *key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_array())
      throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be an array of event ids");
    return it->get<std::vector<std::string>>();
  }

  static Json parse_body(const Req &req) {
    if (req.body.empty()) return Json::object();
    auto j = Json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::MalformedDocument, "request body must be a JSON object");
    return j;
  }

  void routes() {
    const std::string origin = cfg_.cors_origin;
    server_.set_default_headers({{"Access-Control-Allow-Origin", origin},
                                 {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                 {"Access-Control-Allow-Headers", "Content-Type"}});
    server_.Options(R"(.*)", [](const Req &, Res &res) { res.status = 204; });

    server_.Get("/health", [](const Req &, Res &res) { send_json(res, Json{{"status", "ok"}}); });

    server_.Post("/events", [this](const Req &req, Res &res) {
      guarded(res, [&] {
        std::string format = req.has_param("format") ? req.get_param_value("format") : "";
        std::string bytes;
        if (req.is_multipart_form_data()) {
          if (!req.has_file("file")) throw Error(ErrorCode::InvalidConfig, "multipart upload needs a 'file' field");
          bytes = req.get_file_value("file").content;
          if (format.empty() && req.has_file("format")) format = req.get_file_value("format").content;
        } else {
          bytes = req.body;
        }
        if (format.empty())
          format = req.get_header_value("Content-Type").rfind("application/json", 0) == 0 ? "thread-json"
                                                                                          : "transcript-csv";
        auto fmt = input_format_from_string(format);
        if (!fmt) throw Error(ErrorCode::InvalidConfig, "format must be transcript-csv or thread-json");
        auto r = engine_->ingest(bytes, *fmt);
        send_json(res, Json{{"event_id", r.event_id}, {"created", r.created}}, r.created ? 201 : 200);
      });
    });

    server_.Get("/events", [this](const Req &, Res &res) {
      guarded(res, [&] { send_json(res, Json(engine_->events())); });
    });

    server_.Get(R"(/events/([A-Za-z0-9_-]+))", [this](const Req &req, Res &res) {
      guarded(res, [&] { send_json(res, Json(engine_->event(req.matches[1]))); });
    });

    server_.Get(R"(/events/([A-Za-z0-9_-]+)/analysis)", [this](const Req &req, Res &res) {
      guarded(res, [&] { send_json(res, Json(engine_->analyze(req.matches[1], query_params(req)))); });
    });

    server_.Get(R"(/events/([A-Za-z0-9_-]+)/evolution)", [this](const Req &req, Res &res) {
      guarded(res, [&] { send_json(res, Json(engine_->analyze(req.matches[1], query_params(req)).evolution)); });
    });

    server_.Get(R"(/events/([A-Za-z0-9_-]+)/narratives)", [this](const Req &req, Res &res) {
      guarded(res, [&] { send_json(res, narratives_json(engine_->analyze(req.matches[1], query_params(req)))); });
    });

    server_.Get(R"(/events/([A-Za-z0-9_-]+)/windows)", [this](const Req &req, Res &res) {
      guarded(res, [&] { send_json(res, Json(engine_->segmentation(req.matches[1], query_params(req)).windows)); });
    });

    server_.Post("/compare", [this](const Req &req, Res &res) {
      guarded(res, [&] {
        auto body = parse_body(req);
        auto params = params_from_flat_json(body.value("params", Json()));
        CompareOptions opt;
        auto unit = body.value("evolution_unit", std::string("pooled"));
        if (unit == "per_event") opt.evolution_unit = EvolutionUnit::per_event;
        else if (unit != "pooled") throw Error(ErrorCode::InvalidConfig, "evolution_unit must be pooled or per_event");
        send_json(res, Json(engine_->compare(body.value("name_a", std::string("a")), id_list(body, "group_a"),
                                             body.value("name_b", std::string("b")), id_list(body, "group_b"),
                                             params, opt)));
      });
    });

    server_.Post("/dyadic", [this](const Req &req, Res &res) {
      guarded(res, [&] {
        auto body = parse_body(req);
        auto params = params_from_flat_json(body.value("params", Json()));
        auto unit = body.value("unit", std::string("dyad"));
        DyadUnit u = DyadUnit::dyad;
        if (unit == "event_mean") u = DyadUnit::event_mean;
        else if (unit != "dyad") throw Error(ErrorCode::InvalidConfig, "unit must be dyad or event_mean");
        send_json(res, Json(engine_->dyadic(id_list(body, "event_ids"), params, u)));
      });
    });

    server_.Post("/robustness", [this](const Req &req, Res &res) {
      guarded(res, [&] {
        auto body = parse_body(req);
        auto params = params_from_flat_json(body.value("params", Json()));
        auto a = params.clustering, b = params.clustering;
        a.method = ClusteringMethod::threshold_community;
        b.method = ClusteringMethod::density;
        send_json(res, Json(engine_->robustness(id_list(body, "event_ids"), params, a, b)));
      });
    });
  }

  std::shared_ptr<Engine> engine_;
  ServiceConfig cfg_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace delib

#endif  // DELIB_SERVICE_HPP_
