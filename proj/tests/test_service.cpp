#include <catch_amalgamated.hpp>

#include <filesystem>
#include <future>

#include "counting_providers.hpp"
#include "delib/service.hpp"
#include "fixtures.hpp"

using namespace delib;
namespace fs = std::filesystem;

namespace {

struct Live {
  fs::path root = fixtures::scratch_dir("service");
  std::shared_ptr<fixtures::ProviderProbe> probe = std::make_shared<fixtures::ProviderProbe>();
  std::shared_ptr<Engine> engine;
  std::unique_ptr<Service> service;
  std::unique_ptr<httplib::Client> client;

  explicit Live(std::optional<Providers> providers = std::nullopt) {
    ServiceConfig cfg;
    cfg.port = 0;
    cfg.cors_origin = "http://localhost:5173";
    engine = std::make_shared<Engine>(std::make_shared<FileStore>(root),
                                      providers ? *providers
                                                : fixtures::counting_providers(fixtures::small_dim_config(32), probe));
    service = std::make_unique<Service>(engine, cfg);
    const int port = service->start();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    client->set_read_timeout(60, 0);
  }
  ~Live() {
    service->stop();
    fs::remove_all(root);
  }

  std::string upload(const std::string &body, const std::string &format = "transcript-csv") {
    auto res = client->Post("/events?format=" + format, body, "text/csv");
    REQUIRE(res);
    REQUIRE((res->status == 201 || res->status == 200));
    return Json::parse(res->body)["event_id"].get<std::string>();
  }
};

}  // namespace

TEST_CASE("upload then analyze with default weights", "[service]") {
  Live live;
  auto res = live.client->Post("/events?format=transcript-csv", fixtures::transcript_csv(60, 1), "text/csv");
  REQUIRE(res);
  CHECK(res->status == 201);
  auto id = Json::parse(res->body)["event_id"].get<std::string>();

  auto again = live.client->Post("/events?format=transcript-csv", fixtures::transcript_csv(60, 1), "text/csv");
  CHECK(again->status == 200);
  CHECK(Json::parse(again->body)["event_id"] == id);

  auto an = live.client->Get("/events/" + id + "/analysis");
  REQUIRE(an);
  CHECK(an->status == 200);
  auto rec = Json::parse(an->body);
  CHECK(rec["profile"]["alpha"] == 0.5);
  CHECK(rec["profile"]["beta"] == 0.5);
  CHECK(rec["params"]["k"] == 3);
  CHECK(rec["params"]["clustering"]["similarity_threshold"] == 0.75);

  auto list = Json::parse(live.client->Get("/events")->body);
  REQUIRE(list.size() == 1);
  CHECK(list[0]["event_id"] == id);
  CHECK(list[0]["n_statements"] == 60);
  CHECK(list[0]["title"] == "Synthetic hearing");

  auto ev = Json::parse(live.client->Get("/events/" + id)->body);
  CHECK(ev["statements"].size() == 60);
  CHECK(ev["speakers"].size() > 0);
}

TEST_CASE("query parameters reach the analysis", "[service]") {
  Live live;
  auto id = live.upload(fixtures::transcript_csv(80, 2, 0.7));
  auto rec = Json::parse(live.client->Get("/events/" + id + "/analysis?alpha=1&beta=0&threshold=0.5")->body);
  CHECK(rec["profile"]["dis"] == rec["profile"]["structure"]);
  CHECK(rec["params"]["clustering"]["similarity_threshold"] == 0.5);

  auto evo = live.client->Get("/events/" + id + "/evolution");
  CHECK(evo->status == 200);
  CHECK(Json::parse(evo->body).contains("smoothed"));
  auto nar = Json::parse(live.client->Get("/events/" + id + "/narratives")->body);
  for (const auto &n : nar["narratives"]) {
    CHECK(n.contains("summary"));
    CHECK(n.contains("color_index"));
  }
  auto win = live.client->Get("/events/" + id + "/windows?k=2");
  CHECK(win->status == 200);
  auto bad = live.client->Get("/events/" + id + "/analysis?alpha=banana");
  CHECK(bad->status == 400);
  CHECK(Json::parse(bad->body)["error"] == "InvalidConfig");
}

TEST_CASE("error statuses", "[service]") {
  Live live;
  auto missing = live.client->Get("/events/deadbeef/analysis");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(Json::parse(missing->body)["error"] == "EventNotFound");

  auto bad = live.client->Post("/events?format=transcript-csv", "speaker,text\nA,fine\nB,\n", "text/csv");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  auto body = Json::parse(bad->body);
  CHECK(body["error"] == "MalformedRow");
  CHECK(body["message"].get<std::string>().find("row 3") != std::string::npos);

  auto nocol = live.client->Post("/events", "speaker,words\nA,x\n", "text/csv");
  CHECK(Json::parse(nocol->body)["message"] == "text");

  auto fmt = live.client->Post("/events?format=xml", "<x/>", "text/xml");
  CHECK(fmt->status == 400);
}

TEST_CASE("thread upload via multipart", "[service]") {
  Live live;
  httplib::MultipartFormDataItems items = {
      {"file", fixtures::thread_json(30, 3), "thread.json", "application/json"},
      {"format", "thread-json", "", ""},
  };
  auto res = live.client->Post("/events", items);
  REQUIRE(res);
  CHECK(res->status == 201);
  auto id = Json::parse(res->body)["event_id"].get<std::string>();
  auto ev = Json::parse(live.client->Get("/events/" + id)->body);
  CHECK(ev["venue"] == "forum");
}

TEST_CASE("remote provider outage maps to 502", "[service]") {
  int dead_port;
  {
    httplib::Server s;
    dead_port = s.bind_to_any_port("127.0.0.1");
  }
  ProviderSuiteConfig cfg;
  cfg.embedder.kind = ProviderKind::remote;
  cfg.embedder.endpoint = "http://127.0.0.1:" + std::to_string(dead_port);
  cfg.embedder.timeout_ms = 500;
  Live live(make_providers(cfg));
  auto id = live.upload(fixtures::transcript_csv(20, 4));
  auto res = live.client->Get("/events/" + id + "/analysis");
  REQUIRE(res);
  CHECK(res->status == 502);
  auto body = Json::parse(res->body);
  CHECK(body["error"] == "RemoteUnavailable");
  CHECK(body["stage"] == "segmentation");
}

TEST_CASE("cors headers", "[service]") {
  Live live;
  auto res = live.client->Get("/health");
  REQUIRE(res);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
  auto pre = live.client->Options("/compare");
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->has_header("Access-Control-Allow-Methods"));
}

TEST_CASE("compare, dyadic and robustness endpoints", "[service]") {
  Live live;
  std::vector<std::string> a, b;
  for (std::uint64_t s = 1; s <= 3; ++s) a.push_back(live.upload(fixtures::transcript_csv(60, s, 0.6)));
  for (std::uint64_t s = 11; s <= 13; ++s) b.push_back(live.upload(fixtures::transcript_csv(60, s, 0.3)));

  auto cmp = live.client->Post("/compare", Json{{"group_a", a}, {"group_b", b}, {"name_a", "high"}}.dump(),
                               "application/json");
  REQUIRE(cmp);
  CHECK(cmp->status == 200);
  auto report = Json::parse(cmp->body);
  CHECK(report["group_a"] == "high");
  CHECK(report["per_component"].contains("dis"));
  CHECK(report["per_component"]["dis"].contains("welch"));

  auto dy = live.client->Post("/dyadic", Json{{"event_ids", a}}.dump(), "application/json");
  REQUIRE(dy);
  CHECK(dy->status == 200);
  auto dyr = Json::parse(dy->body);
  CHECK(dyr["groups"].size() >= 2);

  auto rob = live.client->Post("/robustness", Json{{"event_ids", b}}.dump(), "application/json");
  CHECK(rob->status == 200);

  auto bad = live.client->Post("/compare", Json{{"group_a", a}}.dump(), "application/json");
  CHECK(bad->status == 400);
  auto small = live.client->Post("/compare", Json{{"group_a", a}, {"group_b", Json::array()}}.dump(),
                                 "application/json");
  CHECK(small->status == 400);
  auto missing = live.client->Post("/dyadic", Json{{"event_ids", {"nope"}}}.dump(), "application/json");
  CHECK(missing->status == 404);
}

TEST_CASE("concurrent identical requests run the pipeline once", "[service]") {
  Live live;
  auto id = live.upload(fixtures::transcript_csv(80, 5));
  live.probe->embed_delay_ms = 300;
  const int port = live.service->port();
  std::vector<std::future<std::string>> futs;
  for (int i = 0; i < 3; ++i)
    futs.push_back(std::async(std::launch::async, [&, port] {
      httplib::Client c("127.0.0.1", port);
      c.set_read_timeout(60, 0);
      auto r = c.Get("/events/" + id + "/analysis");
      return r ? r->body : std::string();
    }));
  std::vector<std::string> bodies;
  for (auto &f : futs) bodies.push_back(f.get());
  for (const auto &b : bodies) {
    CHECK_FALSE(b.empty());
    CHECK(b == bodies[0]);
  }
  CHECK(live.engine->pipeline_runs() == 1);
}
