// delib: command-line front end for the deliberation analysis engine.
//
// Exit codes: 0 success, 1 user error (bad flags, unreadable or malformed
// input, unknown event), 2 internal or provider error.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "delib.hpp"

namespace fs = std::filesystem;

namespace {

using delib::Json;

struct Globals {
  std::string store;
  std::string config;
  bool json = false;
  bool verbose = false;
};

struct AnalysisFlags {
  double alpha = delib::kDefaultAlpha;
  double beta = delib::kDefaultBeta;
  double threshold = 0.75;
  std::string method = "threshold_community";
  std::size_t k = delib::kDefaultWindowSize;
  std::size_t min_community_size = 2;
  std::size_t min_pts = 3;
  double eps = 0.3;
  std::size_t w_min = 2;
  std::size_t w_max = 50;
  std::size_t min_arguments = 3;

  void add_to(CLI::App *cmd) {
    cmd->add_option("--alpha", alpha, "Weight of the structure score")->capture_default_str();
    cmd->add_option("--beta", beta, "Weight of the participation score")->capture_default_str();
    cmd->add_option("--threshold", threshold, "Cosine similarity edge threshold")->capture_default_str();
    cmd->add_option("--method", method, "threshold_community or density")->capture_default_str();
    cmd->add_option("--k", k, "Sentences per classification window")->capture_default_str();
    cmd->add_option("--min-community-size", min_community_size, "Smallest cluster kept")->capture_default_str();
    cmd->add_option("--min-pts", min_pts, "Density method: neighbours for a core point")->capture_default_str();
    cmd->add_option("--eps", eps, "Density method: cosine distance radius")->capture_default_str();
    cmd->add_option("--w-min", w_min, "Smallest evolution window")->capture_default_str();
    cmd->add_option("--w-max", w_max, "Largest evolution window")->capture_default_str();
    cmd->add_option("--min-arguments", min_arguments, "Arguments needed for an evolution series")
        ->capture_default_str();
  }

  delib::AnalysisParams params() const {
    auto num = [](double v) { return Json(v).dump(); };
    return delib::params_from_options({{"alpha", num(alpha)},
                                       {"beta", num(beta)},
                                       {"threshold", num(threshold)},
                                       {"method", method},
                                       {"k", std::to_string(k)},
                                       {"min_community_size", std::to_string(min_community_size)},
                                       {"min_pts", std::to_string(min_pts)},
                                       {"eps", num(eps)},
                                       {"w_min", std::to_string(w_min)},
                                       {"w_max", std::to_string(w_max)},
                                       {"min_arguments", std::to_string(min_arguments)}});
  }
};

std::string read_input(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw delib::Error(delib::ErrorCode::InvalidConfig, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> read_ids(const std::string &path) {
  std::vector<std::string> ids;
  std::istringstream in(read_input(path));
  std::string line;
  while (std::getline(in, line)) {
    auto t = std::string(delib::text::trim(line));
    if (t.empty() || t[0] == '#') continue;
    ids.push_back(t);
  }
  return ids;
}

void write_output(const std::string &path, const std::string &bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw delib::Error(delib::ErrorCode::InvalidConfig, "cannot write " + path);
  out << bytes;
}

delib::ServiceConfig load_config(const Globals &g) {
  delib::ServiceConfig cfg;
  if (!g.config.empty()) cfg = delib::load_service_config(g.config);
  cfg.apply_env();
  if (!g.store.empty()) cfg.store_root = g.store;
  return cfg;
}

std::shared_ptr<delib::Engine> open_engine(const delib::ServiceConfig &cfg) {
  cfg.providers.validate();
  auto store = std::make_shared<delib::FileStore>(cfg.store_root);
  return std::make_shared<delib::Engine>(store, delib::make_providers(cfg.providers));
}

void print_params(const delib::AnalysisParams &p, const delib::ServiceConfig &cfg) {
  std::cerr << "store: " << cfg.store_root << "\n"
            << "k=" << p.k << " alpha=" << p.alpha << " beta=" << p.beta << "\n"
            << "method=" << delib::to_string(p.clustering.method)
            << " threshold=" << p.clustering.similarity_threshold
            << " min_community_size=" << p.clustering.min_community_size
            << " min_pts=" << p.clustering.density_min_pts << " eps=" << p.clustering.density_eps << "\n"
            << "evolution w in [" << p.evolution.w_min << ", " << p.evolution.w_max
            << "], min_arguments=" << p.evolution.min_arguments << "\n"
            << "argument confidence cutoff=" << delib::kArgumentThreshold << "\n"
            << "providers: " << Json(cfg.providers).dump() << "\n";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void print_profile_table(const delib::DeliberationProfile &p) {
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"statements", std::to_string(p.n_statements)},
      {"arguments", std::to_string(p.n_arguments)},
      {"debaters", std::to_string(p.n_debaters)},
      {"narratives", std::to_string(p.n_clusters)},
      {"outliers", std::to_string(p.n_outliers)},
      {"narrative_diversity", fmt(p.narrative_diversity)},
      {"coherence", fmt(p.coherence)},
      {"narrative_distinctness", fmt(p.narrative_distinctness)},
      {"debater_diversity", fmt(p.debater_diversity)},
      {"argumentativeness", fmt(p.argumentativeness)},
      {"structure", fmt(p.structure)},
      {"participation", fmt(p.participation)},
      {"dis", fmt(p.dis)},
      {"alpha / beta", fmt(p.alpha) + " / " + fmt(p.beta)},
      {"method", std::string(delib::to_string(p.clustering_method))},
  };
  for (const auto &[k, v] : rows) std::printf("%-24s %s\n", k.c_str(), v.c_str());
  for (const auto &w : p.warnings) std::printf("warning: %s\n", w.c_str());
}

void print_evolution_table(const delib::EvolutionSeries &s) {
  std::printf("n=%zu w=%zu slope=%s volatility=%s phases=[%s, %s, %s]\n", s.n, s.w, fmt(s.slope).c_str(),
              fmt(s.volatility).c_str(), fmt(s.phase_volatility[0]).c_str(), fmt(s.phase_volatility[1]).c_str(),
              fmt(s.phase_volatility[2]).c_str());
  std::printf("%-10s %-12s %-12s\n", "position", "raw", "smoothed");
  for (std::size_t i = 0; i < s.raw.size(); ++i)
    std::printf("%-10zu %-12s %-12s\n", s.positions[i], fmt(s.raw[i]).c_str(), fmt(s.smoothed[i]).c_str());
  for (const auto &w : s.warnings) std::printf("warning: %s\n", w.c_str());
}

void print_test(const char *label, const std::optional<delib::stats::TestResult> &t) {
  if (!t) {
    std::printf("  %-10s n/a\n", label);
    return;
  }
  std::printf("  %-10s stat=%s p=%s\n", label, fmt(t->statistic).c_str(), fmt(t->p_value).c_str());
}

void print_comparison_table(const delib::ComparisonReport &r) {
  std::printf("%s vs %s\n", r.group_a.c_str(), r.group_b.c_str());
  for (const auto &[name, c] : r.per_component) {
    std::printf("%-24s mean_a=%s mean_b=%s diff=%s\n", name.c_str(), fmt(c.mean_a).c_str(), fmt(c.mean_b).c_str(),
                fmt(c.mean_diff).c_str());
    print_test("welch", c.welch);
    if (c.effect) std::printf("  %-10s d=%s\n", "effect", fmt(c.effect->d).c_str());
  }
  std::printf("evolution slope_a=%s slope_b=%s volatility_a=%s volatility_b=%s\n", fmt(r.evolution.slope_a).c_str(),
              fmt(r.evolution.slope_b).c_str(), fmt(r.evolution.volatility_a).c_str(),
              fmt(r.evolution.volatility_b).c_str());
  print_test("ks", r.evolution.ks);
  for (const auto &w : r.warnings) std::printf("warning: %s\n", w.c_str());
}

void print_dyadic_table(const delib::DyadicSimilarityReport &r) {
  std::printf("%-16s %-9s %-12s %s\n", "party", "majority", "similarity", "dyads");
  for (const auto &g : r.groups)
    std::printf("%-16s %-9s %-12s %zu\n", g.party.c_str(), g.majority ? "yes" : "no",
                fmt(g.mean_similarity).c_str(), g.n_dyads);
  for (const auto &d : r.deltas) {
    std::printf("%s: majority - minority = %s\n", d.party.c_str(),
                d.majority_minus_minority ? fmt(*d.majority_minus_minority).c_str() : "n/a");
    print_test("welch", d.welch);
  }
  for (const auto &w : r.warnings) std::printf("warning: %s\n", w.c_str());
}

void print_robustness_table(const delib::ClustererComparisonReport &r) {
  std::printf("%zu events\n", r.events.size());
  for (const auto &[name, f] : r.features) {
    std::printf("%-24s mean_diff=%s t=%s p=%s\n", name.c_str(), fmt(f.mean_diff).c_str(),
                fmt(f.test.statistic).c_str(), fmt(f.test.p_value).c_str());
  }
}

int exit_code_for(const delib::Error &e) {
  const int status = delib::http_status(e.code());
  return status == 400 || status == 404 ? 1 : 2;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Deliberation analysis: ingest discourse events, segment arguments, cluster narratives, "
               "and score deliberation intensity."};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--store", g.store, "Store directory (default: $DELIB_STORE or ./delib-store)");
  app.add_option("--config", g.config, "JSON configuration file (providers, host, port, store)");
  app.add_flag("--json", g.json, "Print JSON instead of tables");
  app.add_flag("-v,--verbose", g.verbose, "Print effective parameters to stderr");

  // ingest
  auto *ingest = app.add_subcommand("ingest", "Store a transcript CSV or thread JSON and print its event id");
  std::string ingest_format, ingest_path;
  ingest->add_option("--format", ingest_format, "transcript-csv or thread-json (default: by file extension)");
  ingest->add_option("path", ingest_path, "Input file")->required();

  // analyze
  auto *analyze = app.add_subcommand("analyze", "Run the pipeline on an event and print its profile");
  std::string analyze_id;
  bool analyze_record = false;
  AnalysisFlags analyze_flags;
  analyze->add_option("event_id", analyze_id)->required();
  analyze->add_flag("--record", analyze_record, "With --json, print the full analysis record");
  analyze_flags.add_to(analyze);

  // evolve
  auto *evolve = app.add_subcommand("evolve", "Print or export the coherence evolution series");
  std::string evolve_id, evolve_out;
  AnalysisFlags evolve_flags;
  evolve->add_option("event_id", evolve_id)->required();
  evolve->add_option("--out", evolve_out, "Write position,raw,smoothed CSV to this path");
  evolve_flags.add_to(evolve);

  // compare
  auto *compare = app.add_subcommand("compare", "Compare two groups of events");
  std::string compare_a, compare_b, name_a = "a", name_b = "b", evolution_unit = "pooled";
  AnalysisFlags compare_flags;
  compare->add_option("--a", compare_a, "File with one event id per line (group a)")->required();
  compare->add_option("--b", compare_b, "File with one event id per line (group b)")->required();
  compare->add_option("--name-a", name_a, "Label of group a")->capture_default_str();
  compare->add_option("--name-b", name_b, "Label of group b")->capture_default_str();
  compare->add_option("--evolution-unit", evolution_unit, "pooled or per_event")->capture_default_str();
  compare_flags.add_to(compare);

  // dyadic
  auto *dyadic = app.add_subcommand("dyadic", "Member-witness argument similarity by party and majority");
  std::string dyadic_events, dyadic_unit = "dyad";
  AnalysisFlags dyadic_flags;
  dyadic->add_option("--events", dyadic_events, "File with one event id per line")->required();
  dyadic->add_option("--unit", dyadic_unit, "dyad or event_mean")->capture_default_str();
  dyadic_flags.add_to(dyadic);

  // robustness
  auto *robust = app.add_subcommand("robustness", "Compare threshold-community and density clustering");
  std::string robust_events;
  AnalysisFlags robust_flags;
  robust->add_option("--events", robust_events, "File with one event id per line")->required();
  robust_flags.add_to(robust);

  // serve
  auto *serve = app.add_subcommand("serve", "Run the HTTP API");
  int serve_port = -1;
  std::string serve_host;
  serve->add_option("--port", serve_port, "Port (default: config, $DELIB_PORT or 8080)");
  serve->add_option("--host", serve_host, "Bind address (default 127.0.0.1)");

  // export
  auto *exp = app.add_subcommand("export", "Export evolution, narratives, profile, event or windows as CSV");
  std::string export_id, export_what, export_out;
  AnalysisFlags export_flags;
  exp->add_option("event_id", export_id)->required();
  exp->add_option("--what", export_what, "evolution, narratives, profile, event or windows")
      ->required()
      ->check(CLI::IsMember({"evolution", "narratives", "profile", "event", "windows"}));
  exp->add_option("--out", export_out, "Output path ('-' or omitted for stdout)");
  export_flags.add_to(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    if (e.get_exit_code() != 0) std::cerr << app.help();
    return 1;
  }

  try {
    auto cfg = load_config(g);

    if (*ingest) {
      if (ingest_format.empty())
        ingest_format = fs::path(ingest_path).extension() == ".json" ? "thread-json" : "transcript-csv";
      auto fmt_opt = delib::input_format_from_string(ingest_format);
      if (!fmt_opt) throw delib::Error(delib::ErrorCode::InvalidConfig, "--format must be transcript-csv or thread-json");
      auto bytes = read_input(ingest_path);
      auto engine = open_engine(cfg);
      auto r = engine->ingest(bytes, *fmt_opt);
      if (g.json) std::cout << Json{{"event_id", r.event_id}, {"created", r.created}}.dump() << "\n";
      else std::cout << r.event_id << "\n";
      return 0;
    }

    if (*analyze) {
      auto params = analyze_flags.params();
      if (g.verbose) print_params(params, cfg);
      auto rec = open_engine(cfg)->analyze(analyze_id, params);
      if (g.json) std::cout << (analyze_record ? Json(rec) : Json(rec.profile)).dump() << "\n";
      else print_profile_table(rec.profile);
      return 0;
    }

    if (*evolve) {
      auto params = evolve_flags.params();
      if (g.verbose) print_params(params, cfg);
      auto rec = open_engine(cfg)->analyze(evolve_id, params);
      if (!evolve_out.empty()) write_output(evolve_out, delib::evolution_csv(rec.evolution));
      else if (g.json) std::cout << Json(rec.evolution).dump() << "\n";
      else print_evolution_table(rec.evolution);
      return 0;
    }

    if (*compare) {
      auto params = compare_flags.params();
      if (g.verbose) print_params(params, cfg);
      delib::CompareOptions opt;
      if (evolution_unit == "per_event") opt.evolution_unit = delib::EvolutionUnit::per_event;
      else if (evolution_unit != "pooled")
        throw delib::Error(delib::ErrorCode::InvalidConfig, "--evolution-unit must be pooled or per_event");
      auto r = open_engine(cfg)->compare(name_a, read_ids(compare_a), name_b, read_ids(compare_b), params, opt);
      if (g.json) std::cout << Json(r).dump() << "\n";
      else print_comparison_table(r);
      return 0;
    }

    if (*dyadic) {
      auto params = dyadic_flags.params();
      if (g.verbose) print_params(params, cfg);
      delib::DyadUnit unit = delib::DyadUnit::dyad;
      if (dyadic_unit == "event_mean") unit = delib::DyadUnit::event_mean;
      else if (dyadic_unit != "dyad") throw delib::Error(delib::ErrorCode::InvalidConfig, "--unit must be dyad or event_mean");
      auto r = open_engine(cfg)->dyadic(read_ids(dyadic_events), params, unit);
      if (g.json) std::cout << Json(r).dump() << "\n";
      else print_dyadic_table(r);
      return 0;
    }

    if (*robust) {
      auto params = robust_flags.params();
      if (g.verbose) print_params(params, cfg);
      auto a = params.clustering, b = params.clustering;
      a.method = delib::ClusteringMethod::threshold_community;
      b.method = delib::ClusteringMethod::density;
      auto r = open_engine(cfg)->robustness(read_ids(robust_events), params, a, b);
      if (g.json) std::cout << Json(r).dump() << "\n";
      else print_robustness_table(r);
      return 0;
    }

    if (*serve) {
      if (serve_port >= 0) cfg.port = serve_port;
      if (!serve_host.empty()) cfg.host = serve_host;
      auto engine = open_engine(cfg);
      delib::Service service(engine, cfg);
      int port = service.bind();
      std::cerr << "listening on " << cfg.host << ":" << port << " (store " << cfg.store_root << ")\n";
      service.run();
      return 0;
    }

    if (*exp) {
      auto params = export_flags.params();
      if (g.verbose) print_params(params, cfg);
      auto engine = open_engine(cfg);
      std::string bytes;
      if (export_what == "event") {
        bytes = delib::export_event_csv(engine->event(export_id));
      } else if (export_what == "windows") {
        bytes = delib::windows_csv(engine->segmentation(export_id, params).windows);
      } else {
        auto rec = engine->analyze(export_id, params);
        if (export_what == "evolution") bytes = delib::evolution_csv(rec.evolution);
        else if (export_what == "narratives") bytes = delib::narratives_csv(rec);
        else bytes = delib::profile_csv(rec.profile);
      }
      write_output(export_out, bytes);
      return 0;
    }
  } catch (const delib::Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
