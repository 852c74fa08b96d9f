// Command-line front end: generate, oracle, experiment, replay.
//
// Exit codes: 0 success, 1 runtime or check failure, 2 usage or config error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rrdag/coalescent.hpp"
#include "rrdag/enumeration.hpp"
#include "rrdag/experiment.hpp"
#include "rrdag/graph_io.hpp"
#include "rrdag/recursive.hpp"
#include "rrdag/trace_io.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "1.0.0";
constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

// Usage problems detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

rrdag::TreeOrder order_from(const std::string& text) {
  const auto order = rrdag::parse_tree_order(text);
  if (!order) throw UsageError("--order must be lexicographic or root_label");
  return *order;
}

struct GenerateArgs {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  std::string construction = "recursive";
  std::string order = "root_label";
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  if (a.n < 1 || a.n > UINT32_MAX) throw UsageError("--n must lie in [1, 2^32-1]");
  if (a.m < 1 || a.m > UINT32_MAX) throw UsageError("--m must be a positive 32-bit integer");
  const auto construction = rrdag::parse_construction(a.construction);
  if (!construction) throw UsageError("--construction must be recursive or coalescent");
  const auto order = order_from(a.order);
  const auto start = std::chrono::steady_clock::now();
  const rrdag::Seed seed{a.seed, 0};
  const auto n = static_cast<rrdag::Vertex>(a.n);
  const auto m = static_cast<std::uint32_t>(a.m);
  const rrdag::LabeledDag g = *construction == rrdag::Construction::recursive
                                  ? rrdag::generate_recursive(n, m, seed)
                                  : rrdag::generate_coalescent(n, m, seed, order);
  const auto report = rrdag::validate(g);
  if (!report.ok()) {
    for (const auto& v : report.violations) std::cerr << "invalid graph: " << v << '\n';
    return kFailure;
  }
  const std::string line = rrdag::to_jsonl(g) + "\n";
  if (a.out.empty()) {
    std::cout << line;
    return kOk;
  }
  write_file(a.out, line);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest{{"tool", "rrdag"},
                {"version", kVersion},
                {"command", "generate"},
                {"config", {{"n", a.n}, {"m", a.m}, {"seed", a.seed}, {"construction", a.construction},
                            {"tree_order", rrdag::to_string(order)}}},
                {"master_seed", a.seed},
                {"wall_time_seconds", wall},
                {"checks", json::array({{{"test", "validate"}, {"passed", true}}})},
                {"outputs", json::array({a.out})}};
  write_file(a.out + ".manifest.json", manifest.dump(2) + "\n");
  return kOk;
}

struct OracleArgs {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::string fixture;
  std::uint64_t cap = rrdag::kDefaultExhaustCap;
  std::string order = "lexicographic";
  unsigned threads = 0;
};

int cmd_oracle(const OracleArgs& a) {
  if (a.n < 1 || a.n > 64) throw UsageError("--n must lie in [1, 64]");
  if (a.m < 1 || a.m > 64) throw UsageError("--m must lie in [1, 64]");
  const auto n = static_cast<rrdag::Vertex>(a.n);
  const auto m = static_cast<std::uint32_t>(a.m);
  rrdag::ExhaustOptions options;
  options.cap = a.cap;
  options.order = order_from(a.order);
  options.threads = a.threads == 0 ? rrdag::default_thread_count() : a.threads;
  const auto dist = rrdag::exhaust_coalescent(n, m, options);

  rrdag::BigInt factorial = 1;
  for (std::uint32_t j = 2; j <= n; ++j) factorial *= j;
  const auto expected_graphs = rrdag::count_increasing_dags(n, m);
  const bool count_ok = rrdag::BigInt(dist.graphs.size()) == expected_graphs;
  const bool uniform = dist.uniform_with(static_cast<std::uint64_t>(factorial));
  std::cout << dist.graphs.size() << " graph" << (dist.graphs.size() == 1 ? "" : "s") << " \u00d7 "
            << factorial << (dist.graphs.size() == 1 ? "" : " each") << "; uniform: "
            << (uniform ? "yes" : "no") << '\n';
  std::cout << "traces: " << dist.total << '\n';
  std::cout << "distinct graphs: " << dist.graphs.size() << ", expected " << expected_graphs
            << (count_ok ? "" : " (MISMATCH)") << '\n';

  bool residuals_ok = true;
  std::size_t checked = 0;
  for (std::uint32_t k = 1; k <= std::min<std::uint32_t>(2, n); ++k) {
    std::vector<std::uint32_t> d(k, 0);
    while (true) {
      const auto residual = rrdag::verify_inclusion_exclusion(dist, d);
      ++checked;
      if (residual != 0) {
        residuals_ok = false;
        std::cout << "inclusion-exclusion residual " << residual << " at d = (";
        for (std::size_t j = 0; j < k; ++j) std::cout << (j ? "," : "") << d[j];
        std::cout << ")\n";
      }
      std::uint32_t j = 0;
      for (; j < k; ++j) {
        if (++d[j] < n) break;
        d[j] = 0;
      }
      if (j == k) break;
    }
  }
  std::cout << "inclusion-exclusion: " << checked << " d-vectors, residuals "
            << (residuals_ok ? "all zero" : "NONZERO") << '\n';
  if (!a.fixture.empty()) {
    std::ofstream out(a.fixture, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + a.fixture);
    rrdag::write_oracle_fixture(out, dist);
  }
  return count_ok && uniform && residuals_ok ? kOk : kFailure;
}

struct ExperimentArgs {
  std::string config;
  std::string out_dir = ".";
  unsigned threads = 0;
  bool dry_run = false;
};

int cmd_experiment(const ExperimentArgs& a) {
  std::ifstream in(a.config);
  if (!in) throw UsageError("cannot open config " + a.config);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw rrdag::ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  // A manifest written by an earlier run replays its echoed config.
  const bool from_manifest = doc.is_object() && doc.value("tool", "") == "rrdag" && doc.contains("config");
  const rrdag::ExperimentConfig cfg = rrdag::parse_experiment_config(from_manifest ? doc["config"] : doc);
  const unsigned threads = a.threads == 0 ? rrdag::default_thread_count() : a.threads;
  if (a.dry_run) {
    json plan{{"config", rrdag::config_to_json(cfg)},
              {"threads", threads},
              {"log_floor", rrdag::log_floor(cfg.n, cfg.m)},
              {"eps_n", rrdag::epsilon_n(cfg.n, cfg.m)},
              {"vertex_steps", static_cast<double>(cfg.n) * static_cast<double>(cfg.trials)}};
    std::cout << plan.dump(2) << '\n';
    return kOk;
  }
  const auto start = std::chrono::steady_clock::now();
  const rrdag::Aggregate agg = rrdag::run_experiment(cfg, threads);
  const rrdag::ExperimentReport report = rrdag::summarize(agg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  json outputs = json::array();
  write_file(dir / "result.json", report.result.dump(2) + "\n");
  outputs.push_back((dir / "result.json").string());
  for (const auto& table : report.tables) {
    write_file(dir / table.name, rrdag::to_csv(table));
    outputs.push_back((dir / table.name).string());
  }
  bool all_passed = true;
  for (const auto& check : report.result["checks"]) all_passed = all_passed && check.value("passed", false);
  json manifest{{"tool", "rrdag"},
                {"version", kVersion},
                {"command", "experiment"},
                {"config", rrdag::config_to_json(cfg)},
                {"master_seed", cfg.master_seed},
                {"threads", threads},
                {"wall_time_seconds", wall},
                {"checks", report.result["checks"]},
                {"all_checks_passed", all_passed},
                {"outputs", outputs}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote " << outputs.size() << " files to " << dir.string() << "; checks "
            << (all_passed ? "passed" : "did not all pass") << '\n';
  return kOk;
}

struct ReplayArgs {
  std::string events;
  std::uint64_t m = 0;
  std::string order = "lexicographic";
  std::string out;
};

int cmd_replay(const ReplayArgs& a) {
  std::optional<std::uint32_t> m;
  if (a.m != 0) m = static_cast<std::uint32_t>(a.m);
  std::ifstream in(a.events);
  if (!in) throw UsageError("cannot open event file " + a.events);
  const auto trace = rrdag::read_trace(in, m);
  const auto g = rrdag::to_labeled_dag(trace, order_from(a.order));
  const std::string line = rrdag::to_jsonl(g) + "\n";
  if (a.out.empty()) {
    std::cout << line;
  } else {
    write_file(a.out, line);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random recursive DAGs and the Kingman (m,n)-coalescent"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Sample one graph as JSONL");
  generate->add_option("--n", gen.n, "Vertex count")->required();
  generate->add_option("--m", gen.m, "Out-degree cap")->required();
  generate->add_option("--seed", gen.seed, "Master seed");
  generate->add_option("--construction", gen.construction, "recursive | coalescent");
  generate->add_option("--order", gen.order, "Tree order for the coalescent: lexicographic | root_label");
  generate->add_option("--out", gen.out, "Output file (default stdout); a manifest is written beside it");

  OracleArgs ora;
  auto* oracle = app.add_subcommand("oracle", "Exhaust the coalescent and check exact uniformity");
  oracle->add_option("--n", ora.n, "Vertex count")->required();
  oracle->add_option("--m", ora.m, "Out-degree cap")->required();
  oracle->add_option("--fixture", ora.fixture, "Write the multiplicity table as JSON");
  oracle->add_option("--cap", ora.cap, "Largest trace count to exhaust");
  oracle->add_option("--order", ora.order, "lexicographic | root_label");
  oracle->add_option("--threads", ora.threads, "Worker threads (default RRDAG_THREADS or all cores)");

  ExperimentArgs exp;
  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment from a JSON config");
  experiment->add_option("config", exp.config, "Config file")->required();
  experiment->add_option("--out-dir", exp.out_dir, "Directory for result.json, CSV tables and manifest.json");
  experiment->add_option("--threads", exp.threads, "Worker threads (default RRDAG_THREADS or all cores)");
  experiment->add_flag("--dry-run", exp.dry_run, "Validate and print the plan only");

  ReplayArgs rep;
  auto* replay = app.add_subcommand("replay", "Replay an event file and print the relabeled graph");
  replay->add_option("events", rep.events, "Event file")->required();
  replay->add_option("--m", rep.m, "Override the inferred m");
  replay->add_option("--order", rep.order, "lexicographic | root_label");
  replay->add_option("--out", rep.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*oracle) return cmd_oracle(ora);
    if (*experiment) return cmd_experiment(exp);
    if (*replay) return cmd_replay(rep);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const rrdag::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const rrdag::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
