#include <doctest.h>

#include <sstream>

#include "rrdag/experiment.hpp"

using namespace rrdag;
using nlohmann::json;

namespace {

json base_config() {
  return json::parse(R"({"schema_version":1,"kind":"degree_tail","m":2,"n":500,"trials":50,"seed":3})");
}

std::string error_path(const json& doc) {
  try {
    parse_experiment_config(doc);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<none>";
}

const CsvTable& table(const ExperimentReport& r, const std::string& name) {
  for (const auto& t : r.tables) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("no table " + name);
}

}  // namespace

TEST_CASE("config parsing with defaults") {
  const auto cfg = parse_experiment_config(base_config());
  CHECK(cfg.kind == ExperimentKind::degree_tail);
  CHECK(cfg.construction == Construction::coalescent);
  CHECK(cfg.order == TreeOrder::root_label);
  CHECK(cfg.n == 500);
  CHECK(cfg.master_seed == 3);
  CHECK(cfg.k == 1);

  auto doc = base_config();
  doc["construction"] = "recursive";
  doc["window"] = {{"lo", -3}, {"hi", 4}};
  doc["tree_order"] = "lexicographic";
  const auto full = parse_experiment_config(doc);
  CHECK(full.construction == Construction::recursive);
  CHECK(full.window_lo == -3);
  CHECK(full.window_hi == 4);
  CHECK(parse_experiment_config(config_to_json(full)).window_hi == 4);
  CHECK(config_to_json(parse_experiment_config(config_to_json(full))) == config_to_json(full));
}

TEST_CASE("config errors carry JSON paths") {
  auto doc = base_config();
  doc["colour"] = "blue";
  CHECK(error_path(doc) == "/colour");

  doc = base_config();
  doc.erase("trials");
  CHECK(error_path(doc) == "/trials");

  doc = base_config();
  doc["m"] = -1;
  CHECK(error_path(doc) == "/m");

  doc = base_config();
  doc["schema_version"] = 2;
  CHECK(error_path(doc) == "/schema_version");

  doc = base_config();
  doc["kind"] = "bogus";
  CHECK(error_path(doc) == "/kind");

  doc = base_config();
  doc["window"] = {{"lo", "x"}, {"hi", 2}};
  CHECK(error_path(doc) == "/window/lo");

  doc = base_config();
  doc["tau_grid"] = {10, -2};
  CHECK(error_path(doc) == "/tau_grid/1");

  std::istringstream broken("{\"schema_version\": 1,");
  CHECK_THROWS_AS(read_experiment_config(broken), ConfigError);
}

TEST_CASE("csv and number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3) == "0.3333333333");
  CHECK(to_csv({"t", {"a", "b"}, {{"1", "2"}, {"3", "4"}}}) == "a,b\n1,2\n3,4\n");
}

TEST_CASE("degree_tail report columns") {
  auto doc = base_config();
  doc["k"] = 2;
  doc["max_degree"] = 5;
  const auto report = summarize(run_experiment(parse_experiment_config(doc)));
  const auto& t = table(report, "degree_tail.csv");
  CHECK(t.columns == std::vector<std::string>{"d", "empirical", "reference", "ci_lo", "ci_hi"});
  CHECK(t.rows.size() == 6);
  CHECK(t.rows[0][1] == "1");
  CHECK(table(report, "joint_tail.csv").rows.size() == 6);
  CHECK(report.result.contains("checks"));
}

TEST_CASE("other kinds produce their tables") {
  auto counts = base_config();
  counts["kind"] = "count_profile";
  counts["m"] = 1;
  counts["n"] = 1024;
  counts["window"] = {{"lo", -2}, {"hi", 1}};
  const auto c = summarize(run_experiment(parse_experiment_config(counts)));
  CHECK(table(c, "counts.csv").columns.front() == "trial");
  CHECK(table(c, "counts.csv").rows.size() == 50);
  CHECK(table(c, "max_degree.csv").columns ==
        std::vector<std::string>{"i", "empirical", "reference", "ci_lo", "ci_hi"});

  auto tau = base_config();
  tau["kind"] = "tau_k";
  tau["k"] = 3;
  tau["tau_grid"] = {10, 50};
  const auto t = summarize(run_experiment(parse_experiment_config(tau)));
  CHECK(table(t, "tau_tail.csv").columns ==
        std::vector<std::string>{"t", "empirical", "bound", "ci_lo", "ci_hi"});
  CHECK(table(t, "tau_tail.csv").rows.size() == 2);

  auto harvest = base_config();
  harvest["kind"] = "depth_label";
  harvest["thresholds"] = {3};
  harvest["conditioning"] = "harvest";
  const auto h = summarize(run_experiment(parse_experiment_config(harvest)));
  CHECK(h.result["approximate"] == true);
  CHECK(h.result.contains("caveat"));
  CHECK(table(h, "samples.csv").columns ==
        std::vector<std::string>{"depth", "label", "z_depth", "z_log_label"});
}

TEST_CASE("summaries are byte-identical across thread counts") {
  auto doc = base_config();
  doc["kind"] = "count_profile";
  doc["m"] = 1;
  doc["n"] = 2048;
  const auto cfg = parse_experiment_config(doc);
  const auto a = summarize(run_experiment(cfg, 1));
  const auto b = summarize(run_experiment(cfg, 4));
  CHECK(a.result.dump() == b.result.dump());
  REQUIRE(a.tables.size() == b.tables.size());
  for (std::size_t j = 0; j < a.tables.size(); ++j) CHECK(to_csv(a.tables[j]) == to_csv(b.tables[j]));
}
