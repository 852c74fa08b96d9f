#include "rrdag/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <set>

namespace rrdag {
namespace {

using nlohmann::json;

const std::set<std::string> kKnownFields = {
    "schema_version", "kind",      "construction", "tree_order", "m",          "n",
    "trials",         "seed",      "k",            "thresholds", "conditioning",
    "min_acceptance", "max_degree", "window",      "tau_grid"};

template <class T>
T unsigned_field(const json& doc, const std::string& key, T lo, T hi) {
  const json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError("/" + key, "expected a non-negative integer");
  }
  const auto x = v.get<std::uint64_t>();
  if (x < lo || x > hi) {
    throw ConfigError("/" + key, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<T>(x);
}

std::string string_field(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_string()) throw ConfigError("/" + key, "expected a string");
  return v.get<std::string>();
}

std::vector<std::uint32_t> uint_list(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_array()) throw ConfigError("/" + key, "expected an array");
  std::vector<std::uint32_t> out;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (!v[j].is_number_integer() || v[j].get<std::int64_t>() < 0 ||
        v[j].get<std::uint64_t>() > UINT32_MAX) {
      throw ConfigError("/" + key + "/" + std::to_string(j), "expected a non-negative 32-bit integer");
    }
    out.push_back(v[j].get<std::uint32_t>());
  }
  return out;
}

std::int32_t int_field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw ConfigError(path + "/" + key, "missing field");
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < -1000 || v.get<std::int64_t>() > 1000) {
    throw ConfigError(path + "/" + key, "expected an integer in [-1000, 1000]");
  }
  return v.get<std::int32_t>();
}

TailRow tail_row(std::uint32_t d, std::uint64_t hits, std::uint64_t trials, double reference, double z) {
  return {d, hits, trials, static_cast<double>(hits) / static_cast<double>(trials), reference,
          wilson_interval(hits, trials, z)};
}

CsvTable tail_table(const std::string& name, const std::string& key, const std::string& ref,
                    const std::vector<TailRow>& rows, const std::vector<std::int64_t>& keys) {
  CsvTable t{name, {key, "empirical", ref, "ci_lo", "ci_hi"}, {}};
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& r = rows[j];
    t.rows.push_back({std::to_string(keys[j]), format_number(r.empirical), format_number(r.reference),
                      format_number(r.ci.lo), format_number(r.ci.hi)});
  }
  return t;
}

json distribution_summary(std::span<const double> xs) {
  double mean = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(std::max<std::size_t>(xs.size(), 1));
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
  return {{"count", xs.size()}, {"mean", mean}, {"sd", sd}};
}

void summarize_degree_tail(const Aggregate& agg, ExperimentReport& out) {
  const auto& cfg = agg.config;
  json checks = json::array();
  auto emit = [&](std::uint32_t joint, const std::string& name) {
    const auto rows = degree_tail_estimate(agg, joint);
    std::vector<std::int64_t> keys;
    for (const auto& r : rows) {
      keys.push_back(r.d);
      if (r.d == 0) continue;
      GofReport g = proportion_test(r.successes, r.trials, r.reference, 4.0);
      g.reference = "geometric_tail(m, " + std::to_string(joint) + " x " + std::to_string(r.d) + ")";
      json j = to_json(g);
      j["d"] = r.d;
      j["joint"] = joint;
      checks.push_back(j);
    }
    out.tables.push_back(tail_table(name, "d", "reference", rows, keys));
  };
  emit(1, "degree_tail.csv");
  if (cfg.k >= 2) emit(cfg.k, "joint_tail.csv");
  out.result["checks"] = checks;
  out.result["degree_histogram"] = agg.degree_histogram;
}

void summarize_count_profile(const Aggregate& agg, ExperimentReport& out) {
  const auto& cfg = agg.config;
  const std::uint32_t w = agg.window_size();
  const std::size_t trials = agg.max_degrees.size();

  CsvTable counts{"counts.csv", {"trial", "max_degree"}, {}};
  for (std::int32_t j = cfg.window_lo; j <= cfg.window_hi; ++j) counts.columns.push_back("x_" + std::to_string(j));
  for (std::int32_t j = cfg.window_lo; j <= cfg.window_hi; ++j) counts.columns.push_back("x_ge_" + std::to_string(j));
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<std::string> row{std::to_string(t), std::to_string(agg.max_degrees[t])};
    for (std::uint32_t c = 0; c < 2 * w; ++c) row.push_back(std::to_string(agg.window_counts[t * 2 * w + c]));
    counts.rows.push_back(std::move(row));
  }
  out.tables.push_back(std::move(counts));

  json checks = json::array();
  json columns = json::array();
  for (std::int32_t j = cfg.window_lo; j <= cfg.window_hi; ++j) {
    const double mean = poisson_param(cfg.m, j, agg.eps_n);
    const auto exact = count_column(agg, j);
    const auto tail = count_column(agg, j, true);
    json col{{"offset", j},
             {"degree", agg.log_floor + j},
             {"x", distribution_summary(exact)},
             {"x_ge", distribution_summary(tail)},
             {"poisson_mean", mean},
             {"tail_mean", std::pow(static_cast<double>(cfg.m) / (cfg.m + 1), j - agg.eps_n)}};
    columns.push_back(col);
    std::vector<std::uint64_t> hist;
    for (double x : exact) {
      const auto v = static_cast<std::size_t>(x);
      if (v >= hist.size()) hist.resize(v + 1, 0);
      ++hist[v];
    }
    try {
      json c = to_json(chisq_vs_poisson(hist, mean));
      c["offset"] = j;
      checks.push_back(c);
    } catch (const InsufficientData&) {
      // Too few bins at this offset for a chi-square.
    }
  }
  out.result["columns"] = columns;
  out.result["checks"] = checks;

  std::vector<TailRow> rows;
  std::vector<std::int64_t> keys;
  for (std::int32_t i = cfg.window_lo; i <= cfg.window_hi; ++i) {
    rows.push_back(tail_row(0, max_degree_at_least(agg, i), trials,
                            max_degree_tail_limit(cfg.m, i - agg.eps_n), 4.0));
    keys.push_back(i);
  }
  out.tables.push_back(tail_table("max_degree.csv", "i", "reference", rows, keys));
}

void summarize_depth_label(const Aggregate& agg, ExperimentReport& out) {
  const auto& cfg = agg.config;
  CsvTable samples{"samples.csv", {"depth", "label", "z_depth", "z_log_label"}, {}};
  json checks = json::array();
  if (cfg.thresholds.front() > 0) {
    const auto z = standardized_depth_label(agg);
    for (std::size_t j = 0; j < agg.depths.size(); ++j) {
      samples.rows.push_back({std::to_string(agg.depths[j]), std::to_string(agg.labels[j]),
                              format_number(z.depth[j]), format_number(z.log_label[j])});
    }
    const double a = cfg.thresholds.front() / std::log(static_cast<double>(cfg.n));
    out.result["a"] = a;
    out.result["rho_reference"] = depth_label_rho(cfg.m, a);
    out.result["depth"] = distribution_summary(z.depth);
    out.result["log_label"] = distribution_summary(z.log_label);
    if (z.depth.size() >= 100) {
      json kd = to_json(ks_normal(z.depth));
      kd["variable"] = "depth";
      json kl = to_json(ks_normal(z.log_label));
      kl["variable"] = "log_label";
      checks.push_back(kd);
      checks.push_back(kl);
      const auto corr = correlation_ci(z.depth, z.log_label);
      out.result["correlation"] = {{"r", corr.r}, {"ci_lo", corr.ci.lo}, {"ci_hi", corr.ci.hi}};
    }
  }
  out.tables.push_back(std::move(samples));
  out.result["checks"] = checks;
}

void summarize_multi_label(const Aggregate& agg, ExperimentReport& out) {
  const auto& cfg = agg.config;
  CsvTable samples{"samples.csv", {}, {}};
  for (std::uint32_t j = 1; j <= cfg.k; ++j) samples.columns.push_back("label_" + std::to_string(j));
  for (std::uint32_t j = 1; j <= cfg.k; ++j) samples.columns.push_back("z_" + std::to_string(j));
  json checks = json::array();
  const bool positive = std::all_of(cfg.thresholds.begin(), cfg.thresholds.end(), [](auto d) { return d > 0; });
  if (positive) {
    const auto z = standardized_labels(agg);
    const std::size_t count = z.front().size();
    for (std::size_t s = 0; s < count; ++s) {
      std::vector<std::string> row;
      for (std::uint32_t j = 0; j < cfg.k; ++j) row.push_back(std::to_string(agg.label_tuples[s * cfg.k + j]));
      for (std::uint32_t j = 0; j < cfg.k; ++j) row.push_back(format_number(z[j][s]));
      samples.rows.push_back(std::move(row));
    }
    if (count >= 100) {
      for (std::uint32_t j = 0; j < cfg.k; ++j) {
        json ks = to_json(ks_normal(z[j]));
        ks["coordinate"] = j + 1;
        checks.push_back(ks);
      }
      std::uint64_t quadrant = 0;
      for (std::size_t s = 0; s < count; ++s) {
        bool all = true;
        for (std::uint32_t j = 0; j < cfg.k; ++j) all = all && z[j][s] > 0;
        quadrant += all ? 1 : 0;
      }
      const std::vector<double> origin(cfg.k, 0.0);
      GofReport q = proportion_test(quadrant, count, multi_label_limit(origin), 4.0);
      q.reference = "multi_label_limit(origin)";
      checks.push_back(to_json(q));
      if (cfg.k >= 2) {
        const auto corr = correlation_ci(z[0], z[1]);
        out.result["correlation"] = {{"r", corr.r}, {"ci_lo", corr.ci.lo}, {"ci_hi", corr.ci.hi}};
      }
    }
  }
  out.tables.push_back(std::move(samples));
  out.result["checks"] = checks;
}

void summarize_tau(const Aggregate& agg, ExperimentReport& out) {
  const auto& cfg = agg.config;
  std::vector<std::uint32_t> grid = cfg.tau_grid;
  if (grid.empty()) {
    for (std::uint32_t t = cfg.m + 2; t <= cfg.n; t *= 2) grid.push_back(t);
  }
  CsvTable table{"tau_tail.csv", {"t", "empirical", "bound", "ci_lo", "ci_hi"}, {}};
  json checks = json::array();
  for (std::uint32_t t : grid) {
    if (t <= cfg.m + 1) continue;
    const double bound = tau_tail_bound(cfg.m, cfg.k, t);
    const std::uint64_t hits = tau_at_least(agg, t);
    GofReport g = proportion_upper_bound(hits, agg.taus.size(), bound, 3.0);
    g.reference = "tau_tail_bound(m, k, " + std::to_string(t) + ")";
    json j = to_json(g);
    j["t"] = t;
    checks.push_back(j);
    table.rows.push_back({std::to_string(t), format_number(g.estimate), format_number(bound),
                          format_number(g.interval->lo), format_number(g.interval->hi)});
  }
  std::map<std::uint32_t, std::uint64_t> hist;
  for (auto t : agg.taus) ++hist[t];
  json h = json::array();
  for (auto [t, c] : hist) h.push_back({t, c});
  out.result["tau_histogram"] = h;
  out.result["checks"] = checks;
  out.tables.push_back(std::move(table));
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

ExperimentConfig parse_experiment_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("", "expected a JSON object");
  for (const auto& item : doc.items()) {
    if (!kKnownFields.contains(item.key())) throw ConfigError("/" + item.key(), "unknown field");
  }
  for (const char* key : {"schema_version", "kind", "m", "n", "trials", "seed"}) {
    if (!doc.contains(key)) throw ConfigError(std::string("/") + key, "missing field");
  }
  if (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<std::int64_t>() != kConfigSchemaVersion) {
    throw ConfigError("/schema_version", "unsupported; expected " + std::to_string(kConfigSchemaVersion));
  }
  ExperimentConfig cfg;
  const auto kind = parse_experiment_kind(string_field(doc, "kind"));
  if (!kind) throw ConfigError("/kind", "expected one of degree_tail, count_profile, depth_label, multi_label, tau_k");
  cfg.kind = *kind;
  cfg.m = unsigned_field<std::uint32_t>(doc, "m", 1, 1u << 20);
  cfg.n = unsigned_field<Vertex>(doc, "n", 1, UINT32_MAX);
  cfg.trials = unsigned_field<std::uint64_t>(doc, "trials", 1, std::uint64_t{1} << 40);
  cfg.master_seed = unsigned_field<std::uint64_t>(doc, "seed", 0, UINT64_MAX);
  if (doc.contains("construction")) {
    const auto c = parse_construction(string_field(doc, "construction"));
    if (!c) throw ConfigError("/construction", "expected recursive or coalescent");
    cfg.construction = *c;
  }
  if (doc.contains("tree_order")) {
    const auto o = parse_tree_order(string_field(doc, "tree_order"));
    if (!o) throw ConfigError("/tree_order", "expected lexicographic or root_label");
    cfg.order = *o;
  }
  if (doc.contains("k")) cfg.k = unsigned_field<std::uint32_t>(doc, "k", 1, UINT32_MAX);
  if (doc.contains("thresholds")) cfg.thresholds = uint_list(doc, "thresholds");
  if (doc.contains("conditioning")) {
    const auto c = parse_conditioning(string_field(doc, "conditioning"));
    if (!c) throw ConfigError("/conditioning", "expected faithful or harvest");
    cfg.conditioning = *c;
  }
  if (doc.contains("min_acceptance")) {
    if (!doc["min_acceptance"].is_number()) throw ConfigError("/min_acceptance", "expected a number");
    cfg.min_acceptance = doc["min_acceptance"].get<double>();
  }
  if (doc.contains("max_degree")) cfg.max_degree = unsigned_field<std::uint32_t>(doc, "max_degree", 0, 10000);
  if (doc.contains("window")) {
    const json& w = doc["window"];
    if (!w.is_object()) throw ConfigError("/window", "expected an object with lo and hi");
    for (const auto& item : w.items()) {
      if (item.key() != "lo" && item.key() != "hi") throw ConfigError("/window/" + item.key(), "unknown field");
    }
    cfg.window_lo = int_field(w, "lo", "/window");
    cfg.window_hi = int_field(w, "hi", "/window");
  }
  if (doc.contains("tau_grid")) cfg.tau_grid = uint_list(doc, "tau_grid");
  validate(cfg);
  return cfg;
}

ExperimentConfig read_experiment_config(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_experiment_config(doc);
}

json config_to_json(const ExperimentConfig& cfg) {
  return {{"schema_version", kConfigSchemaVersion},
          {"kind", to_string(cfg.kind)},
          {"construction", to_string(cfg.construction)},
          {"tree_order", to_string(cfg.order)},
          {"m", cfg.m},
          {"n", cfg.n},
          {"trials", cfg.trials},
          {"seed", cfg.master_seed},
          {"k", cfg.k},
          {"thresholds", cfg.thresholds},
          {"conditioning", to_string(cfg.conditioning)},
          {"min_acceptance", cfg.min_acceptance},
          {"max_degree", cfg.max_degree},
          {"window", {{"lo", cfg.window_lo}, {"hi", cfg.window_hi}}},
          {"tau_grid", cfg.tau_grid}};
}

json to_json(const GofReport& r) {
  json j{{"test", r.test},
         {"reference", r.reference},
         {"statistic", std::isfinite(r.statistic) ? json(r.statistic) : json(format_number(r.statistic))},
         {"p_value", r.p_value},
         {"sample_size", r.sample_size},
         {"estimate", r.estimate},
         {"passed", r.passed}};
  if (r.alpha > 0) j["alpha"] = r.alpha;
  if (r.z_threshold > 0) j["z_threshold"] = r.z_threshold;
  if (r.dof > 0) j["dof"] = r.dof;
  if (r.degenerate) j["degenerate"] = true;
  if (r.interval) j["interval"] = {r.interval->lo, r.interval->hi};
  return j;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j) out.push_back(',');
      out += cells[j];
    }
    out.push_back('\n');
  };
  line(table.columns);
  for (const auto& row : table.rows) line(row);
  return out;
}

ExperimentReport summarize(const Aggregate& agg) {
  ExperimentReport out;
  const auto& cfg = agg.config;
  out.result["config"] = config_to_json(cfg);
  out.result["log_floor"] = agg.log_floor;
  out.result["eps_n"] = agg.eps_n;
  const bool conditional = cfg.kind == ExperimentKind::depth_label || cfg.kind == ExperimentKind::multi_label;
  if (conditional) {
    out.result["accepted_trials"] = agg.accepted_trials;
    out.result["samples"] = cfg.kind == ExperimentKind::depth_label ? agg.labels.size()
                                                                     : agg.label_tuples.size() / cfg.k;
    out.result["approximate"] = cfg.conditioning == Conditioning::harvest;
    if (cfg.conditioning == Conditioning::harvest) {
      out.result["caveat"] =
          "harvest mode keeps every qualifying vertex of each graph; samples from one graph are dependent";
    }
    out.result["tolerance_note"] = "finite-n bias of the conditional limit laws is unquantified; thresholds are engineering choices";
  }
  switch (cfg.kind) {
    case ExperimentKind::degree_tail: summarize_degree_tail(agg, out); break;
    case ExperimentKind::count_profile: summarize_count_profile(agg, out); break;
    case ExperimentKind::depth_label: summarize_depth_label(agg, out); break;
    case ExperimentKind::multi_label: summarize_multi_label(agg, out); break;
    case ExperimentKind::tau_k: summarize_tau(agg, out); break;
  }
  return out;
}

}  // namespace rrdag
