// Acceptance run: one PASS/FAIL line per criterion. Seeds are 1000 + the
// criterion number and are never varied.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rrdag/coalescent.hpp"
#include "rrdag/enumeration.hpp"
#include "rrdag/experiment.hpp"
#include "rrdag/graph_io.hpp"
#include "rrdag/montecarlo.hpp"
#include "rrdag/stats.hpp"
#include "rrdag/theory.hpp"
#include "rrdag/trace_io.hpp"

using namespace rrdag;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

class Notes {
 public:
  void add(const std::string& s) { text_ += (text_.empty() ? "" : "; ") + s; }
  void check(bool ok, const std::string& s) {
    pass_ = pass_ && ok;
    add(s + (ok ? "" : " [x]"));
  }
  Outcome outcome() const { return {pass_, text_}; }

 private:
  bool pass_ = true;
  std::string text_;
};

std::uint64_t seed_for(int criterion) { return 1000 + static_cast<std::uint64_t>(criterion); }

const unsigned kThreads = default_thread_count();

// 1. Exact uniformity of the coalescent pushforward.
Outcome exact_uniformity() {
  Notes notes;
  const std::pair<std::uint32_t, Vertex> cases[] = {{1, 3}, {1, 4}, {2, 4}, {2, 5}};
  for (auto [m, n] : cases) {
    BigInt factorial = 1;
    for (Vertex j = 2; j <= n; ++j) factorial *= j;
    for (auto order : {TreeOrder::lexicographic, TreeOrder::root_label}) {
      const auto dist = exhaust_coalescent(n, m, {kDefaultExhaustCap, order, kThreads});
      const bool ok = BigInt(dist.graphs.size()) == count_increasing_dags(n, m) &&
                      dist.uniform_with(static_cast<std::uint64_t>(factorial)) &&
                      BigInt(dist.total) == count_coalescent_traces(n, m);
      if (order == TreeOrder::lexicographic || !ok) {
        notes.check(ok, "(" + std::to_string(m) + "," + std::to_string(n) + ") " +
                            std::to_string(dist.graphs.size()) + " graphs x " +
                            factorial.str());
      }
    }
  }
  return notes.outcome();
}

// 2. Streak, last loss and connection sets against the relabeled graph.
Outcome cross_representation() {
  CounterRng rng(Seed{seed_for(2), 0}, 7);
  std::uint64_t vertices = 0, mismatches = 0;
  const int traces = 10000;
  for (int j = 0; j < traces; ++j) {
    const std::uint32_t m = 1 + static_cast<std::uint32_t>(j % 4);
    const Vertex n = 2 + static_cast<Vertex>(rng.below(199));
    const auto trace = sample_trace(n, m, Seed{seed_for(2), static_cast<std::uint64_t>(j)});
    const auto r = replay_trace(trace, TreeOrder::lexicographic);
    const auto g = relabel_forest(n, m, r.forest);
    std::vector<Vertex> all(n);
    std::iota(all.begin(), all.end(), 1u);
    for (const auto& p : selection_profiles(trace, all, TreeOrder::lexicographic)) {
      const Vertex label = r.relabel[p.vertex - 1];
      ++vertices;
      if (label_from_last_loss(p) != label || degree_from_streak(p) != degree_of(g, label) ||
          ungreedy_from_connection_sets(p) != ungreedy_depth_walk(g, label)) {
        ++mismatches;
      }
    }
  }
  return {mismatches == 0, std::to_string(traces) + " traces, " + std::to_string(vertices) +
                               " vertices, " + std::to_string(mismatches) + " mismatches"};
}

// 3. Geometric degree tails, single and joint.
Outcome geometric_tails() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::degree_tail;
  cfg.construction = Construction::recursive;
  cfg.m = 2;
  cfg.n = 100000;
  cfg.k = 2;
  cfg.trials = 20000;
  cfg.max_degree = 15;
  cfg.master_seed = seed_for(3);
  const auto agg = run_experiment(cfg, kThreads);
  Notes notes;
  notes.add("recursive construction, T=" + std::to_string(cfg.trials));
  for (std::uint32_t joint : {1u, 2u}) {
    const auto rows = degree_tail_estimate(agg, joint, 4.0);
    int outside = 0;
    std::string worst;
    double worst_gap = -1;
    for (std::uint32_t d = 1; d <= 15; ++d) {
      const auto& r = rows[d];
      if (!r.ci.contains(r.reference)) ++outside;
      const double gap = std::abs(r.empirical - r.reference) / (r.ci.hi - r.ci.lo);
      if (gap > worst_gap) {
        worst_gap = gap;
        worst = "d=" + std::to_string(d) + " emp " + fmt(r.empirical) + " ref " + fmt(r.reference);
      }
    }
    notes.check(outside == 0, std::string(joint == 1 ? "single" : "joint (d,d)") + ": " +
                                  std::to_string(outside) + "/15 outside 4-sigma Wilson, widest gap " +
                                  worst);
  }
  return notes.outcome();
}

// Shared by 4, 5, 6 and 9.
const Aggregate& count_runs() {
  static const Aggregate agg = [] {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::count_profile;
    cfg.construction = Construction::coalescent;
    cfg.m = 1;
    cfg.n = 1u << 17;
    cfg.trials = 1000;
    cfg.master_seed = seed_for(4);
    return run_experiment(cfg, kThreads);
  }();
  return agg;
}

std::vector<std::uint64_t> histogram(const std::vector<double>& xs) {
  std::vector<std::uint64_t> h;
  for (double x : xs) {
    const auto v = static_cast<std::size_t>(x);
    if (v >= h.size()) h.resize(v + 1, 0);
    ++h[v];
  }
  return h;
}

// 4. Poisson marginals of X_0, X_1 and the mean of X_{>=1}.
Outcome poisson_marginals() {
  const auto& agg = count_runs();
  Notes notes;
  const auto x0 = chisq_vs_poisson(histogram(count_column(agg, 0)), 0.5, 0.01);
  notes.check(x0.passed, "X_0 vs Poisson(0.5): chi2 " + fmt(x0.statistic) + ", p " + fmt(x0.p_value));
  const auto x1 = chisq_vs_poisson(histogram(count_column(agg, 1)), 0.25, 0.01);
  notes.check(x1.passed, "X_1 vs Poisson(0.25): chi2 " + fmt(x1.statistic) + ", p " + fmt(x1.p_value));
  const auto ge1 = mean_test(count_column(agg, 1, true), 0.5, 4.0);
  notes.check(ge1.passed, "mean X_>=1 " + fmt(ge1.estimate) + " (z " + fmt(ge1.statistic, 3) + ")");
  return notes.outcome();
}

// 5. Maximum degree tail.
Outcome max_degree() {
  const auto& agg = count_runs();
  Notes notes;
  for (int i = -2; i <= 3; ++i) {
    const double emp = static_cast<double>(max_degree_at_least(agg, i)) /
                       static_cast<double>(agg.max_degrees.size());
    const double ref = max_degree_tail_limit(1, i);
    notes.check(std::abs(emp - ref) <= 0.04,
                "i=" + std::to_string(i) + " emp " + fmt(emp, 3) + " ref " + fmt(ref, 3));
  }
  return notes.outcome();
}

// 6. Normality of the standardized X_{-8}.
Outcome count_clt() {
  const auto& agg = count_runs();
  auto xs = count_column(agg, -8);
  xs.resize(500);
  const auto p = xin_normal_params(1, -8, agg.eps_n);
  double mean = 0, var = 0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  for (double& x : xs) x = p.standardize(x);
  const auto ks = ks_normal(xs, 0.01);
  return {ks.passed, "first 500 trials, KS D " + fmt(ks.statistic) + ", p " + fmt(ks.p_value) +
                         "; sample mean " + fmt(mean) + " sd " + fmt(std::sqrt(var)) +
                         " vs reference " + fmt(p.mean) + ", " + fmt(p.sd)};
}

// 7. Conditional depth/label law.
Outcome depth_label() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::depth_label;
  cfg.construction = Construction::coalescent;
  cfg.m = 2;
  cfg.n = 100000;
  cfg.thresholds = {static_cast<std::uint32_t>(std::floor(1.5 * std::log(100000.0)))};
  cfg.conditioning = Conditioning::harvest;
  cfg.trials = 40;
  cfg.master_seed = seed_for(7);
  const auto agg = run_experiment(cfg, kThreads);
  const auto z = standardized_depth_label(agg);
  Notes notes;
  notes.add("harvest (approximate, dependent samples), d=" + std::to_string(cfg.thresholds[0]) +
            ", " + std::to_string(z.depth.size()) + " samples");
  notes.check(z.depth.size() >= 2000, "sample size");
  const auto kd = ks_normal(z.depth, 0.01);
  notes.check(kd.passed, "KS depth p " + fmt(kd.p_value));
  const auto kl = ks_normal(z.log_label, 0.01);
  notes.check(kl.passed, "KS log-label p " + fmt(kl.p_value));
  const auto c = correlation_ci(z.depth, z.log_label);
  const double rho = std::sqrt(0.4);
  notes.check(c.ci.contains(rho) && (c.ci.hi - c.ci.lo) / 2 <= 0.05,
              "r " + fmt(c.r) + " CI [" + fmt(c.ci.lo) + ", " + fmt(c.ci.hi) + "] vs " + fmt(rho));

  // Faithful spot check: one uniform vertex per graph, rejection.
  ExperimentConfig spot = cfg;
  spot.construction = Construction::recursive;
  spot.conditioning = Conditioning::faithful;
  spot.trials = 100000;
  const auto fa = run_experiment(spot, kThreads);
  const auto fz = standardized_depth_label(fa);
  if (fz.depth.size() >= 2) {
    const auto md = mean_test(fz.depth, 0.0, 4.0);
    const auto ml = mean_test(fz.log_label, 0.0, 4.0);
    std::string spot_note = "faithful spot check (recursive, T=" + std::to_string(spot.trials) +
                            "): " + std::to_string(fz.depth.size()) + " accepted, mean z_depth " +
                            fmt(md.estimate, 3) + ", mean z_log_label " + fmt(ml.estimate, 3);
    if (fz.depth.size() >= 100) {
      spot_note += ", KS p " + fmt(ks_normal(fz.depth).p_value, 3) + " / " +
                   fmt(ks_normal(fz.log_label).p_value, 3) + ", r " +
                   fmt(correlation_ci(fz.depth, fz.log_label).r, 3);
    }
    notes.add(spot_note);
  }
  return notes.outcome();
}

// 8. Asymptotically independent labels.
Outcome multi_label() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::multi_label;
  cfg.construction = Construction::coalescent;
  cfg.m = 2;
  cfg.n = 100000;
  cfg.k = 2;
  const auto d = static_cast<std::uint32_t>(std::floor(std::log(100000.0)));
  cfg.thresholds = {d, d};
  cfg.conditioning = Conditioning::harvest;
  cfg.trials = 6;
  cfg.master_seed = seed_for(8);
  const auto agg = run_experiment(cfg, kThreads);
  const auto z = standardized_labels(agg);
  Notes notes;
  notes.add("harvest, d=(" + std::to_string(d) + "," + std::to_string(d) + "), " +
            std::to_string(z[0].size()) + " pairs");
  notes.check(z[0].size() >= 2000, "sample size");
  const auto c = correlation_ci(z[0], z[1]);
  notes.check(std::abs(c.r) < 0.1, "corr " + fmt(c.r));
  std::uint64_t both = 0;
  for (std::size_t j = 0; j < z[0].size(); ++j) both += (z[0][j] > 0 && z[1][j] > 0) ? 1 : 0;
  const auto q = proportion_test(both, z[0].size(), 0.25, 4.0);
  notes.check(q.passed, "P(z1>0, z2>0) " + fmt(q.estimate) + " (z " + fmt(q.statistic, 3) + ")");
  double m0 = 0;
  for (double x : z[0]) m0 += x;
  notes.add("mean z " + fmt(m0 / static_cast<double>(z[0].size()), 3));
  return notes.outcome();
}

// 9. Second factorial moment of X_0.
Outcome factorial_moment() {
  const FactorialTerm term[] = {{0, false, 2}};
  const auto r = mean_test(factorial_moment_samples(count_runs(), term), 0.25, 4.0);
  return {r.passed, "E[(X_0)_2] " + fmt(r.estimate) + " (z " + fmt(r.statistic, 3) + ")"};
}

// 10. Degree and leading coefficient of f_m.
Outcome fm_shape() {
  int bad = 0;
  for (std::uint32_t m = 1; m <= 6; ++m) {
    for (std::uint32_t k = 2; k <= 6; ++k) {
      const auto f = fm_polynomial(m, k);
      if (f.degree() != static_cast<int>(m) - 1 || f.leading() != BigInt((m + 1) * m * k * (k - 1) / 2)) {
        ++bad;
      }
    }
  }
  return {bad == 0, "36 (m,k) pairs, " + std::to_string(bad) + " mismatches"};
}

// 11. Tail bound for tau_k.
Outcome tau_bound() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::tau_k;
  cfg.m = 2;
  cfg.k = 3;
  cfg.n = 10000;
  cfg.trials = 5000;
  cfg.master_seed = seed_for(11);
  const auto agg = run_experiment(cfg, kThreads);
  Notes notes;
  for (std::uint32_t t : {50u, 100u, 200u, 500u}) {
    const auto r = proportion_upper_bound(tau_at_least(agg, t), cfg.trials,
                                          tau_tail_bound(cfg.m, cfg.k, t), 3.0);
    notes.check(r.passed, "t=" + std::to_string(t) + " emp " + fmt(r.estimate, 3) + " bound " +
                              fmt(tau_tail_bound(cfg.m, cfg.k, t), 3));
  }
  return notes.outcome();
}

// 12. Inclusion-exclusion with exact rationals.
Outcome inclusion_exclusion() {
  Notes notes;
  const std::pair<std::uint32_t, Vertex> cases[] = {{2, 5}, {1, 4}};
  for (auto [m, n] : cases) {
    const auto dist = exhaust_coalescent(n, m);
    std::size_t checked = 0, nonzero = 0;
    for (std::uint32_t a = 0; a < n; ++a) {
      const std::uint32_t one[] = {a};
      ++checked;
      if (verify_inclusion_exclusion(dist, one) != 0) ++nonzero;
      for (std::uint32_t b = 0; b < n; ++b) {
        const std::uint32_t two[] = {a, b};
        ++checked;
        if (verify_inclusion_exclusion(dist, two) != 0) ++nonzero;
      }
    }
    notes.check(nonzero == 0, "(" + std::to_string(m) + "," + std::to_string(n) + ") " +
                                  std::to_string(checked) + " d-vectors, " + std::to_string(nonzero) +
                                  " nonzero residuals");
  }
  return notes.outcome();
}

// 13. Figure replay fixture.
Outcome figure_replay() {
  const std::string dir = std::string(RRDAG_SOURCE_DIR) + "/fixtures/";
  const auto trace = read_trace_file(dir + "figure_2_5.events");
  std::ifstream in(dir + "figure_2_5.expected.jsonl");
  const auto expected = read_jsonl(in);
  Notes notes;
  for (auto order : {TreeOrder::lexicographic, TreeOrder::root_label}) {
    const auto g = to_labeled_dag(trace, order);
    notes.check(expected.size() == 1 && g == expected[0],
                std::string(to_string(order)) + ": " + to_jsonl(g));
  }
  return notes.outcome();
}

std::string rendered(const Aggregate& agg) {
  const auto report = summarize(agg);
  std::string out = report.result.dump();
  for (const auto& t : report.tables) out += "\n" + t.name + "\n" + to_csv(t);
  return out;
}

// 14. Identical outputs for any thread count.
Outcome determinism() {
  const char* configs[] = {
      R"({"schema_version":1,"kind":"degree_tail","m":2,"n":20000,"trials":60,"seed":1014,"k":2})",
      R"({"schema_version":1,"kind":"count_profile","m":1,"n":16384,"trials":40,"seed":1014})",
      R"({"schema_version":1,"kind":"depth_label","m":2,"n":5000,"trials":10,"seed":1014,
          "thresholds":[8],"conditioning":"harvest"})",
      R"({"schema_version":1,"kind":"tau_k","m":2,"n":3000,"trials":100,"seed":1014,"k":3,
          "tau_grid":[20,50]})"};
  Notes notes;
  for (const char* text : configs) {
    const auto cfg = parse_experiment_config(nlohmann::json::parse(text));
    const auto base = rendered(run_experiment(cfg, 1));
    bool same = true;
    for (unsigned threads : {1u, 2u, 5u}) same = same && rendered(run_experiment(cfg, threads)) == base;
    notes.check(same, std::string(to_string(cfg.kind)) + " at 1/2/5 threads");
  }
  return notes.outcome();
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  // Criteria listed here may fail without failing the run. Their lines still
  // read FAIL; any other failure, or an error, gives a nonzero exit.
  std::vector<int> expect_red;
  CLI::App app{"Acceptance criteria"};
  app.add_option("--expect-red", expect_red, "criteria known to fail at the stated tolerances")
      ->delimiter(',');
  std::string report_path;
  app.add_option("--report", report_path, "also write the result lines to this file");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> known(expect_red.begin(), expect_red.end());
  std::ofstream report;
  if (!report_path.empty()) report.open(report_path);
  auto emit = [&](const std::string& line) {
    std::cout << line << std::endl;
    if (report) report << line << '\n' << std::flush;
  };

  const std::vector<Criterion> criteria = {
      {1, "exact uniformity", exact_uniformity},
      {2, "cross-representation equality", cross_representation},
      {3, "geometric degree tails", geometric_tails},
      {4, "Poisson count marginals", poisson_marginals},
      {5, "maximum degree", max_degree},
      {6, "count CLT", count_clt},
      {7, "conditional depth/label law", depth_label},
      {8, "multi-vertex labels", multi_label},
      {9, "factorial moments", factorial_moment},
      {10, "f_m polynomial", fm_shape},
      {11, "tau_k tail bound", tau_bound},
      {12, "inclusion-exclusion", inclusion_exclusion},
      {13, "figure replay", figure_replay},
      {14, "determinism across threads", determinism},
  };
  int failures = 0, unexpected = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool listed = known.contains(c.id);
    if (!o.pass) ++failures;
    if (!o.pass && !listed) ++unexpected;
    char head[96];
    std::snprintf(head, sizeof head, "criterion %2d %s  %s (%.1f s): ", c.id, o.pass ? "PASS" : "FAIL",
                  c.name, secs);
    emit(head + o.detail +
         (listed ? (o.pass ? " (listed as expected red, passed)" : " (expected red)") : ""));
  }
  emit(std::to_string(criteria.size() - failures) + " of " + std::to_string(criteria.size()) +
       " criteria passed");
  if (unexpected > 0) emit(std::to_string(unexpected) + " unexpected failure(s)");
  return unexpected == 0 ? 0 : 1;
}
