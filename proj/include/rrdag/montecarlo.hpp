#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rrdag/graph.hpp"
#include "rrdag/random.hpp"
#include "rrdag/stats.hpp"
#include "rrdag/theory.hpp"
#include "rrdag/tree_order.hpp"

namespace rrdag {

enum class Construction { recursive, coalescent };
enum class ExperimentKind { degree_tail, count_profile, depth_label, multi_label, tau_k };
enum class Conditioning { faithful, harvest };

std::string_view to_string(Construction c);
std::string_view to_string(ExperimentKind k);
std::string_view to_string(Conditioning c);
std::optional<Construction> parse_construction(std::string_view text);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view text);
std::optional<Conditioning> parse_conditioning(std::string_view text);

/// An experiment description that cannot run; `path` names the offending
/// field (JSON-pointer style when it came from a file).
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Faithful conditioning accepted fewer trials than the configured floor.
class AcceptanceTooLow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::degree_tail;
  Construction construction = Construction::coalescent;
  TreeOrder order = TreeOrder::root_label;
  std::uint32_t m = 1;
  Vertex n = 1;
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;

  /// Tracked uniform distinct vertices (degree_tail, multi_label, tau_k).
  std::uint32_t k = 1;
  /// Degree thresholds: one for depth_label, k for multi_label.
  std::vector<std::uint32_t> thresholds;
  Conditioning conditioning = Conditioning::faithful;
  /// Minimum accepted fraction under faithful conditioning; 0 disables.
  double min_acceptance = 0.0;

  /// Largest degree tabulated by degree_tail reports.
  std::uint32_t max_degree = 20;
  /// count_profile window, offsets from ⌊log_{(m+1)/m} n⌋.
  std::int32_t window_lo = -10;
  std::int32_t window_hi = 5;
  /// tau_k report grid.
  std::vector<std::uint32_t> tau_grid;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError naming the first invalid field.
void validate(const ExperimentConfig& cfg);

/// Everything a run keeps, trial-major where per-trial. Holds only integers
/// so equal configs give equal aggregates for any thread count.
struct Aggregate {
  ExperimentConfig config;
  std::int64_t log_floor = 0;
  double eps_n = 0.0;

  /// Degree histogram over all vertices of all trials (degree_tail,
  /// count_profile).
  std::vector<std::uint64_t> degree_histogram;
  /// k degrees per trial (degree_tail).
  std::vector<std::uint32_t> tracked_degrees;

  /// Per trial: X_j for j in the window, then X_{>=j}, window_size each.
  std::vector<std::uint32_t> window_counts;
  std::vector<std::uint32_t> max_degrees;

  /// Accepted conditional samples (depth_label): ungreedy depth and label.
  std::vector<std::uint32_t> depths;
  std::vector<Vertex> labels;
  /// Labels of accepted k-tuples, k per sample (multi_label).
  std::vector<Vertex> label_tuples;
  /// Trials contributing at least one sample.
  std::uint64_t accepted_trials = 0;

  /// τ_k per trial.
  std::vector<std::uint32_t> taus;

  std::uint32_t window_size() const {
    return static_cast<std::uint32_t>(config.window_hi - config.window_lo + 1);
  }
  bool operator==(const Aggregate&) const = default;
};

/// RRDAG_THREADS if set and positive, else hardware concurrency (at least 1).
unsigned default_thread_count();

/// Runs cfg.trials independent trials, trial t seeded by (master_seed, t).
Aggregate run_experiment(const ExperimentConfig& cfg, unsigned threads = 1);

/// Calls body(t) for t in [0, count) on `threads` workers; each index runs
/// exactly once. Results must be written to per-index slots.
void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t)>& body);

struct TailRow {
  std::uint32_t d = 0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double empirical = 0.0;
  double reference = 0.0;
  Interval ci;
};

/// P(d(V_j) >= d for the first `joint` tracked vertices), d = 0..max_degree,
/// against geometric_tail(m, (d,...,d)), with Wilson intervals at z.
std::vector<TailRow> degree_tail_estimate(const Aggregate& agg, std::uint32_t joint = 1,
                                          double z = 4.0);

/// X_j (or X_{>=j}) for window offset j, one value per trial.
std::vector<double> count_column(const Aggregate& agg, std::int32_t offset, bool at_least = false);

struct FactorialTerm {
  std::int32_t offset = 0;
  bool at_least = false;
  std::uint32_t order = 0;
};

/// Per-trial ∏ (X)_order falling factorials, for a mean test.
std::vector<double> factorial_moment_samples(const Aggregate& agg,
                                             std::span<const FactorialTerm> terms);

/// Count of trials with Δ_n >= ⌊log⌋ + offset.
std::uint64_t max_degree_at_least(const Aggregate& agg, std::int32_t offset);

/// Standardized (depth, ln label) pairs for depth_label aggregates.
struct StandardizedPairs {
  std::vector<double> depth;
  std::vector<double> log_label;
};
StandardizedPairs standardized_depth_label(const Aggregate& agg);

/// Standardized ln labels of multi_label aggregates, one vector per coordinate.
std::vector<std::vector<double>> standardized_labels(const Aggregate& agg);

/// Trials with τ_k >= t.
std::uint64_t tau_at_least(const Aggregate& agg, std::uint32_t t);

}  // namespace rrdag
