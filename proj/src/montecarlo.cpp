#include "rrdag/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "rrdag/coalescent.hpp"
#include "rrdag/recursive.hpp"

namespace rrdag {
namespace {

constexpr std::uint64_t kTrackLane = 1;
constexpr std::uint64_t kPairingLane = 2;

std::vector<std::uint32_t> in_degrees(const ExperimentConfig& cfg, Seed seed) {
  if (cfg.construction == Construction::recursive) return recursive_in_degrees(cfg.n, cfg.m, seed);
  return coalescent_in_degrees(cfg.n, cfg.m, seed, cfg.order);
}

LabeledDag build_graph(const ExperimentConfig& cfg, Seed seed) {
  if (cfg.construction == Construction::recursive) return generate_recursive(cfg.n, cfg.m, seed);
  return generate_coalescent(cfg.n, cfg.m, seed, cfg.order);
}

template <class T>
void shuffle_with(std::vector<T>& xs, CounterRng& rng) {
  for (std::size_t j = xs.size(); j > 1; --j) {
    std::swap(xs[j - 1], xs[rng.below(j)]);
  }
}

// k distinct uniform vertices in uniformly random order.
std::vector<Vertex> tracked_vertices(const ExperimentConfig& cfg, Seed seed) {
  CounterRng rng(seed, kTrackLane);
  auto picked = sample_distinct(cfg.k, cfg.n, rng);
  shuffle_with(picked, rng);
  return picked;
}

struct TrialRecord {
  std::vector<std::uint64_t> degree_histogram;
  std::vector<std::uint32_t> tracked_degrees;
  std::vector<std::uint32_t> window_counts;
  std::uint32_t max_degree = 0;
  std::vector<std::uint32_t> depths;
  std::vector<Vertex> labels;
  std::vector<Vertex> label_tuples;
  std::uint32_t tau = 0;
};

std::vector<std::uint64_t> histogram_of(std::span<const std::uint32_t> degrees) {
  std::vector<std::uint64_t> hist;
  for (auto d : degrees) {
    if (d >= hist.size()) hist.resize(d + 1, 0);
    ++hist[d];
  }
  return hist;
}

TrialRecord run_trial(const ExperimentConfig& cfg, const LimitParams& lp, std::uint64_t trial) {
  const Seed seed{cfg.master_seed, trial};
  TrialRecord rec;
  switch (cfg.kind) {
    case ExperimentKind::degree_tail: {
      const auto degrees = in_degrees(cfg, seed);
      rec.degree_histogram = histogram_of(degrees);
      for (Vertex v : tracked_vertices(cfg, seed)) rec.tracked_degrees.push_back(degrees[v - 1]);
      break;
    }
    case ExperimentKind::count_profile: {
      const auto degrees = in_degrees(cfg, seed);
      rec.degree_histogram = histogram_of(degrees);
      const auto& hist = rec.degree_histogram;
      rec.max_degree = static_cast<std::uint32_t>(hist.size() - 1);
      std::vector<std::uint64_t> at_least(hist.size() + 1, 0);
      for (std::size_t j = hist.size(); j-- > 0;) at_least[j] = at_least[j + 1] + hist[j];
      const std::uint32_t w = static_cast<std::uint32_t>(cfg.window_hi - cfg.window_lo + 1);
      rec.window_counts.assign(2 * static_cast<std::size_t>(w), 0);
      for (std::uint32_t j = 0; j < w; ++j) {
        const std::int64_t t = lp.log_floor + cfg.window_lo + static_cast<std::int64_t>(j);
        const auto idx = static_cast<std::size_t>(std::max<std::int64_t>(t, 0));
        if (t >= 0 && idx < hist.size()) rec.window_counts[j] = static_cast<std::uint32_t>(hist[idx]);
        rec.window_counts[w + j] =
            static_cast<std::uint32_t>(idx < at_least.size() ? at_least[idx] : 0);
      }
      break;
    }
    case ExperimentKind::depth_label: {
      const std::uint32_t d = cfg.thresholds.front();
      if (cfg.conditioning == Conditioning::faithful) {
        const Vertex v = tracked_vertices(cfg, seed).front();
        const auto degrees = in_degrees(cfg, seed);
        if (degrees[v - 1] >= d) {
          const LabeledDag g = build_graph(cfg, seed);
          rec.depths.push_back(ungreedy_depth_walk(g, v));
          rec.labels.push_back(v);
        }
      } else {
        const LabeledDag g = build_graph(cfg, seed);
        const auto depth = all_ungreedy_depths(g);
        for (Vertex v = 1; v <= g.size(); ++v) {
          if (g.in_degree(v) >= d) {
            rec.depths.push_back(depth[v - 1]);
            rec.labels.push_back(v);
          }
        }
      }
      break;
    }
    case ExperimentKind::multi_label: {
      const auto degrees = in_degrees(cfg, seed);
      if (cfg.conditioning == Conditioning::faithful) {
        const auto tracked = tracked_vertices(cfg, seed);
        bool ok = true;
        for (std::size_t j = 0; j < tracked.size(); ++j) ok = ok && degrees[tracked[j] - 1] >= cfg.thresholds[j];
        if (ok) rec.label_tuples = tracked;
      } else {
        std::vector<Vertex> qualifying;
        for (Vertex v = 1; v <= cfg.n; ++v) {
          if (degrees[v - 1] >= cfg.thresholds.front()) qualifying.push_back(v);
        }
        CounterRng rng(seed, kPairingLane);
        shuffle_with(qualifying, rng);
        qualifying.resize(qualifying.size() / cfg.k * cfg.k);
        rec.label_tuples = std::move(qualifying);
      }
      break;
    }
    case ExperimentKind::tau_k: {
      const auto tracked = tracked_vertices(cfg, seed);
      rec.tau = tau_k(cfg.n, cfg.m, tracked, seed, cfg.order);
      break;
    }
  }
  return rec;
}

void add_histogram(std::vector<std::uint64_t>& into, std::span<const std::uint64_t> from) {
  if (from.size() > into.size()) into.resize(from.size(), 0);
  for (std::size_t j = 0; j < from.size(); ++j) into[j] += from[j];
}

std::size_t window_index(const Aggregate& agg, std::int32_t offset) {
  if (offset < agg.config.window_lo || offset > agg.config.window_hi) {
    throw std::out_of_range("offset " + std::to_string(offset) + " outside the count window [" +
                            std::to_string(agg.config.window_lo) + ", " +
                            std::to_string(agg.config.window_hi) + "]");
  }
  return static_cast<std::size_t>(offset - agg.config.window_lo);
}

void require_kind(const Aggregate& agg, ExperimentKind kind) {
  if (agg.config.kind != kind) {
    throw std::invalid_argument("aggregate of kind " + std::string(to_string(agg.config.kind)) +
                                ", expected " + std::string(to_string(kind)));
  }
}

}  // namespace

std::string_view to_string(Construction c) {
  return c == Construction::recursive ? "recursive" : "coalescent";
}

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::degree_tail: return "degree_tail";
    case ExperimentKind::count_profile: return "count_profile";
    case ExperimentKind::depth_label: return "depth_label";
    case ExperimentKind::multi_label: return "multi_label";
    case ExperimentKind::tau_k: return "tau_k";
  }
  return "unknown";
}

std::string_view to_string(Conditioning c) {
  return c == Conditioning::faithful ? "faithful" : "harvest";
}

std::optional<Construction> parse_construction(std::string_view text) {
  if (text == "recursive") return Construction::recursive;
  if (text == "coalescent") return Construction::coalescent;
  return std::nullopt;
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view text) {
  for (auto k : {ExperimentKind::degree_tail, ExperimentKind::count_profile,
                 ExperimentKind::depth_label, ExperimentKind::multi_label, ExperimentKind::tau_k}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::optional<Conditioning> parse_conditioning(std::string_view text) {
  if (text == "faithful") return Conditioning::faithful;
  if (text == "harvest") return Conditioning::harvest;
  return std::nullopt;
}

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::invalid_argument(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

void validate(const ExperimentConfig& cfg) {
  if (cfg.m == 0) throw ConfigError("/m", "must be at least 1");
  if (cfg.n == 0) throw ConfigError("/n", "must be at least 1");
  if (cfg.trials == 0) throw ConfigError("/trials", "must be at least 1");
  if (cfg.k == 0) throw ConfigError("/k", "must be at least 1");
  if (cfg.k > cfg.n) throw ConfigError("/k", "cannot exceed n");
  if (cfg.window_lo > cfg.window_hi) throw ConfigError("/window", "lo must not exceed hi");
  if (!(cfg.min_acceptance >= 0 && cfg.min_acceptance <= 1)) {
    throw ConfigError("/min_acceptance", "must lie in [0, 1]");
  }
  switch (cfg.kind) {
    case ExperimentKind::depth_label: {
      if (cfg.thresholds.size() != 1) throw ConfigError("/thresholds", "depth_label takes one threshold");
      const double a = cfg.thresholds[0] / std::log(static_cast<double>(std::max<Vertex>(cfg.n, 2)));
      if (!(a < cfg.m + 1.0)) throw ConfigError("/thresholds/0", "d / ln n must stay below m + 1");
      break;
    }
    case ExperimentKind::multi_label:
      if (cfg.thresholds.size() != cfg.k) throw ConfigError("/thresholds", "need one threshold per tracked vertex");
      if (cfg.conditioning == Conditioning::harvest &&
          std::adjacent_find(cfg.thresholds.begin(), cfg.thresholds.end(), std::not_equal_to<>()) !=
              cfg.thresholds.end()) {
        throw ConfigError("/thresholds", "harvest mode needs equal thresholds");
      }
      break;
    case ExperimentKind::tau_k:
      if (cfg.k < 2) throw ConfigError("/k", "tau_k needs k >= 2");
      if (cfg.construction != Construction::coalescent) {
        throw ConfigError("/construction", "tau_k is defined on the coalescent");
      }
      break;
    default:
      break;
  }
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("RRDAG_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) return static_cast<unsigned>(value);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t)>& body) {
  const auto workers = static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(count, 1)));
  if (workers == 1) {
    for (std::uint64_t t = 0; t < count; ++t) body(t);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t t = next++; t < count; t = next++) {
          try {
            body(t);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

Aggregate run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  validate(cfg);
  const LimitParams lp = limit_params(cfg.n, cfg.m);
  std::vector<TrialRecord> records(cfg.trials);
  parallel_for(cfg.trials, threads,
               [&](std::uint64_t t) { records[t] = run_trial(cfg, lp, t); });

  Aggregate agg;
  agg.config = cfg;
  agg.log_floor = lp.log_floor;
  agg.eps_n = lp.eps_n;
  for (auto& rec : records) {
    add_histogram(agg.degree_histogram, rec.degree_histogram);
    agg.tracked_degrees.insert(agg.tracked_degrees.end(), rec.tracked_degrees.begin(), rec.tracked_degrees.end());
    agg.window_counts.insert(agg.window_counts.end(), rec.window_counts.begin(), rec.window_counts.end());
    if (cfg.kind == ExperimentKind::count_profile) agg.max_degrees.push_back(rec.max_degree);
    agg.depths.insert(agg.depths.end(), rec.depths.begin(), rec.depths.end());
    agg.labels.insert(agg.labels.end(), rec.labels.begin(), rec.labels.end());
    agg.label_tuples.insert(agg.label_tuples.end(), rec.label_tuples.begin(), rec.label_tuples.end());
    if (!rec.labels.empty() || !rec.label_tuples.empty()) ++agg.accepted_trials;
    if (cfg.kind == ExperimentKind::tau_k) agg.taus.push_back(rec.tau);
    rec = TrialRecord{};
  }
  const bool conditional =
      cfg.kind == ExperimentKind::depth_label || cfg.kind == ExperimentKind::multi_label;
  if (conditional && cfg.conditioning == Conditioning::faithful && cfg.min_acceptance > 0) {
    const double rate = static_cast<double>(agg.accepted_trials) / static_cast<double>(cfg.trials);
    if (rate < cfg.min_acceptance) {
      throw AcceptanceTooLow("faithful conditioning accepted " + std::to_string(agg.accepted_trials) +
                             " of " + std::to_string(cfg.trials) +
                             " trials, below the floor; raise trials or use harvest mode");
    }
  }
  return agg;
}

std::vector<TailRow> degree_tail_estimate(const Aggregate& agg, std::uint32_t joint, double z) {
  require_kind(agg, ExperimentKind::degree_tail);
  const std::uint32_t k = agg.config.k;
  if (joint == 0 || joint > k) throw std::invalid_argument("joint must lie in [1, k]");
  const std::uint64_t trials = agg.tracked_degrees.size() / k;
  std::vector<TailRow> rows;
  for (std::uint32_t d = 0; d <= agg.config.max_degree; ++d) {
    std::uint64_t hits = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
      bool all = true;
      for (std::uint32_t j = 0; j < joint; ++j) all = all && agg.tracked_degrees[t * k + j] >= d;
      hits += all ? 1 : 0;
    }
    const std::vector<std::uint32_t> dv(joint, d);
    rows.push_back({d, hits, trials, static_cast<double>(hits) / static_cast<double>(trials),
                    geometric_tail(agg.config.m, dv), wilson_interval(hits, trials, z)});
  }
  return rows;
}

std::vector<double> count_column(const Aggregate& agg, std::int32_t offset, bool at_least) {
  require_kind(agg, ExperimentKind::count_profile);
  const std::size_t w = agg.window_size();
  const std::size_t col = window_index(agg, offset) + (at_least ? w : 0);
  std::vector<double> out;
  out.reserve(agg.max_degrees.size());
  for (std::size_t t = 0; t < agg.max_degrees.size(); ++t) out.push_back(agg.window_counts[t * 2 * w + col]);
  return out;
}

std::vector<double> factorial_moment_samples(const Aggregate& agg,
                                             std::span<const FactorialTerm> terms) {
  std::vector<double> out(agg.max_degrees.size(), 1.0);
  for (const FactorialTerm& term : terms) {
    const auto column = count_column(agg, term.offset, term.at_least);
    for (std::size_t t = 0; t < out.size(); ++t) {
      for (std::uint32_t j = 0; j < term.order; ++j) out[t] *= column[t] - j;
    }
  }
  return out;
}

std::uint64_t max_degree_at_least(const Aggregate& agg, std::int32_t offset) {
  require_kind(agg, ExperimentKind::count_profile);
  const std::int64_t t = agg.log_floor + offset;
  return static_cast<std::uint64_t>(std::count_if(agg.max_degrees.begin(), agg.max_degrees.end(),
                                                  [t](std::uint32_t x) { return x >= t; }));
}

StandardizedPairs standardized_depth_label(const Aggregate& agg) {
  require_kind(agg, ExperimentKind::depth_label);
  const auto& cfg = agg.config;
  const double d = cfg.thresholds.front();
  const NormalParams depth = depth_standardization(cfg.m, cfg.n, d);
  const NormalParams label = log_label_standardization(cfg.m, cfg.n, d);
  StandardizedPairs out;
  for (std::size_t j = 0; j < agg.depths.size(); ++j) {
    out.depth.push_back(depth.standardize(agg.depths[j]));
    out.log_label.push_back(label.standardize(std::log(static_cast<double>(agg.labels[j]))));
  }
  return out;
}

std::vector<std::vector<double>> standardized_labels(const Aggregate& agg) {
  require_kind(agg, ExperimentKind::multi_label);
  const auto& cfg = agg.config;
  std::vector<std::vector<double>> out(cfg.k);
  for (std::size_t s = 0; s + cfg.k <= agg.label_tuples.size(); s += cfg.k) {
    for (std::uint32_t j = 0; j < cfg.k; ++j) {
      const NormalParams p = log_label_standardization(cfg.m, cfg.n, cfg.thresholds[j]);
      out[j].push_back(p.standardize(std::log(static_cast<double>(agg.label_tuples[s + j]))));
    }
  }
  return out;
}

std::uint64_t tau_at_least(const Aggregate& agg, std::uint32_t t) {
  require_kind(agg, ExperimentKind::tau_k);
  return static_cast<std::uint64_t>(
      std::count_if(agg.taus.begin(), agg.taus.end(), [t](std::uint32_t x) { return x >= t; }));
}

}  // namespace rrdag
