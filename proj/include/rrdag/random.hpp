#pragma once

#include <cstdint>
#include <vector>

namespace rrdag {

/// Identifies one reproducible random stream: an experiment-wide seed plus
/// the index of the trial that owns the stream.
struct Seed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  friend bool operator==(const Seed&, const Seed&) = default;
};

/// Counter-based generator in the SplitMix64 family.
///
/// Output number `c` of a stream is `mix(key + c * gamma)`, where the key is
/// derived from (master_seed, stream_index, lane). Any output can therefore be
/// recomputed from its coordinates alone, independent of thread count or the
/// order in which trials are scheduled. Satisfies
/// std::uniform_random_bit_generator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(Seed seed, std::uint64_t lane = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return mix(key_ + (++counter_) * kGamma); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t counter() const { return counter_; }
  void seek(std::uint64_t counter) { counter_ = counter; }

  /// Independent stream for a sub-task (e.g. vertex selection vs. graph
  /// generation inside one trial).
  CounterRng split(std::uint64_t lane) const;

  static std::uint64_t mix(std::uint64_t z);

 private:
  CounterRng(std::uint64_t key, int) : key_(key) {}

  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Draws k distinct values from {1, ..., population}, uniformly over all
/// k-subsets, and returns them ascending.
///
/// Rejection sampling is used when k <= population / 8 and a partial
/// Fisher-Yates shuffle over a reusable index window otherwise, so the
/// expected cost is O(k) in both regimes (plus a sort of k values). k ==
/// population consumes no randomness.
class DistinctSampler {
 public:
  void sample(std::uint32_t k, std::uint32_t population, CounterRng& rng,
              std::vector<std::uint32_t>& out);

 private:
  std::vector<std::uint32_t> window_;
};

std::vector<std::uint32_t> sample_distinct(std::uint32_t k, std::uint32_t population,
                                           CounterRng& rng);

}  // namespace rrdag
