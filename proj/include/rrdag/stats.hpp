#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrdag/random.hpp"

namespace rrdag {

/// Too few observations for a test's asymptotic approximation.
class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Outcome of one check. z-type tests pass on |z| <= z_threshold (or a
/// one-sided version); distributional tests pass on p >= alpha.
struct GofReport {
  std::string test;
  std::string reference;
  double statistic = 0.0;
  double p_value = 1.0;
  std::uint64_t sample_size = 0;
  double alpha = 0.0;
  double z_threshold = 0.0;
  int dof = 0;
  bool degenerate = false;
  bool passed = false;
  double estimate = 0.0;
  std::optional<Interval> interval;
};

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z);

/// Two-sided z-test of a proportion against p0, with a Wilson interval at the
/// same z. p0 in {0,1} is a degenerate case that passes only on exact
/// agreement.
GofReport proportion_test(std::uint64_t successes, std::uint64_t trials, double p0,
                          double z_threshold = 4.0);

/// One-sided: passes when the proportion is at most bound + z σ, with σ the
/// binomial spread at the bound.
GofReport proportion_upper_bound(std::uint64_t successes, std::uint64_t trials, double bound,
                                 double z_threshold = 3.0);

/// Two-sided z-test of a sample mean against mu0 using the sample variance.
GofReport mean_test(std::span<const double> samples, double mu0, double z_threshold = 4.0);

/// Pearson chi-square of counts against cell probabilities. Cells are merged
/// left to right until each expected count reaches `min_expected`; the
/// remainder, including any probability mass past the last cell, joins the
/// final bin. dof = bins - 1.
GofReport chisq_test(std::span<const std::uint64_t> observed, std::span<const double> probabilities,
                     double alpha = 0.01, double min_expected = 5.0);

/// observed[j] = number of samples equal to j. Needs at least 50 samples.
GofReport chisq_vs_poisson(std::span<const std::uint64_t> histogram, double mean,
                           double alpha = 0.01);

GofReport chisq_uniform(std::span<const std::uint64_t> counts, double alpha = 0.01);

/// Kolmogorov limiting survival function Q(λ) = 2 Σ_{j>=1} (-1)^{j-1} exp(-2 j² λ²).
double kolmogorov_q(double lambda);

/// One-sample KS against N(0,1), p-value Q((√n + 0.12 + 0.11/√n) D).
/// Needs at least 100 samples.
GofReport ks_normal(std::span<const double> samples, double alpha = 0.01);

struct CorrelationReport {
  double r = 0.0;
  Interval ci;
  std::uint64_t sample_size = 0;
};

/// Pearson r with a Fisher-z interval. Needs at least 100 pairs and positive
/// variance in both coordinates.
CorrelationReport correlation_ci(std::span<const double> x, std::span<const double> y,
                                 double level = 0.95);

/// Standard normal quantile, for interval widths.
double normal_quantile(double p);

/// Box-Muller draw from N(0,1).
double sample_normal(CounterRng& rng);
/// Poisson draw by sequential inversion; intended for small means.
std::uint64_t sample_poisson(CounterRng& rng, double mean);

}  // namespace rrdag
