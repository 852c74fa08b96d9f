#include "rrdag/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "rrdag/theory.hpp"

namespace rrdag {
namespace {

double two_sided_p(double z) { return std::erfc(std::abs(z) / std::numbers::sqrt2); }

}  // namespace

double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw InsufficientData("Wilson interval needs at least one trial");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

GofReport proportion_test(std::uint64_t successes, std::uint64_t trials, double p0,
                          double z_threshold) {
  if (trials == 0) throw InsufficientData("proportion test needs at least one trial");
  if (!(p0 >= 0 && p0 <= 1)) throw std::invalid_argument("p0 must lie in [0,1]");
  GofReport r;
  r.test = "proportion_z";
  r.reference = "p0=" + std::to_string(p0);
  r.sample_size = trials;
  r.z_threshold = z_threshold;
  r.estimate = static_cast<double>(successes) / static_cast<double>(trials);
  r.interval = wilson_interval(successes, trials, z_threshold);
  if (p0 == 0 || p0 == 1) {
    const bool exact = (p0 == 0 && successes == 0) || (p0 == 1 && successes == trials);
    r.degenerate = true;
    r.statistic = exact ? 0.0 : std::numeric_limits<double>::infinity();
    r.p_value = exact ? 1.0 : 0.0;
    r.passed = exact;
    return r;
  }
  r.statistic = (r.estimate - p0) / std::sqrt(p0 * (1 - p0) / static_cast<double>(trials));
  r.p_value = two_sided_p(r.statistic);
  r.passed = std::abs(r.statistic) <= z_threshold;
  return r;
}

GofReport proportion_upper_bound(std::uint64_t successes, std::uint64_t trials, double bound,
                                 double z_threshold) {
  if (trials == 0) throw InsufficientData("proportion test needs at least one trial");
  GofReport r;
  r.test = "proportion_upper_bound";
  r.reference = "bound=" + std::to_string(bound);
  r.sample_size = trials;
  r.z_threshold = z_threshold;
  r.estimate = static_cast<double>(successes) / static_cast<double>(trials);
  r.interval = wilson_interval(successes, trials, z_threshold);
  const double sigma = std::sqrt(bound * (1 - bound) / static_cast<double>(trials));
  r.statistic = sigma > 0 ? (r.estimate - bound) / sigma : (r.estimate > bound ? INFINITY : 0.0);
  r.degenerate = sigma == 0;
  r.p_value = 0.5 * std::erfc(r.statistic / std::numbers::sqrt2);
  r.passed = r.estimate <= bound + z_threshold * sigma;
  return r;
}

GofReport mean_test(std::span<const double> samples, double mu0, double z_threshold) {
  if (samples.size() < 2) throw InsufficientData("mean test needs at least two samples");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (n - 1) / n);
  GofReport r;
  r.test = "mean_z";
  r.reference = "mu0=" + std::to_string(mu0);
  r.sample_size = samples.size();
  r.z_threshold = z_threshold;
  r.estimate = mean;
  r.interval = Interval{mean - z_threshold * se, mean + z_threshold * se};
  if (se == 0) {
    r.degenerate = true;
    r.statistic = mean == mu0 ? 0.0 : INFINITY;
  } else {
    r.statistic = (mean - mu0) / se;
  }
  r.p_value = two_sided_p(r.statistic);
  r.passed = std::abs(r.statistic) <= z_threshold;
  return r;
}

GofReport chisq_test(std::span<const std::uint64_t> observed, std::span<const double> probabilities,
                     double alpha, double min_expected) {
  if (observed.size() != probabilities.size()) {
    throw std::invalid_argument("chi-square needs one probability per cell");
  }
  const auto total = std::accumulate(observed.begin(), observed.end(), std::uint64_t{0});
  if (total == 0) throw InsufficientData("chi-square needs observations");
  const double n = static_cast<double>(total);

  std::vector<double> obs_bins;
  std::vector<double> exp_bins;
  double o = 0;
  double e = 0;
  for (std::size_t j = 0; j < observed.size(); ++j) {
    o += static_cast<double>(observed[j]);
    e += n * probabilities[j];
    if (e >= min_expected) {
      obs_bins.push_back(o);
      exp_bins.push_back(e);
      o = e = 0;
    }
  }
  // Mass beyond the listed cells belongs to the last bin.
  const double listed = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
  e += n * std::max(0.0, 1.0 - listed);
  if (!exp_bins.empty() && e < min_expected) {
    obs_bins.back() += o;
    exp_bins.back() += e;
  } else {
    obs_bins.push_back(o);
    exp_bins.push_back(e);
  }
  if (exp_bins.size() < 2) {
    throw InsufficientData("chi-square left with " + std::to_string(exp_bins.size()) +
                           " bin after merging to expected >= " + std::to_string(min_expected));
  }
  double stat = 0;
  for (std::size_t b = 0; b < exp_bins.size(); ++b) {
    stat += (obs_bins[b] - exp_bins[b]) * (obs_bins[b] - exp_bins[b]) / exp_bins[b];
  }
  GofReport r;
  r.test = "chi_square";
  r.statistic = stat;
  r.dof = static_cast<int>(exp_bins.size()) - 1;
  r.p_value = boost::math::gamma_q(r.dof / 2.0, stat / 2.0);
  r.sample_size = total;
  r.alpha = alpha;
  r.passed = r.p_value >= alpha;
  return r;
}

GofReport chisq_vs_poisson(std::span<const std::uint64_t> histogram, double mean, double alpha) {
  const auto total = std::accumulate(histogram.begin(), histogram.end(), std::uint64_t{0});
  if (total < 50) {
    throw InsufficientData("chi-square vs Poisson needs at least 50 samples, got " +
                           std::to_string(total));
  }
  if (!(mean > 0)) throw std::invalid_argument("Poisson mean must be positive");
  // Extend the cells until the Poisson tail is negligible for binning.
  std::vector<std::uint64_t> observed(histogram.begin(), histogram.end());
  std::vector<double> probs;
  double p = std::exp(-mean);
  for (std::size_t j = 0; j < observed.size() || p * static_cast<double>(total) >= 1e-9; ++j) {
    if (j >= observed.size()) observed.push_back(0);
    probs.push_back(p);
    p *= mean / static_cast<double>(j + 1);
  }
  GofReport r = chisq_test(observed, probs, alpha);
  r.test = "chi_square_poisson";
  r.reference = "Poisson(" + std::to_string(mean) + ")";
  return r;
}

GofReport chisq_uniform(std::span<const std::uint64_t> counts, double alpha) {
  if (counts.empty()) throw InsufficientData("chi-square uniformity needs cells");
  std::vector<double> probs(counts.size(), 1.0 / static_cast<double>(counts.size()));
  GofReport r = chisq_test(counts, probs, alpha);
  r.test = "chi_square_uniform";
  r.reference = "uniform(" + std::to_string(counts.size()) + ")";
  return r;
}

double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2 * sum, 0.0, 1.0);
}

GofReport ks_normal(std::span<const double> samples, double alpha) {
  if (samples.size() < 100) {
    throw InsufficientData("KS normality needs at least 100 samples, got " +
                           std::to_string(samples.size()));
  }
  std::vector<double> xs(samples.begin(), samples.end());
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double f = std_normal_cdf(xs[j]);
    d = std::max({d, static_cast<double>(j + 1) / n - f, f - static_cast<double>(j) / n});
  }
  const double root = std::sqrt(n);
  GofReport r;
  r.test = "ks_normal";
  r.reference = "N(0,1)";
  r.statistic = d;
  r.p_value = kolmogorov_q((root + 0.12 + 0.11 / root) * d);
  r.sample_size = xs.size();
  r.alpha = alpha;
  r.passed = r.p_value >= alpha;
  return r;
}

CorrelationReport correlation_ci(std::span<const double> x, std::span<const double> y,
                                 double level) {
  if (x.size() != y.size()) throw std::invalid_argument("correlation needs paired samples");
  if (x.size() < 100) {
    throw InsufficientData("correlation needs at least 100 pairs, got " + std::to_string(x.size()));
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0;
  double syy = 0;
  double sxy = 0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    sxx += (x[j] - mx) * (x[j] - mx);
    syy += (y[j] - my) * (y[j] - my);
    sxy += (x[j] - mx) * (y[j] - my);
  }
  if (sxx == 0 || syy == 0) throw std::invalid_argument("correlation with zero variance");
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double half = normal_quantile(0.5 + level / 2) / std::sqrt(n - 3);
  const double z = std::atanh(r);
  return {r, {std::tanh(z - half), std::tanh(z + half)}, x.size()};
}

double sample_normal(CounterRng& rng) {
  const double u1 = 1.0 - rng.uniform01();
  const double u2 = rng.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

std::uint64_t sample_poisson(CounterRng& rng, double mean) {
  const double u = rng.uniform01();
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u >= cdf && p > 0) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace rrdag
