#include "rrdag/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace rrdag {
namespace {

void check_m(std::uint32_t m) {
  if (m == 0) throw std::invalid_argument("m must be at least 1");
}

// (m+1)^k <= n m^k, i.e. ((m+1)/m)^k <= n, for k >= 0.
bool power_at_most(std::uint32_t m, std::int64_t k, std::uint64_t n) {
  using boost::multiprecision::pow;
  const auto e = static_cast<unsigned>(k);
  return pow(BigInt(m + 1), e) <= BigInt(n) * pow(BigInt(m), e);
}

bool power_equals(std::uint32_t m, std::int64_t k, std::uint64_t n) {
  using boost::multiprecision::pow;
  const auto e = static_cast<unsigned>(k);
  return pow(BigInt(m + 1), e) == BigInt(n) * pow(BigInt(m), e);
}

}  // namespace

std::int64_t log_floor(std::uint64_t n, std::uint32_t m) {
  check_m(m);
  if (n == 0) throw std::invalid_argument("log_floor needs n >= 1");
  const double base = std::log1p(1.0 / m);
  auto k = static_cast<std::int64_t>(std::floor(std::log(static_cast<double>(n)) / base));
  k = std::max<std::int64_t>(k, 0);
  while (k > 0 && !power_at_most(m, k, n)) --k;
  while (power_at_most(m, k + 1, n)) ++k;
  return k;
}

double epsilon_n(std::uint64_t n, std::uint32_t m) {
  const std::int64_t k = log_floor(n, m);
  if (power_equals(m, k, n)) return 0.0;
  const double frac = std::log(static_cast<double>(n)) / std::log1p(1.0 / m) - static_cast<double>(k);
  return std::clamp(frac, 0.0, std::nextafter(1.0, 0.0));
}

LimitParams limit_params(std::uint64_t n, std::uint32_t m) {
  return {m, n, log_floor(n, m), epsilon_n(n, m)};
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double geometric_tail(std::uint32_t m, std::span<const std::uint32_t> d) {
  check_m(m);
  double total = 0;
  for (auto x : d) total += x;
  return std::pow(static_cast<double>(m) / (m + 1), total);
}

double poisson_rate(std::uint32_t m, double x) {
  check_m(m);
  return std::pow(static_cast<double>(m) / (m + 1), x) * std::log1p(1.0 / m);
}

double poisson_param(std::uint32_t m, double i, double eps) {
  check_m(m);
  return std::pow(static_cast<double>(m) / (m + 1), i - eps) / (m + 1);
}

double poisson_rate_integral(std::uint32_t m, double a, double b) {
  check_m(m);
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
      [m](double x) { return poisson_rate(m, x); }, a, b, 15, 1e-14);
}

double max_degree_tail_limit(std::uint32_t m, double i_minus_eps) {
  check_m(m);
  return -std::expm1(-std::pow(static_cast<double>(m) / (m + 1), i_minus_eps));
}

NormalParams xin_normal_params(std::uint32_t m, double i_n, double eps_n) {
  const double mean = poisson_param(m, i_n, eps_n);
  return {mean, std::sqrt(mean)};
}

double depth_label_rho(std::uint32_t m, double a) {
  check_m(m);
  const double top = m + 1.0;
  if (!(a >= 0 && a < top)) {
    throw std::invalid_argument("degree ratio a must lie in [0, m+1), got " + std::to_string(a));
  }
  return std::sqrt(m * a / (top * top - a));
}

double depth_label_limit(std::uint32_t m, double a, double x, double y) {
  const double rho = depth_label_rho(m, a);
  const double s = std::sqrt(1 - rho * rho);
  // φ is below 1e-31 outside [-12, 12].
  constexpr double kReach = 12.0;
  const double lo = std::max(x, -kReach);
  if (lo >= kReach) return 0.0;
  if (std::isinf(y)) return y > 0 ? 1 - std_normal_cdf(x) : 0.0;
  auto integrand = [&](double t) { return std_normal_pdf(t) * std_normal_cdf((y - rho * t) / s); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, kReach, 20,
                                                                      1e-13);
}

NormalParams depth_standardization(std::uint32_t m, double n, double d) {
  check_m(m);
  const double ln_n = std::log(n);
  const double var = m * ln_n - m * d / ((m + 1.0) * (m + 1.0));
  if (!(var > 0)) throw std::invalid_argument("depth standardization has non-positive variance");
  return {m * ln_n - m * d / (m + 1.0), std::sqrt(var)};
}

NormalParams log_label_standardization(std::uint32_t m, double n, double d) {
  check_m(m);
  if (!(d > 0)) throw std::invalid_argument("label standardization needs d > 0 (zero variance)");
  return {std::log(n) - d / (m + 1.0), std::sqrt(d) / (m + 1.0)};
}

double multi_label_limit(std::span<const double> x) {
  double p = 1;
  for (double xi : x) p *= 1 - std_normal_cdf(xi);
  return p;
}

int Polynomial::degree() const {
  for (std::size_t j = coefficients.size(); j-- > 0;) {
    if (coefficients[j] != 0) return static_cast<int>(j);
  }
  return -1;
}

BigInt Polynomial::leading() const {
  const int d = degree();
  return d < 0 ? BigInt(0) : coefficients[static_cast<std::size_t>(d)];
}

BigInt Polynomial::operator()(const BigInt& x) const {
  BigInt acc = 0;
  for (std::size_t j = coefficients.size(); j-- > 0;) acc = acc * x + coefficients[j];
  return acc;
}

namespace {

// p(i) * (i + c).
std::vector<BigInt> times_linear(const std::vector<BigInt>& p, const BigInt& c) {
  std::vector<BigInt> out(p.size() + 1, 0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    out[j] += p[j] * c;
    out[j + 1] += p[j];
  }
  return out;
}

}  // namespace

Polynomial fm_polynomial(std::uint32_t m, std::uint32_t k) {
  check_m(m);
  if (k < 2) throw std::invalid_argument("fm_polynomial needs k >= 2");
  std::vector<BigInt> left{1};
  for (std::uint32_t j = 0; j <= m; ++j) left = times_linear(left, -BigInt(j));
  std::vector<BigInt> right{1};
  for (std::uint32_t j = 0; j < m; ++j) right = times_linear(right, -BigInt(k) - j);
  right = times_linear(right, BigInt(m) * (k - 1));
  Polynomial f{std::vector<BigInt>(std::max(left.size(), right.size()), 0)};
  for (std::size_t j = 0; j < left.size(); ++j) f.coefficients[j] += left[j];
  for (std::size_t j = 0; j < right.size(); ++j) f.coefficients[j] -= right[j];
  return f;
}

BigInt fm_direct(std::uint32_t m, std::uint32_t k, std::int64_t i) {
  BigInt left = 1;
  for (std::int64_t j = 0; j <= m; ++j) left *= BigInt(i - j);
  BigInt right = BigInt(i) + BigInt(m) * (k - 1);
  for (std::int64_t j = 0; j < m; ++j) right *= BigInt(i - static_cast<std::int64_t>(k) - j);
  return left - right;
}

double tau_tail_bound(std::uint32_t m, std::uint32_t k, double t) {
  check_m(m);
  if (!(t > m + 1.0)) {
    throw std::invalid_argument("tau_tail_bound needs t > m + 1, got t = " + std::to_string(t));
  }
  const double bound = (m + 1.0) * m * k * (k - 1.0) / (t - m - 1.0);
  return std::clamp(bound, 0.0, 1.0);
}

Rational connection_selection_prob(std::uint32_t m, std::uint32_t i, ConnectionPhase phase) {
  check_m(m);
  if (i < 2 * m) {
    throw std::invalid_argument("connection_selection_prob needs i >= 2m, got i = " +
                                std::to_string(i));
  }
  const BigInt all = binomial(i, m + 1);
  if (phase == ConnectionPhase::pre_loss) return Rational(binomial(i - 1, m), all);
  return Rational(BigInt(m) * binomial(i - m, m), all);
}

std::vector<double> finite_degree_tail(std::uint64_t n, std::uint32_t m, std::uint32_t max_d) {
  check_m(m);
  if (n == 0) throw std::invalid_argument("finite_degree_tail needs n >= 1");
  // alive[j]: still a root with a streak of j wins so far.
  std::vector<double> alive(static_cast<std::size_t>(max_d) + 2, 0.0);
  std::vector<double> ended(alive.size(), 0.0);
  alive[0] = 1.0;
  for (std::uint64_t i = n; i >= 2; --i) {
    const double k = static_cast<double>(std::min<std::uint64_t>(m + 1, i));
    const double pick = k / static_cast<double>(i);
    const double lose = pick / k;
    const double win = pick - lose;
    for (std::size_t j = alive.size(); j-- > 0;) {
      const double here = alive[j];
      ended[j] += here * lose;
      alive[j] = here * (1 - pick);
      if (j + 1 < alive.size()) {
        alive[j + 1] += here * win;
      } else {
        alive[j] += here * win;  // streaks beyond max_d pooled in the last cell
      }
    }
  }
  std::vector<double> tail(static_cast<std::size_t>(max_d) + 1, 0.0);
  double acc = 0;
  for (std::size_t j = alive.size(); j-- > 0;) {
    acc += alive[j] + ended[j];
    if (j < tail.size()) tail[j] = acc;
  }
  return tail;
}

}  // namespace rrdag
