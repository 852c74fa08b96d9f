#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rrdag/enumeration.hpp"

namespace rrdag {

/// Scale quantities at size n: k = ⌊log_{(m+1)/m} n⌋ and ε_n = the fractional
/// part of that logarithm.
struct LimitParams {
  std::uint32_t m = 0;
  std::uint64_t n = 0;
  std::int64_t log_floor = 0;
  double eps_n = 0.0;
};

/// k with ((m+1)/m)^k <= n < ((m+1)/m)^(k+1), decided in integer arithmetic.
std::int64_t log_floor(std::uint64_t n, std::uint32_t m);
/// In [0,1); exactly 0 when n is an integer power of (m+1)/m.
double epsilon_n(std::uint64_t n, std::uint32_t m);
LimitParams limit_params(std::uint64_t n, std::uint32_t m);

double std_normal_cdf(double x);
double std_normal_pdf(double x);

/// (m/(m+1))^(Σ d).
double geometric_tail(std::uint32_t m, std::span<const std::uint32_t> d);

/// λ(x) = (m/(m+1))^x ln((m+1)/m).
double poisson_rate(std::uint32_t m, double x);
/// (1/(m+1)) (m/(m+1))^(i - eps).
double poisson_param(std::uint32_t m, double i, double eps);
/// ∫_a^b λ by adaptive Gauss-Kronrod.
double poisson_rate_integral(std::uint32_t m, double a, double b);

/// 1 - exp(-(m/(m+1))^(i - eps)).
double max_degree_tail_limit(std::uint32_t m, double i_minus_eps);

struct NormalParams {
  double mean = 0.0;
  double sd = 1.0;
  double standardize(double x) const { return (x - mean) / sd; }
};

/// Centering and scale for X_{i_n}: mean poisson_param, sd its square root.
NormalParams xin_normal_params(std::uint32_t m, double i_n, double eps_n);

/// Correlation of the depth/label limit pair: sqrt(m a / ((m+1)^2 - a)).
double depth_label_rho(std::uint32_t m, double a);

/// P(U <= y, M > x) where U = ρM + sqrt(1-ρ²)N for independent standard
/// normals M, N. Requires a in [0, m+1).
double depth_label_limit(std::uint32_t m, double a, double x, double y);

/// Standardization of the ungreedy depth given degree at least d:
/// mean m ln n - m d/(m+1), variance m ln n - m d/(m+1)^2.
NormalParams depth_standardization(std::uint32_t m, double n, double d);
/// Standardization of ln(label) given degree at least d:
/// mean ln n - d/(m+1), variance d/(m+1)^2. Throws for d <= 0.
NormalParams log_label_standardization(std::uint32_t m, double n, double d);

/// ∏ (1 - Φ(x_i)).
double multi_label_limit(std::span<const double> x);

/// Integer polynomial, coefficients from the constant term up.
struct Polynomial {
  std::vector<BigInt> coefficients;

  /// -1 for the zero polynomial.
  int degree() const;
  BigInt leading() const;
  BigInt operator()(const BigInt& x) const;
};

/// ∏_{j=0}^{m}(i-j) - (i + m(k-1)) ∏_{j=0}^{m-1}(i-k-j) as a polynomial in i.
Polynomial fm_polynomial(std::uint32_t m, std::uint32_t k);
/// The defining products evaluated directly at i.
BigInt fm_direct(std::uint32_t m, std::uint32_t k, std::int64_t i);

/// min(1, (m+1) m k (k-1) / (t - m - 1)). Throws for t <= m + 1.
double tau_tail_bound(std::uint32_t m, std::uint32_t k, double t);

enum class ConnectionPhase { pre_loss, post_loss };

/// Exact chance at step i that the selection hits the connection set in one
/// element: C(i-1,m)/C(i,m+1) while it is {v}, m C(i-m,m)/C(i,m+1) once it
/// holds m winners. Throws for i < 2m.
Rational connection_selection_prob(std::uint32_t m, std::uint32_t i, ConnectionPhase phase);

/// Exact finite-n law of a uniform vertex's degree, by dynamic programming
/// over the steps: returns P(d >= j) for j = 0..max_d.
std::vector<double> finite_degree_tail(std::uint64_t n, std::uint32_t m, std::uint32_t max_d);

}  // namespace rrdag
