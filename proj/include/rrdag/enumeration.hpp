#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rrdag/graph.hpp"
#include "rrdag/tree_order.hpp"

namespace rrdag {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// A brute-force request that would exceed its configured size cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;
inline constexpr std::uint64_t kDefaultExhaustCap = 100'000'000;

BigInt binomial(std::uint64_t n, std::uint64_t k);

/// Number of increasing DAGs on [n] with out-degree m ∧ (v-1) at every v.
BigInt count_increasing_dags(Vertex n, std::uint32_t m);

/// Calls `visit` once per increasing DAG. Throws CapExceeded first if the
/// count is above `cap`.
void for_each_increasing_dag(Vertex n, std::uint32_t m,
                             const std::function<void(const LabeledDag&)>& visit,
                             std::uint64_t cap = kDefaultEnumerationCap);
std::vector<LabeledDag> enumerate_increasing_dags(Vertex n, std::uint32_t m,
                                                  std::uint64_t cap = kDefaultEnumerationCap);

/// Number of distinct coalescent traces: ∏_{i=2}^{n} C(i,k_i)·k_i with k_i = (m+1) ∧ i.
BigInt count_coalescent_traces(Vertex n, std::uint32_t m);

struct GraphCount {
  LabeledDag graph;
  std::uint64_t count = 0;
};

/// Pushforward of the uniform law on traces, as exact multiplicities keyed by
/// canonical_key().
struct ExactDistribution {
  Vertex n = 0;
  std::uint32_t m = 0;
  std::uint64_t total = 0;
  std::map<std::string, GraphCount> graphs;

  /// True when every graph has the same multiplicity, equal to `expected`.
  bool uniform_with(std::uint64_t expected) const;
};

struct ExhaustOptions {
  std::uint64_t cap = kDefaultExhaustCap;
  TreeOrder order = TreeOrder::lexicographic;
  unsigned threads = 1;
};

/// Replays every trace. Workers split the choices of the first event; maps
/// are merged by exact addition.
ExactDistribution exhaust_coalescent(Vertex n, std::uint32_t m, const ExhaustOptions& options = {});

/// Uniform distribution over enumerate_increasing_dags with multiplicity 1.
ExactDistribution uniform_dag_distribution(Vertex n, std::uint32_t m,
                                           std::uint64_t cap = kDefaultEnumerationCap);

/// P(d(V_j) >= d_j for all j) for a uniformly random ordered tuple of
/// distinct vertices V_1..V_k, k = d.size() <= n.
Rational joint_degree_tail(const ExactDistribution& dist, std::span<const std::uint32_t> d);
/// Same with equalities d(V_j) = d_j.
Rational joint_degree_point(const ExactDistribution& dist, std::span<const std::uint32_t> d);

/// Every tail probability over d-vectors in {0..max_d}^k.
std::map<std::vector<std::uint32_t>, Rational> exact_degree_law(const ExactDistribution& dist,
                                                                std::uint32_t k,
                                                                std::uint32_t max_d);

/// P(d = d_vec) minus Σ_{S ⊆ [k]} (-1)^{|S|} P(d >= d_vec + 1_S). Zero when
/// the identity holds.
Rational verify_inclusion_exclusion(const ExactDistribution& dist,
                                    std::span<const std::uint32_t> d);

/// {"m":..,"n":..,"total":..,"graphs":[{"edges":[[v,w],...],"count":..},...]}
void write_oracle_fixture(std::ostream& out, const ExactDistribution& dist);

}  // namespace rrdag
