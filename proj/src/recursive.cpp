#include "rrdag/recursive.hpp"

#include <stdexcept>

namespace rrdag {
namespace {

void check_parameters(Vertex n, std::uint32_t m) {
  if (n == 0) throw std::invalid_argument("n must be at least 1");
  if (m == 0) throw std::invalid_argument("m must be at least 1");
}

// Calls visit(v, targets) for v = 2..n with the ascending target set of v.
template <class Visit>
void attach_all(Vertex n, std::uint32_t m, Seed seed, Visit&& visit) {
  CounterRng rng(seed);
  DistinctSampler sampler;
  std::vector<Vertex> targets;
  for (Vertex i = 1; i < n; ++i) {
    sampler.sample(required_out_degree(i + 1, m), i, rng, targets);
    visit(i + 1, targets);
  }
}

}  // namespace

LabeledDag generate_recursive(Vertex n, std::uint32_t m, Seed seed) {
  check_parameters(n, m);
  std::vector<std::size_t> offsets{0, 0};
  offsets.reserve(static_cast<std::size_t>(n) + 1);
  std::vector<Vertex> all_targets;
  all_targets.reserve(required_edge_count(n, m));
  attach_all(n, m, seed, [&](Vertex, const std::vector<Vertex>& targets) {
    all_targets.insert(all_targets.end(), targets.begin(), targets.end());
    offsets.push_back(all_targets.size());
  });
  return LabeledDag::from_rows(n, m, std::move(offsets), std::move(all_targets));
}

std::vector<std::uint32_t> recursive_in_degrees(Vertex n, std::uint32_t m, Seed seed) {
  check_parameters(n, m);
  std::vector<std::uint32_t> degree(n, 0);
  attach_all(n, m, seed, [&](Vertex, const std::vector<Vertex>& targets) {
    for (Vertex w : targets) ++degree[w - 1];
  });
  return degree;
}

}  // namespace rrdag
