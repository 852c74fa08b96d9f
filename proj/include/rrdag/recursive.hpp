#pragma once

#include <cstdint>
#include <vector>

#include "rrdag/graph.hpp"
#include "rrdag/random.hpp"

namespace rrdag {

/// Bottom-up random recursive DAG: vertex i+1 attaches to m∧i distinct
/// vertices of {1..i} chosen uniformly. Throws std::invalid_argument for
/// n == 0 or m == 0.
LabeledDag generate_recursive(Vertex n, std::uint32_t m, Seed seed);

/// In-degrees (index v - 1) of generate_recursive(n, m, seed) without
/// storing the adjacency. Consumes the random stream identically.
std::vector<std::uint32_t> recursive_in_degrees(Vertex n, std::uint32_t m, Seed seed);

}  // namespace rrdag
