#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rrdag {

/// Vertex labels are 1-based: a graph on n vertices uses {1, ..., n}.
using Vertex = std::uint32_t;

struct Edge {
  Vertex from = 0;
  Vertex to = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Out-degree required of vertex v in an increasing DAG with parameter m.
constexpr std::uint32_t required_out_degree(Vertex v, std::uint32_t m) {
  return v - 1 < m ? v - 1 : m;
}

/// Total edge count of any increasing DAG on n vertices with parameter m.
std::uint64_t required_edge_count(Vertex n, std::uint32_t m);

/// Thrown by graph algorithms that need a well-formed graph and find otherwise.
class MalformedGraph : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Labeled directed graph on {1..n} with an out-degree parameter m.
///
/// Out-neighbor lists are kept sorted descending (so the highest-labeled
/// out-neighbor is the first entry) in compressed-row form; in-degrees are
/// counted once at construction. The object is immutable. It may hold graphs
/// that violate the increasing-DAG invariants so that validate() can report
/// them; only n, m and vertex ranges are enforced here.
class LabeledDag {
 public:
  /// out_neighbors[v - 1] lists the targets of vertex v, in any order.
  LabeledDag(Vertex n, std::uint32_t m, const std::vector<std::vector<Vertex>>& out_neighbors);

  /// Compressed rows: targets of v are targets[offsets[v-1] .. offsets[v]).
  static LabeledDag from_rows(Vertex n, std::uint32_t m, std::vector<std::size_t> offsets,
                              std::vector<Vertex> targets);

  static LabeledDag from_edges(Vertex n, std::uint32_t m, std::span<const Edge> edges);

  Vertex size() const { return n_; }
  std::uint32_t m() const { return m_; }
  std::size_t edge_count() const { return targets_.size(); }

  /// Targets of v, highest label first. Unchecked: v must be in [1, n].
  std::span<const Vertex> out_neighbors(Vertex v) const {
    return {targets_.data() + offsets_[v - 1], targets_.data() + offsets_[v]};
  }

  /// In-degree of v. Unchecked: v must be in [1, n].
  std::uint32_t in_degree(Vertex v) const { return in_degree_[v - 1]; }
  std::span<const std::uint32_t> in_degrees() const { return in_degree_; }

  /// All edges ordered by increasing source, then decreasing target.
  std::vector<Edge> edges() const;

  friend bool operator==(const LabeledDag& a, const LabeledDag& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.offsets_ == b.offsets_ && a.targets_ == b.targets_;
  }

 private:
  LabeledDag(Vertex n, std::uint32_t m, std::vector<std::size_t> offsets,
             std::vector<Vertex> targets);

  Vertex n_;
  std::uint32_t m_;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> targets_;
  std::vector<std::uint32_t> in_degree_;
};

struct ValidationReport {
  std::vector<std::string> violations;
  /// Violations beyond the stored ones are only counted.
  std::size_t omitted = 0;

  bool ok() const { return violations.empty(); }
};

/// Checks membership in the class of increasing DAGs: out-degree m∧(v-1) for
/// every v, every edge goes to a smaller label, no repeated out-neighbors.
ValidationReport validate(const LabeledDag& g);

/// Number of in-neighbors of v. Throws std::out_of_range for v outside [1, n].
std::uint32_t degree_of(const LabeledDag& g, Vertex v);

/// Length of the path from v that always steps to the highest-labeled
/// out-neighbor, ending at vertex 1. Throws std::out_of_range for a bad v and
/// MalformedGraph if the path meets a non-decreasing edge or a dead end other
/// than vertex 1.
std::uint32_t ungreedy_depth_walk(const LabeledDag& g, Vertex v);

struct VertexStats {
  Vertex vertex = 0;
  std::uint32_t degree = 0;
  std::uint32_t ungreedy_depth = 0;

  friend bool operator==(const VertexStats&, const VertexStats&) = default;
};

VertexStats vertex_stats(const LabeledDag& g, Vertex v);

/// Ungreedy depth of every vertex in one pass (index v - 1). Requires a
/// valid graph: each vertex's depth is one more than its first out-neighbor's.
std::vector<std::uint32_t> all_ungreedy_depths(const LabeledDag& g);

/// Byte encoding of the sorted edge list; equal graphs give equal keys.
std::string canonical_key(const LabeledDag& g);

}  // namespace rrdag
