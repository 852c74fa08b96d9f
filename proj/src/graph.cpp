#include "rrdag/graph.hpp"

#include <algorithm>
#include <functional>

namespace rrdag {
namespace {

constexpr std::size_t kMaxReportedViolations = 64;

void check_vertex(const LabeledDag& g, Vertex v) {
  if (v < 1 || v > g.size()) {
    throw std::out_of_range("vertex " + std::to_string(v) + " outside [1, " +
                            std::to_string(g.size()) + "]");
  }
}

}  // namespace

std::uint64_t required_edge_count(Vertex n, std::uint32_t m) {
  std::uint64_t total = 0;
  for (Vertex v = 1; v <= n; ++v) total += required_out_degree(v, m);
  return total;
}

LabeledDag::LabeledDag(Vertex n, std::uint32_t m, std::vector<std::size_t> offsets,
                       std::vector<Vertex> targets)
    : n_(n), m_(m), offsets_(std::move(offsets)), targets_(std::move(targets)) {
  if (n_ == 0) throw std::invalid_argument("graph needs n >= 1");
  if (m_ == 0) throw std::invalid_argument("graph needs m >= 1");
  if (offsets_.size() != static_cast<std::size_t>(n_) + 1 || offsets_.front() != 0 ||
      offsets_.back() != targets_.size() || !std::is_sorted(offsets_.begin(), offsets_.end())) {
    throw std::invalid_argument("inconsistent adjacency row offsets");
  }
  in_degree_.assign(n_, 0);
  for (Vertex v = 1; v <= n_; ++v) {
    auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v - 1]);
    auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
    std::sort(first, last, std::greater<>());
    for (auto it = first; it != last; ++it) {
      if (*it < 1 || *it > n_) {
        throw std::invalid_argument("edge (" + std::to_string(v) + "," + std::to_string(*it) +
                                    ") leaves the vertex range");
      }
      ++in_degree_[*it - 1];
    }
  }
}

LabeledDag::LabeledDag(Vertex n, std::uint32_t m,
                       const std::vector<std::vector<Vertex>>& out_neighbors)
    : LabeledDag([&] {
        if (out_neighbors.size() != n) {
          throw std::invalid_argument("expected one out-neighbor list per vertex");
        }
        std::vector<std::size_t> offsets{0};
        std::vector<Vertex> targets;
        for (const auto& row : out_neighbors) {
          targets.insert(targets.end(), row.begin(), row.end());
          offsets.push_back(targets.size());
        }
        return LabeledDag(n, m, std::move(offsets), std::move(targets));
      }()) {}

LabeledDag LabeledDag::from_rows(Vertex n, std::uint32_t m, std::vector<std::size_t> offsets,
                                 std::vector<Vertex> targets) {
  return LabeledDag(n, m, std::move(offsets), std::move(targets));
}

LabeledDag LabeledDag::from_edges(Vertex n, std::uint32_t m, std::span<const Edge> edges) {
  std::vector<std::vector<Vertex>> rows(n);
  for (const Edge& e : edges) {
    if (e.from < 1 || e.from > n) {
      throw std::invalid_argument("edge (" + std::to_string(e.from) + "," +
                                  std::to_string(e.to) + ") leaves the vertex range");
    }
    rows[e.from - 1].push_back(e.to);
  }
  return LabeledDag(n, m, rows);
}

std::vector<Edge> LabeledDag::edges() const {
  std::vector<Edge> out;
  out.reserve(targets_.size());
  for (Vertex v = 1; v <= n_; ++v) {
    for (Vertex w : out_neighbors(v)) out.push_back({v, w});
  }
  return out;
}

ValidationReport validate(const LabeledDag& g) {
  ValidationReport report;
  auto add = [&](std::string message) {
    if (report.violations.size() < kMaxReportedViolations) {
      report.violations.push_back(std::move(message));
    } else {
      ++report.omitted;
    }
  };
  for (Vertex v = 1; v <= g.size(); ++v) {
    const auto row = g.out_neighbors(v);
    const auto expected = required_out_degree(v, g.m());
    if (row.size() != expected) {
      add("vertex " + std::to_string(v) + " has out-degree " + std::to_string(row.size()) +
          ", expected " + std::to_string(expected));
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] >= v) {
        add("edge (" + std::to_string(v) + "," + std::to_string(row[j]) + ") increases");
      }
      if (j > 0 && row[j] == row[j - 1]) {
        add("vertex " + std::to_string(v) + " repeats out-neighbor " + std::to_string(row[j]));
      }
    }
  }
  return report;
}

std::uint32_t degree_of(const LabeledDag& g, Vertex v) {
  check_vertex(g, v);
  return g.in_degree(v);
}

std::uint32_t ungreedy_depth_walk(const LabeledDag& g, Vertex v) {
  check_vertex(g, v);
  std::uint32_t depth = 0;
  while (v != 1) {
    const auto row = g.out_neighbors(v);
    if (row.empty()) {
      throw MalformedGraph("ungreedy walk stuck at vertex " + std::to_string(v));
    }
    if (row.front() >= v) {
      throw MalformedGraph("ungreedy walk met increasing edge (" + std::to_string(v) + "," +
                           std::to_string(row.front()) + ")");
    }
    v = row.front();
    ++depth;
  }
  return depth;
}

VertexStats vertex_stats(const LabeledDag& g, Vertex v) {
  return {v, degree_of(g, v), ungreedy_depth_walk(g, v)};
}

std::vector<std::uint32_t> all_ungreedy_depths(const LabeledDag& g) {
  std::vector<std::uint32_t> depth(g.size(), 0);
  for (Vertex v = 2; v <= g.size(); ++v) {
    const auto row = g.out_neighbors(v);
    if (row.empty() || row.front() >= v) {
      throw MalformedGraph("vertex " + std::to_string(v) + " has no smaller out-neighbor");
    }
    depth[v - 1] = depth[row.front() - 1] + 1;
  }
  return depth;
}

std::string canonical_key(const LabeledDag& g) {
  std::string key;
  key.reserve(8 + g.edge_count() * 8);
  auto put = [&key](std::uint32_t x) {
    for (int b = 0; b < 4; ++b) key.push_back(static_cast<char>((x >> (8 * b)) & 0xff));
  };
  put(g.size());
  put(g.m());
  for (const Edge& e : g.edges()) {
    put(e.from);
    put(e.to);
  }
  return key;
}

}  // namespace rrdag
