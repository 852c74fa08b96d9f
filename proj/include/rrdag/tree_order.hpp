#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>

#include "rrdag/graph.hpp"

namespace rrdag {

/// How the live trees of a coalescent forest are enumerated when a merge
/// tuple (a_1 < ... < a_k) is turned into concrete roots.
///
/// `lexicographic` is the ordering of trees by their increasingly sorted
/// vertex lists. Trees overlap once m >= 2 (a vertex that lost reaches every
/// root it attached to), so this order is kept with explicit vertex sets and
/// costs O(n) per merge. `root_label` orders trees by the label of their root
/// and costs O(log n) per lookup. Both are functions of the current forest,
/// so the tuple picks a uniformly random set of roots under either one and
/// the law of the chain is the same; individual traces can map to different
/// graphs.
enum class TreeOrder { lexicographic, root_label };

std::string_view to_string(TreeOrder order);
std::optional<TreeOrder> parse_tree_order(std::string_view text);

/// The live roots of a coalescent forest in a fixed tree order.
class RootIndex {
 public:
  virtual ~RootIndex() = default;

  virtual std::uint32_t root_count() const = 0;

  /// Root of the tree at 1-based position `position` in the current order.
  virtual Vertex root_at(std::uint32_t position) const = 0;

  /// Among the given live roots, the one whose tree comes first.
  virtual Vertex first_in_order(std::span<const Vertex> roots) const = 0;

  /// `loser` stops being a root and attaches to `winners`, whose trees
  /// absorb the loser's tree.
  virtual void merge(Vertex loser, std::span<const Vertex> winners) = 0;
};

/// Index over n singleton trees {1}, ..., {n}.
std::unique_ptr<RootIndex> make_root_index(TreeOrder order, Vertex n);

}  // namespace rrdag
