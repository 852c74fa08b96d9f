#include "rrdag/tree_order.hpp"

#include <algorithm>
#include <bit>
#include <iterator>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rrdag {
namespace {

// Live roots ordered by label: a Fenwick tree over alive flags answers
// "k-th live root" by binary lifting.
class RootLabelIndex final : public RootIndex {
 public:
  explicit RootLabelIndex(Vertex n) : n_(n), count_(n), tree_(static_cast<std::size_t>(n) + 1) {
    for (Vertex v = 1; v <= n; ++v) {
      tree_[v] += 1;
      const Vertex parent = v + (v & (0u - v));
      if (parent <= n) tree_[parent] += tree_[v];
    }
    top_bit_ = n == 0 ? 0 : std::bit_floor(n);
  }

  std::uint32_t root_count() const override { return count_; }

  Vertex root_at(std::uint32_t position) const override {
    Vertex pos = 0;
    std::uint32_t remaining = position;
    for (Vertex step = top_bit_; step != 0; step >>= 1) {
      const Vertex next = pos + step;
      if (next <= n_ && tree_[next] < remaining) {
        pos = next;
        remaining -= tree_[next];
      }
    }
    return pos + 1;
  }

  Vertex first_in_order(std::span<const Vertex> roots) const override {
    return *std::min_element(roots.begin(), roots.end());
  }

  void merge(Vertex loser, std::span<const Vertex>) override {
    for (Vertex v = loser; v <= n_; v += v & (0u - v)) tree_[v] -= 1;
    --count_;
  }

 private:
  Vertex n_;
  std::uint32_t count_;
  Vertex top_bit_ = 0;
  std::vector<std::uint32_t> tree_;
};

// Trees ordered lexicographically by their sorted vertex lists. Live trees
// always have distinct vertex sets (a root belongs to no other tree), so the
// order is strict.
class LexicographicIndex final : public RootIndex {
  auto tree_less() const {
    return [this](Vertex a, Vertex b) {
      return std::lexicographical_compare(members_[a].begin(), members_[a].end(),
                                          members_[b].begin(), members_[b].end());
    };
  }

 public:
  explicit LexicographicIndex(Vertex n)
      : members_(static_cast<std::size_t>(n) + 1), order_(n), rank_(static_cast<std::size_t>(n) + 1) {
    for (Vertex v = 1; v <= n; ++v) members_[v] = {v};
    std::iota(order_.begin(), order_.end(), 1u);
    refresh_ranks();
  }

  std::uint32_t root_count() const override { return static_cast<std::uint32_t>(order_.size()); }

  Vertex root_at(std::uint32_t position) const override { return order_[position - 1]; }

  Vertex first_in_order(std::span<const Vertex> roots) const override {
    return *std::min_element(roots.begin(), roots.end(),
                             [this](Vertex a, Vertex b) { return rank_[a] < rank_[b]; });
  }

  void merge(Vertex loser, std::span<const Vertex> winners) override {
    erase_from_order(loser);
    for (Vertex w : winners) erase_from_order(w);
    const auto& absorbed = members_[loser];
    for (Vertex w : winners) {
      std::vector<Vertex> grown;
      grown.reserve(members_[w].size() + absorbed.size());
      std::set_union(members_[w].begin(), members_[w].end(), absorbed.begin(), absorbed.end(),
                     std::back_inserter(grown));
      members_[w] = std::move(grown);
    }
    std::vector<Vertex>().swap(members_[loser]);
    for (Vertex w : winners) {
      order_.insert(std::lower_bound(order_.begin(), order_.end(), w, tree_less()), w);
    }
    refresh_ranks();
  }

 private:
  void erase_from_order(Vertex root) {
    auto it = std::lower_bound(order_.begin(), order_.end(), root, tree_less());
    if (it == order_.end() || *it != root) {
      throw std::logic_error("root " + std::to_string(root) + " missing from tree order");
    }
    order_.erase(it);
  }

  void refresh_ranks() {
    for (std::size_t p = 0; p < order_.size(); ++p) rank_[order_[p]] = static_cast<std::uint32_t>(p);
  }

  std::vector<std::vector<Vertex>> members_;
  std::vector<Vertex> order_;
  std::vector<std::uint32_t> rank_;
};

}  // namespace

std::string_view to_string(TreeOrder order) {
  return order == TreeOrder::lexicographic ? "lexicographic" : "root_label";
}

std::optional<TreeOrder> parse_tree_order(std::string_view text) {
  if (text == "lexicographic" || text == "lex") return TreeOrder::lexicographic;
  if (text == "root_label" || text == "root-label") return TreeOrder::root_label;
  return std::nullopt;
}

std::unique_ptr<RootIndex> make_root_index(TreeOrder order, Vertex n) {
  if (order == TreeOrder::lexicographic) return std::make_unique<LexicographicIndex>(n);
  return std::make_unique<RootLabelIndex>(n);
}

}  // namespace rrdag
