#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "rrdag/graph.hpp"
#include "rrdag/random.hpp"
#include "rrdag/tree_order.hpp"

namespace rrdag {

/// Number of trees drawn at step i: (m+1) ∧ i.
constexpr std::uint32_t selection_size(std::uint32_t step, std::uint32_t m) {
  return step < m + 1 ? step : m + 1;
}

/// A trace or event that breaks the chain's structure.
class MalformedTrace : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One merge step. `selected` holds ascending 1-based tree positions in [step];
/// `loser_index` is 1-based within `selected`.
struct MergeEvent {
  std::uint32_t step = 0;
  std::span<const std::uint32_t> selected;
  std::uint32_t loser_index = 0;
};

/// Throws MalformedTrace unless `e` is a legal event at its step.
void check_event(const MergeEvent& e, std::uint32_t m);

/// Events for steps n, n-1, ..., 2 in flat storage.
class CoalescentTrace {
 public:
  CoalescentTrace(Vertex n, std::uint32_t m);

  /// Appends the event for the next pending step; validates it.
  void append(std::uint32_t step, std::span<const std::uint32_t> selected,
              std::uint32_t loser_index);

  Vertex n() const { return n_; }
  std::uint32_t m() const { return m_; }
  std::size_t size() const { return losers_.size(); }
  bool complete() const { return size() + 1 == n_; }
  std::uint32_t next_step() const { return n_ - static_cast<std::uint32_t>(size()); }

  /// j-th event; j = 0 is step n.
  MergeEvent operator[](std::size_t j) const;
  MergeEvent at_step(std::uint32_t step) const;

  bool operator==(const CoalescentTrace&) const = default;

 private:
  Vertex n_;
  std::uint32_t m_;
  std::vector<std::uint32_t> selected_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> losers_;
};

/// Draws events step by step: a uniform ascending tuple, then a uniform loser.
/// The returned span is valid until the next call.
class EventSampler {
 public:
  EventSampler(std::uint32_t m, Seed seed);

  MergeEvent next(std::uint32_t step);

 private:
  std::uint32_t m_;
  CounterRng rng_;
  DistinctSampler sampler_;
  std::vector<std::uint32_t> tuple_;
};

CoalescentTrace sample_trace(Vertex n, std::uint32_t m, Seed seed);

/// An event resolved against the current forest: concrete roots in tuple
/// order. Spans stay valid until the next resolve().
struct ResolvedStep {
  std::uint32_t step = 0;
  std::span<const Vertex> roots;
  std::span<const Vertex> winners;
  Vertex loser = 0;
};

/// Runs the chain one event at a time. Observers inspect the resolved step
/// and index() before apply() commits the merge.
class CoalescentChain {
 public:
  CoalescentChain(Vertex n, std::uint32_t m, TreeOrder order);

  Vertex n() const { return n_; }
  std::uint32_t m() const { return m_; }
  std::uint32_t next_step() const { return step_; }
  bool finished() const { return step_ < 2; }
  const RootIndex& index() const { return *index_; }

  const ResolvedStep& resolve(const MergeEvent& e);
  void apply();

 private:
  Vertex n_;
  std::uint32_t m_;
  std::uint32_t step_;
  bool pending_ = false;
  std::unique_ptr<RootIndex> index_;
  std::vector<Vertex> roots_;
  std::vector<Vertex> winners_;
  ResolvedStep current_;
};

/// Edge of the final forest, stamped with the step that created it.
struct StampedEdge {
  Vertex from = 0;
  Vertex to = 0;
  std::uint32_t step = 0;
};

struct ReplayResult {
  Vertex n = 0;
  std::uint32_t m = 0;
  std::vector<StampedEdge> forest;
  /// relabel[v - 1] = L_C(v): the step at which v lost, 1 for the survivor.
  std::vector<Vertex> relabel;
};

ReplayResult replay_trace(const CoalescentTrace& trace,
                          TreeOrder order = TreeOrder::lexicographic);

/// Renames every vertex by the stamp of its outgoing edges (1 if it has
/// none). Depends on the stamps only, so any renaming of the input vertices
/// yields the same graph.
LabeledDag relabel_forest(Vertex n, std::uint32_t m, std::span<const StampedEdge> forest);

LabeledDag to_labeled_dag(const CoalescentTrace& trace,
                          TreeOrder order = TreeOrder::lexicographic);

/// Samples and relabels without storing the trace.
LabeledDag generate_coalescent(Vertex n, std::uint32_t m, Seed seed,
                               TreeOrder order = TreeOrder::root_label);

/// In-degree of every vertex of the relabeled graph, index = label - 1.
std::vector<std::uint32_t> coalescent_in_degrees(Vertex n, std::uint32_t m, Seed seed,
                                                 TreeOrder order = TreeOrder::root_label);

/// Per-step record for one coalescent vertex v. The tree "containing" v is the
/// tree of its designated root (see DesignatedRoots); before v loses that is
/// v's own tree.
struct SelectionProfile {
  Vertex vertex = 0;
  Vertex n = 0;
  std::uint32_t m = 0;
  /// Indexed by step, entries 0 and 1 unused.
  std::vector<std::uint8_t> selected;
  std::vector<std::uint8_t> lost;
  /// Step at which v itself lost, 0 if never.
  std::uint32_t loss_step = 0;

  struct ConnectionUpdate {
    std::uint32_t step = 0;
    std::vector<Vertex> roots;
  };
  /// Each entry replaces C after its step is processed, in descending order.
  std::vector<ConnectionUpdate> connection_updates;

  /// S_n(v) as a descending list.
  std::vector<std::uint32_t> selection_steps() const;
  /// The connection set in force while step `step` is processed.
  std::vector<Vertex> connection_set_at(std::uint32_t step) const;
  /// Steps whose loser was in the connection set, descending.
  std::vector<std::uint32_t> connection_hits() const;
};

SelectionProfile selection_profile(const CoalescentTrace& trace, Vertex v,
                                   TreeOrder order = TreeOrder::lexicographic);
std::vector<SelectionProfile> selection_profiles(const CoalescentTrace& trace,
                                                 std::span<const Vertex> vertices,
                                                 TreeOrder order = TreeOrder::lexicographic);

std::uint32_t degree_from_streak(const SelectionProfile& p);
Vertex label_from_last_loss(const SelectionProfile& p);
std::uint32_t ungreedy_from_connection_sets(const SelectionProfile& p);

/// Designated roots of a few tracked vertices. A vertex starts designated to
/// its own root; whenever its designated root loses, the designation moves to
/// the first winner of that step in tree order. The designated root is always
/// a root the vertex reaches, and it is selected at step i with probability
/// ((m+1) ∧ i)/i whatever happened before.
class DesignatedRoots {
 public:
  explicit DesignatedRoots(std::span<const Vertex> vertices)
      : roots_(vertices.begin(), vertices.end()) {}

  std::size_t size() const { return roots_.size(); }
  Vertex operator[](std::size_t j) const { return roots_[j]; }
  /// Call after observers ran and before CoalescentChain::apply().
  void update(const ResolvedStep& step) {
    for (Vertex& r : roots_) {
      if (r == step.loser) r = step.winners.front();
    }
  }

 private:
  std::vector<Vertex> roots_;
};

/// Largest step at which at least two of `vertices` have their designated
/// trees selected together, 0 if that never happens. Stops at the first hit.
std::uint32_t tau_k(Vertex n, std::uint32_t m, std::span<const Vertex> vertices, Seed seed,
                    TreeOrder order = TreeOrder::root_label);

}  // namespace rrdag
