#include "rrdag/coalescent.hpp"

#include <algorithm>
#include <iterator>
#include <string>

namespace rrdag {
namespace {

void check_sizes(Vertex n, std::uint32_t m) {
  if (n == 0) throw std::invalid_argument("coalescent needs n >= 1");
  if (m == 0) throw std::invalid_argument("coalescent needs m >= 1");
}

bool contains(std::span<const Vertex> xs, Vertex x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

// Drives a stored trace through a chain, calling visit(step, chain) before
// each merge.
template <class Visit>
void run_trace(const CoalescentTrace& trace, TreeOrder order, Visit&& visit) {
  if (!trace.complete()) {
    throw MalformedTrace("trace has " + std::to_string(trace.size()) + " events, expected " +
                         std::to_string(trace.n() - 1));
  }
  CoalescentChain chain(trace.n(), trace.m(), order);
  for (std::size_t j = 0; j < trace.size(); ++j) {
    const ResolvedStep& step = chain.resolve(trace[j]);
    visit(step, chain);
    chain.apply();
  }
}

template <class Visit>
void run_sampled(Vertex n, std::uint32_t m, Seed seed, TreeOrder order, Visit&& visit) {
  check_sizes(n, m);
  EventSampler sampler(m, seed);
  CoalescentChain chain(n, m, order);
  while (!chain.finished()) {
    const ResolvedStep& step = chain.resolve(sampler.next(chain.next_step()));
    if (!visit(step, chain)) return;
    chain.apply();
  }
}

}  // namespace

void check_event(const MergeEvent& e, std::uint32_t m) {
  const std::string where = "step " + std::to_string(e.step);
  if (e.step < 2) throw MalformedTrace(where + ": steps run from n down to 2");
  const std::uint32_t k = selection_size(e.step, m);
  if (e.selected.size() != k) {
    throw MalformedTrace(where + ": expected " + std::to_string(k) + " tree indices, got " +
                         std::to_string(e.selected.size()));
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (e.selected[j] < 1 || e.selected[j] > e.step) {
      throw MalformedTrace(where + ": tree index " + std::to_string(e.selected[j]) +
                           " outside [1, " + std::to_string(e.step) + "]");
    }
    if (j > 0 && e.selected[j] <= e.selected[j - 1]) {
      throw MalformedTrace(where + ": tree indices must be strictly ascending");
    }
  }
  if (e.loser_index < 1 || e.loser_index > k) {
    throw MalformedTrace(where + ": loser index " + std::to_string(e.loser_index) +
                         " outside [1, " + std::to_string(k) + "]");
  }
}

CoalescentTrace::CoalescentTrace(Vertex n, std::uint32_t m) : n_(n), m_(m) {
  check_sizes(n, m);
  losers_.reserve(n - 1);
  offsets_.reserve(n);
}

void CoalescentTrace::append(std::uint32_t step, std::span<const std::uint32_t> selected,
                             std::uint32_t loser_index) {
  if (complete()) throw MalformedTrace("trace already holds steps " + std::to_string(n_) + "..2");
  if (step != next_step()) {
    throw MalformedTrace("expected step " + std::to_string(next_step()) + ", got step " +
                         std::to_string(step));
  }
  check_event({step, selected, loser_index}, m_);
  selected_.insert(selected_.end(), selected.begin(), selected.end());
  offsets_.push_back(selected_.size());
  losers_.push_back(loser_index);
}

MergeEvent CoalescentTrace::operator[](std::size_t j) const {
  const auto first = static_cast<std::ptrdiff_t>(offsets_[j]);
  const auto last = static_cast<std::ptrdiff_t>(offsets_[j + 1]);
  return {n_ - static_cast<std::uint32_t>(j),
          std::span<const std::uint32_t>(selected_.data() + first,
                                         static_cast<std::size_t>(last - first)),
          losers_[j]};
}

MergeEvent CoalescentTrace::at_step(std::uint32_t step) const {
  if (step < 2 || step > n_ || n_ - step >= size()) {
    throw std::out_of_range("no event for step " + std::to_string(step));
  }
  return (*this)[n_ - step];
}

EventSampler::EventSampler(std::uint32_t m, Seed seed) : m_(m), rng_(seed) {}

MergeEvent EventSampler::next(std::uint32_t step) {
  const std::uint32_t k = selection_size(step, m_);
  sampler_.sample(k, step, rng_, tuple_);
  const auto loser = static_cast<std::uint32_t>(rng_.below(k)) + 1;
  return {step, tuple_, loser};
}

CoalescentTrace sample_trace(Vertex n, std::uint32_t m, Seed seed) {
  check_sizes(n, m);
  CoalescentTrace trace(n, m);
  EventSampler sampler(m, seed);
  for (std::uint32_t step = n; step >= 2; --step) {
    const MergeEvent e = sampler.next(step);
    trace.append(step, e.selected, e.loser_index);
  }
  return trace;
}

CoalescentChain::CoalescentChain(Vertex n, std::uint32_t m, TreeOrder order)
    : n_(n), m_(m), step_(n), index_(make_root_index(order, n)) {
  check_sizes(n, m);
  roots_.reserve(m + 1);
  winners_.reserve(m);
}

const ResolvedStep& CoalescentChain::resolve(const MergeEvent& e) {
  if (finished()) throw MalformedTrace("chain already reached a single tree");
  if (e.step != step_) {
    throw MalformedTrace("expected step " + std::to_string(step_) + ", got step " +
                         std::to_string(e.step));
  }
  check_event(e, m_);
  roots_.clear();
  winners_.clear();
  for (std::uint32_t a : e.selected) roots_.push_back(index_->root_at(a));
  const Vertex loser = roots_[e.loser_index - 1];
  for (Vertex r : roots_) {
    if (r != loser) winners_.push_back(r);
  }
  current_ = {step_, roots_, winners_, loser};
  pending_ = true;
  return current_;
}

void CoalescentChain::apply() {
  if (!pending_) throw std::logic_error("apply() without a resolved step");
  index_->merge(current_.loser, winners_);
  pending_ = false;
  --step_;
}

ReplayResult replay_trace(const CoalescentTrace& trace, TreeOrder order) {
  ReplayResult out{trace.n(), trace.m(), {}, std::vector<Vertex>(trace.n(), 1)};
  out.forest.reserve(required_edge_count(trace.n(), trace.m()));
  run_trace(trace, order, [&](const ResolvedStep& step, const CoalescentChain&) {
    out.relabel[step.loser - 1] = step.step;
    for (Vertex w : step.winners) out.forest.push_back({step.loser, w, step.step});
  });
  return out;
}

LabeledDag relabel_forest(Vertex n, std::uint32_t m, std::span<const StampedEdge> forest) {
  check_sizes(n, m);
  std::vector<Vertex> label(n, 0);
  for (const StampedEdge& e : forest) {
    if (e.from < 1 || e.from > n || e.to < 1 || e.to > n) {
      throw MalformedTrace("forest edge leaves the vertex range");
    }
    if (label[e.from - 1] != 0 && label[e.from - 1] != e.step) {
      throw MalformedTrace("vertex " + std::to_string(e.from) + " lost at two steps");
    }
    label[e.from - 1] = e.step;
  }
  std::vector<std::uint8_t> used(static_cast<std::size_t>(n) + 1, 0);
  for (Vertex& l : label) {
    if (l == 0) l = 1;
    if (l > n || used[l]) throw MalformedTrace("loss steps do not form a permutation");
    used[l] = 1;
  }
  std::vector<std::vector<Vertex>> rows(n);
  for (const StampedEdge& e : forest) rows[label[e.from - 1] - 1].push_back(label[e.to - 1]);
  return LabeledDag(n, m, rows);
}

LabeledDag to_labeled_dag(const CoalescentTrace& trace, TreeOrder order) {
  const ReplayResult r = replay_trace(trace, order);
  return relabel_forest(r.n, r.m, r.forest);
}

LabeledDag generate_coalescent(Vertex n, std::uint32_t m, Seed seed, TreeOrder order) {
  std::vector<StampedEdge> forest;
  forest.reserve(required_edge_count(n, m));
  run_sampled(n, m, seed, order, [&](const ResolvedStep& step, const CoalescentChain&) {
    for (Vertex w : step.winners) forest.push_back({step.loser, w, step.step});
    return true;
  });
  return relabel_forest(n, m, forest);
}

std::vector<std::uint32_t> coalescent_in_degrees(Vertex n, std::uint32_t m, Seed seed,
                                                 TreeOrder order) {
  check_sizes(n, m);
  std::vector<std::uint32_t> by_vertex(n, 0);
  std::vector<Vertex> label(n, 1);
  run_sampled(n, m, seed, order, [&](const ResolvedStep& step, const CoalescentChain&) {
    label[step.loser - 1] = step.step;
    for (Vertex w : step.winners) ++by_vertex[w - 1];
    return true;
  });
  std::vector<std::uint32_t> by_label(n, 0);
  for (Vertex v = 0; v < n; ++v) by_label[label[v] - 1] = by_vertex[v];
  return by_label;
}

std::vector<std::uint32_t> SelectionProfile::selection_steps() const {
  std::vector<std::uint32_t> steps;
  for (std::uint32_t i = n; i >= 2; --i) {
    if (selected[i]) steps.push_back(i);
  }
  return steps;
}

std::vector<Vertex> SelectionProfile::connection_set_at(std::uint32_t step) const {
  std::vector<Vertex> current{vertex};
  for (const auto& u : connection_updates) {
    if (u.step <= step) break;
    current = u.roots;
  }
  return current;
}

std::vector<std::uint32_t> SelectionProfile::connection_hits() const {
  std::vector<std::uint32_t> hits;
  hits.reserve(connection_updates.size());
  for (const auto& u : connection_updates) hits.push_back(u.step);
  return hits;
}

std::vector<SelectionProfile> selection_profiles(const CoalescentTrace& trace,
                                                 std::span<const Vertex> vertices,
                                                 TreeOrder order) {
  const Vertex n = trace.n();
  std::vector<SelectionProfile> profiles;
  profiles.reserve(vertices.size());
  std::vector<std::vector<Vertex>> connection;
  for (Vertex v : vertices) {
    if (v < 1 || v > n) {
      throw std::out_of_range("vertex " + std::to_string(v) + " outside [1, " +
                              std::to_string(n) + "]");
    }
    SelectionProfile p;
    p.vertex = v;
    p.n = n;
    p.m = trace.m();
    p.selected.assign(static_cast<std::size_t>(n) + 1, 0);
    p.lost.assign(static_cast<std::size_t>(n) + 1, 0);
    profiles.push_back(std::move(p));
    connection.push_back({v});
  }
  DesignatedRoots designated(vertices);
  run_trace(trace, order, [&](const ResolvedStep& step, const CoalescentChain&) {
    for (std::size_t j = 0; j < profiles.size(); ++j) {
      SelectionProfile& p = profiles[j];
      const Vertex root = designated[j];
      if (contains(step.roots, root)) {
        p.selected[step.step] = 1;
        if (root == step.loser) p.lost[step.step] = 1;
      }
      if (step.loser == p.vertex) p.loss_step = step.step;
      if (contains(connection[j], step.loser)) {
        connection[j].assign(step.winners.begin(), step.winners.end());
        p.connection_updates.push_back({step.step, connection[j]});
      }
    }
    designated.update(step);
  });
  return profiles;
}

SelectionProfile selection_profile(const CoalescentTrace& trace, Vertex v, TreeOrder order) {
  const Vertex one[] = {v};
  return std::move(selection_profiles(trace, one, order).front());
}

std::uint32_t degree_from_streak(const SelectionProfile& p) {
  std::uint32_t streak = 0;
  for (std::uint32_t i = p.n; i >= 2; --i) {
    if (!p.selected[i]) continue;
    if (p.lost[i]) break;
    ++streak;
  }
  return streak;
}

Vertex label_from_last_loss(const SelectionProfile& p) {
  for (std::uint32_t i = p.n; i >= 2; --i) {
    if (p.lost[i]) return i;
  }
  return 1;
}

std::uint32_t ungreedy_from_connection_sets(const SelectionProfile& p) {
  return static_cast<std::uint32_t>(p.connection_updates.size());
}

std::uint32_t tau_k(Vertex n, std::uint32_t m, std::span<const Vertex> vertices, Seed seed,
                    TreeOrder order) {
  for (Vertex v : vertices) {
    if (v < 1 || v > n) throw std::out_of_range("tracked vertex outside [1, n]");
  }
  DesignatedRoots designated(vertices);
  std::uint32_t tau = 0;
  run_sampled(n, m, seed, order, [&](const ResolvedStep& step, const CoalescentChain&) {
    std::size_t hits = 0;
    for (std::size_t j = 0; j < designated.size(); ++j) {
      if (contains(step.roots, designated[j])) ++hits;
    }
    if (hits >= 2) {
      tau = step.step;
      return false;
    }
    designated.update(step);
    return true;
  });
  return tau;
}

}  // namespace rrdag
