#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "rrdag/coalescent.hpp"
#include "rrdag/graph_io.hpp"
#include "rrdag/stats.hpp"
#include "rrdag/trace_io.hpp"

using namespace rrdag;

namespace {

const TreeOrder kOrders[] = {TreeOrder::lexicographic, TreeOrder::root_label};

std::string fixture(const char* name) { return std::string(RRDAG_SOURCE_DIR) + "/fixtures/" + name; }

CoalescentTrace figure_trace() { return read_trace_file(fixture("figure_2_5.events")); }

SelectionProfile hand_profile(Vertex n, std::initializer_list<std::uint32_t> selected,
                              std::initializer_list<std::uint32_t> lost) {
  SelectionProfile p;
  p.vertex = 1;
  p.n = n;
  p.m = 1;
  p.selected.assign(n + 1, 0);
  p.lost.assign(n + 1, 0);
  for (auto i : selected) p.selected[i] = 1;
  for (auto i : lost) p.lost[i] = 1;
  return p;
}

}  // namespace

TEST_CASE("selection size") {
  CHECK(selection_size(10, 2) == 3);
  CHECK(selection_size(3, 2) == 3);
  CHECK(selection_size(2, 2) == 2);
}

TEST_CASE("trace validation") {
  CoalescentTrace t(4, 1);
  const std::uint32_t ok[] = {1, 3};
  const std::uint32_t descending[] = {3, 1};
  const std::uint32_t out_of_range[] = {1, 5};
  const std::uint32_t too_long[] = {1, 2, 3};
  CHECK_THROWS_AS(t.append(3, ok, 1), MalformedTrace);
  CHECK_THROWS_AS(t.append(4, descending, 1), MalformedTrace);
  CHECK_THROWS_AS(t.append(4, out_of_range, 1), MalformedTrace);
  CHECK_THROWS_AS(t.append(4, too_long, 1), MalformedTrace);
  CHECK_THROWS_AS(t.append(4, ok, 3), MalformedTrace);
  t.append(4, ok, 2);
  CHECK(t.next_step() == 3);
  CHECK_FALSE(t.complete());
  CHECK_THROWS_AS(to_labeled_dag(t), MalformedTrace);
  CHECK_THROWS_AS(CoalescentTrace(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_trace(5, 0, Seed{}), std::invalid_argument);
}

TEST_CASE("two-vertex traces") {
  std::uint64_t loser_two = 0;
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    const auto trace = sample_trace(2, 3, Seed{2, static_cast<std::uint64_t>(t)});
    REQUIRE(trace.size() == 1);
    const auto e = trace[0];
    CHECK(e.step == 2);
    CHECK(std::vector<std::uint32_t>(e.selected.begin(), e.selected.end()) ==
          std::vector<std::uint32_t>{1, 2});
    if (e.loser_index == 2) ++loser_two;
  }
  CHECK(proportion_test(loser_two, trials, 0.5).passed);

  CoalescentTrace t(2, 1);
  const std::uint32_t both[] = {1, 2};
  t.append(2, both, 2);
  const auto r = replay_trace(t);
  CHECK(r.relabel == std::vector<Vertex>{1, 2});
  CHECK(to_labeled_dag(t) == LabeledDag(2, 1, {{}, {1}}));
}

TEST_CASE("step-5 tuple is uniform over the 10 triples") {
  std::map<std::vector<std::uint32_t>, std::uint64_t> counts;
  std::vector<std::uint64_t> losers(3, 0);
  EventSampler sampler(2, Seed{55, 0});
  for (int j = 0; j < 100000; ++j) {
    const auto e = sampler.next(5);
    ++counts[std::vector<std::uint32_t>(e.selected.begin(), e.selected.end())];
    ++losers[e.loser_index - 1];
  }
  REQUIRE(counts.size() == 10);
  std::vector<std::uint64_t> cells;
  for (const auto& [tuple, c] : counts) cells.push_back(c);
  CHECK(chisq_uniform(cells, 0.01).passed);
  CHECK(chisq_uniform(losers, 0.01).passed);
}

TEST_CASE("figure fixture replays to the figure graph under both orders") {
  std::ifstream expected(fixture("figure_2_5.expected.jsonl"));
  const auto graphs = read_jsonl(expected);
  REQUIRE(graphs.size() == 1);
  const auto trace = figure_trace();
  CHECK(trace.n() == 5);
  CHECK(trace.m() == 2);
  for (auto order : kOrders) {
    CAPTURE(to_string(order));
    CHECK(to_labeled_dag(trace, order) == graphs[0]);
  }
}

TEST_CASE("forced graph for n <= m + 1") {
  const LabeledDag complete(3, 2, {{}, {1}, {1, 2}});
  for (std::uint64_t s = 0; s < 50; ++s) {
    CHECK(to_labeled_dag(sample_trace(3, 2, Seed{3, s})) == complete);
    CHECK(generate_coalescent(3, 2, Seed{3, s}) == complete);
  }
}

TEST_CASE("relabel is a bijection and the forest relabels invariantly") {
  CounterRng perm_rng(Seed{77, 0});
  for (std::uint64_t s = 0; s < 200; ++s) {
    const Vertex n = 2 + static_cast<Vertex>(s % 40);
    const std::uint32_t m = 1 + static_cast<std::uint32_t>(s % 4);
    const auto trace = sample_trace(n, m, Seed{78, s});
    const auto r = replay_trace(trace);
    auto sorted = r.relabel;
    std::sort(sorted.begin(), sorted.end());
    std::vector<Vertex> identity(n);
    std::iota(identity.begin(), identity.end(), 1u);
    REQUIRE(sorted == identity);

    // Rename the coalescent vertices by a random permutation.
    std::vector<Vertex> sigma = identity;
    std::shuffle(sigma.begin(), sigma.end(), perm_rng);
    auto renamed = r.forest;
    for (auto& e : renamed) {
      e.from = sigma[e.from - 1];
      e.to = sigma[e.to - 1];
    }
    const auto g = relabel_forest(n, m, r.forest);
    CHECK(relabel_forest(n, m, renamed) == g);
    CHECK(validate(g).ok());
  }
}

TEST_CASE("relabel_forest rejects inconsistent stamps") {
  const StampedEdge twice[] = {{2, 1, 3}, {2, 3, 2}};
  CHECK_THROWS_AS(relabel_forest(3, 1, twice), MalformedTrace);
  const StampedEdge outside[] = {{4, 1, 2}};
  CHECK_THROWS_AS(relabel_forest(3, 1, outside), MalformedTrace);
}

TEST_CASE("root count drops by one per step") {
  for (auto order : kOrders) {
    const auto trace = sample_trace(60, 3, Seed{60, 0});
    CoalescentChain chain(60, 3, order);
    for (std::size_t j = 0; j < trace.size(); ++j) {
      CHECK(chain.index().root_count() == trace[j].step);
      chain.resolve(trace[j]);
      chain.apply();
    }
    CHECK(chain.finished());
    CHECK(chain.index().root_count() == 1);
  }
}

TEST_CASE("sampled and stored traces agree") {
  for (auto order : kOrders) {
    const Seed seed{90, 1};
    const auto g = to_labeled_dag(sample_trace(300, 2, seed), order);
    CHECK(generate_coalescent(300, 2, seed, order) == g);
    std::vector<std::uint32_t> deg(g.in_degrees().begin(), g.in_degrees().end());
    CHECK(coalescent_in_degrees(300, 2, seed, order) == deg);
    CHECK(validate(g).ok());
  }
}

TEST_CASE("profile helpers on hand-made indicators") {
  CHECK(degree_from_streak(hand_profile(12, {12, 9, 5, 3}, {3})) == 3);
  CHECK(degree_from_streak(hand_profile(12, {12, 9, 5, 3}, {})) == 4);
  CHECK(label_from_last_loss(hand_profile(6, {6, 4}, {})) == 1);
  CHECK(label_from_last_loss(hand_profile(6, {6, 4}, {4})) == 4);
  CHECK(ungreedy_from_connection_sets(hand_profile(6, {}, {})) == 0);
}

TEST_CASE("profile of n = 2") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto p = selection_profile(sample_trace(2, 2, Seed{22, s}), 1);
    CHECK(p.selected[2] == 1);
    CHECK(p.selection_steps() == std::vector<std::uint32_t>{2});
  }
  CHECK_THROWS_AS(selection_profile(sample_trace(4, 1, Seed{}), 5), std::out_of_range);
}

TEST_CASE("selection indicators have Bernoulli marginals") {
  // P(s_{v,i}=1) = ((m+1) ∧ i)/i and P(h_{v,i}=1) = 1/i at m=2.
  const Vertex n = 50;
  const int trials = 100000;
  const Vertex vertices[] = {1, 37};
  std::map<std::uint32_t, std::uint64_t> s_count, h_count;
  for (int t = 0; t < trials; ++t) {
    const auto trace = sample_trace(n, 2, Seed{250, static_cast<std::uint64_t>(t)});
    const auto profiles = selection_profiles(trace, vertices, TreeOrder::root_label);
    for (const auto& p : profiles) {
      for (std::uint32_t i : {5u, 50u}) {
        s_count[i] += p.selected[i];
        h_count[i] += p.lost[i];
      }
    }
  }
  for (std::uint32_t i : {5u, 50u}) {
    CAPTURE(i);
    const std::uint64_t draws = 2ull * trials;
    // Two tracked vertices share a trace, so this is a slightly conservative check.
    CHECK(proportion_test(s_count[i], draws, 3.0 / i, 3.0 * std::sqrt(2.0)).passed);
    CHECK(proportion_test(h_count[i], draws, 1.0 / i, 3.0 * std::sqrt(2.0)).passed);
  }
}

TEST_CASE("connection sets: singleton until hit, then the winners") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const Vertex n = 30;
    const std::uint32_t m = 1 + static_cast<std::uint32_t>(s % 3);
    const auto trace = sample_trace(n, m, Seed{31, s});
    for (Vertex v : {1u, 15u, 30u}) {
      const auto p = selection_profile(trace, v);
      CHECK(p.connection_set_at(n) == std::vector<Vertex>{v});
      for (const auto& u : p.connection_updates) {
        CHECK(u.roots.size() == selection_size(u.step, m) - 1);
      }
      if (!p.connection_updates.empty()) {
        CHECK(p.connection_updates.front().step == p.loss_step);
      }
    }
  }
}

TEST_CASE("cross-representation equality on random traces") {
  // Smaller sweep than the acceptance run; both tree orders.
  for (std::uint64_t s = 0; s < 400; ++s) {
    const std::uint32_t m = 1 + static_cast<std::uint32_t>(s % 4);
    const Vertex n = 2 + static_cast<Vertex>((s * 37) % 80);
    const auto order = kOrders[s % 2];
    const auto trace = sample_trace(n, m, Seed{400, s});
    const auto r = replay_trace(trace, order);
    const auto g = relabel_forest(n, m, r.forest);
    std::vector<Vertex> all(n);
    std::iota(all.begin(), all.end(), 1u);
    const auto profiles = selection_profiles(trace, all, order);
    for (const auto& p : profiles) {
      const Vertex label = r.relabel[p.vertex - 1];
      REQUIRE(label_from_last_loss(p) == label);
      REQUIRE(degree_from_streak(p) == degree_of(g, label));
      REQUIRE(ungreedy_from_connection_sets(p) == ungreedy_depth_walk(g, label));
    }
  }
}

TEST_CASE("n=3, m=2: the vertex relabeled 3 has ungreedy depth 2") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto trace = sample_trace(3, 2, Seed{33, s});
    const auto r = replay_trace(trace);
    const auto v = static_cast<Vertex>(std::find(r.relabel.begin(), r.relabel.end(), 3u) -
                                       r.relabel.begin()) + 1;
    CHECK(ungreedy_from_connection_sets(selection_profile(trace, v)) == 2);
  }
}

TEST_CASE("designated roots follow the first winner") {
  const Vertex tracked[] = {4, 7};
  DesignatedRoots d(tracked);
  const Vertex roots[] = {2, 4, 9};
  const Vertex winners[] = {2, 9};
  d.update(ResolvedStep{10, roots, winners, 4});
  CHECK(d[0] == 2);
  CHECK(d[1] == 7);
}

TEST_CASE("tau_k") {
  const Vertex pair[] = {1, 2};
  for (std::uint64_t s = 0; s < 10; ++s) CHECK(tau_k(2, 1, pair, Seed{1, s}) == 2);
  const Vertex bad[] = {1, 9};
  CHECK_THROWS_AS(tau_k(5, 1, bad, Seed{}), std::out_of_range);

  // Exact law: designated roots stay distinct until the first co-selection,
  // so P(tau_k < t) = ∏_{i >= t} P(at most one of k fixed roots among (m+1)∧i of i).
  const Vertex n = 400;
  const std::uint32_t m = 2, t = 40;
  const Vertex tracked[] = {5, 100, 333};
  double below = 1.0;
  for (double i = t; i <= n; ++i) {
    const double all = i * (i - 1) * (i - 2);
    const double none = (i - 3) * (i - 4) * (i - 5) / all;
    const double one = 9 * (i - 3) * (i - 4) / all;
    below *= none + one;
  }
  std::uint64_t hits = 0;
  const int trials = 4000;
  for (int j = 0; j < trials; ++j) {
    if (tau_k(n, m, tracked, Seed{440, static_cast<std::uint64_t>(j)}) >= t) ++hits;
  }
  CHECK(proportion_test(hits, trials, 1.0 - below).passed);
}
