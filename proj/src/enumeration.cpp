#include "rrdag/enumeration.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <ostream>
#include <thread>

#include "rrdag/coalescent.hpp"

namespace rrdag {
namespace {

void check_sizes(Vertex n, std::uint32_t m) {
  if (n == 0) throw std::invalid_argument("enumeration needs n >= 1");
  if (m == 0) throw std::invalid_argument("enumeration needs m >= 1");
}

// Advances an ascending k-subset of [pop] to its lexicographic successor.
bool next_combination(std::vector<std::uint32_t>& c, std::uint32_t pop) {
  const auto k = static_cast<std::uint32_t>(c.size());
  for (std::uint32_t j = k; j-- > 0;) {
    if (c[j] < pop - (k - 1 - j)) {
      ++c[j];
      for (std::uint32_t l = j + 1; l < k; ++l) c[l] = c[l - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<std::uint32_t> first_combination(std::uint32_t k) {
  std::vector<std::uint32_t> c(k);
  std::iota(c.begin(), c.end(), 1u);
  return c;
}

// All ascending k-subsets of [pop], concatenated.
std::vector<std::uint32_t> all_combinations(std::uint32_t k, std::uint32_t pop) {
  std::vector<std::uint32_t> flat;
  auto c = first_combination(k);
  do {
    flat.insert(flat.end(), c.begin(), c.end());
  } while (next_combination(c, pop));
  return flat;
}

void check_cap(const BigInt& count, std::uint64_t cap, const std::string& what) {
  if (count > cap) {
    throw CapExceeded(what + " has " + count.str() + " outcomes, above the cap of " +
                      std::to_string(cap));
  }
}

struct StepChoices {
  std::uint32_t k = 0;
  std::vector<std::uint32_t> tuples;
  std::uint64_t tuple_count = 0;
  std::uint64_t radix() const { return tuple_count * k; }
};

void add_graph(ExactDistribution& dist, LabeledDag graph, std::uint64_t count) {
  auto key = canonical_key(graph);
  auto [it, inserted] = dist.graphs.try_emplace(std::move(key), GraphCount{std::move(graph), 0});
  it->second.count += count;
  dist.total += count;
}

// Enumerates every trace whose step-n choice is in `first_choices`.
void exhaust_slice(Vertex n, std::uint32_t m, TreeOrder order,
                   const std::vector<StepChoices>& choices,
                   std::span<const std::uint64_t> first_choices, ExactDistribution& out) {
  std::vector<std::uint64_t> digit(static_cast<std::size_t>(n) + 1, 0);
  std::vector<StampedEdge> forest;
  for (std::uint64_t first : first_choices) {
    std::fill(digit.begin(), digit.end(), 0);
    digit[n] = first;
    while (true) {
      CoalescentChain chain(n, m, order);
      forest.clear();
      for (std::uint32_t i = n; i >= 2; --i) {
        const StepChoices& c = choices[i];
        const std::uint64_t tuple = digit[i] / c.k;
        const auto loser = static_cast<std::uint32_t>(digit[i] % c.k) + 1;
        const std::span<const std::uint32_t> selected(c.tuples.data() + tuple * c.k, c.k);
        const ResolvedStep& step = chain.resolve({i, selected, loser});
        for (Vertex w : step.winners) forest.push_back({step.loser, w, i});
        chain.apply();
      }
      add_graph(out, relabel_forest(n, m, forest), 1);
      std::uint32_t i = 2;
      for (; i < n; ++i) {
        if (++digit[i] < choices[i].radix()) break;
        digit[i] = 0;
      }
      if (i >= n) break;
    }
  }
}

void merge_into(ExactDistribution& into, ExactDistribution&& from) {
  for (auto& [key, gc] : from.graphs) {
    auto [it, inserted] = into.graphs.try_emplace(key, GraphCount{gc.graph, 0});
    it->second.count += gc.count;
  }
  into.total += from.total;
}

std::uint64_t falling(std::uint64_t n, std::uint64_t k) {
  std::uint64_t out = 1;
  for (std::uint64_t j = 0; j < k; ++j) out *= n - j;
  return out;
}

// Ordered tuples of distinct vertices whose degrees pass `test`.
template <class Test>
std::uint64_t count_tuples(const LabeledDag& g, std::span<const std::uint32_t> d, Test test,
                           std::vector<std::uint8_t>& used, std::size_t j) {
  if (j == d.size()) return 1;
  std::uint64_t total = 0;
  for (Vertex v = 1; v <= g.size(); ++v) {
    if (used[v] || !test(g.in_degree(v), d[j])) continue;
    used[v] = 1;
    total += count_tuples(g, d, test, used, j + 1);
    used[v] = 0;
  }
  return total;
}

template <class Test>
Rational tuple_probability(const ExactDistribution& dist, std::span<const std::uint32_t> d,
                           Test test) {
  if (d.size() > dist.n) {
    throw std::invalid_argument("need k <= n distinct vertices, got k = " +
                                std::to_string(d.size()));
  }
  if (dist.total == 0) throw std::invalid_argument("empty distribution");
  BigInt hits = 0;
  std::vector<std::uint8_t> used(static_cast<std::size_t>(dist.n) + 1, 0);
  for (const auto& [key, gc] : dist.graphs) {
    hits += BigInt(gc.count) * count_tuples(gc.graph, d, test, used, 0);
  }
  return Rational(hits, BigInt(dist.total) * falling(dist.n, d.size()));
}

}  // namespace

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt out = 1;
  for (std::uint64_t j = 1; j <= k; ++j) out = out * (n - k + j) / j;
  return out;
}

BigInt count_increasing_dags(Vertex n, std::uint32_t m) {
  check_sizes(n, m);
  BigInt out = 1;
  for (std::uint64_t i = m + 1; i + 1 <= n; ++i) out *= binomial(i, m);
  return out;
}

void for_each_increasing_dag(Vertex n, std::uint32_t m,
                             const std::function<void(const LabeledDag&)>& visit,
                             std::uint64_t cap) {
  check_cap(count_increasing_dags(n, m), cap, "(m,n) = (" + std::to_string(m) + "," +
                                                  std::to_string(n) + ") DAG class");
  std::vector<std::vector<std::uint32_t>> rows(n);
  for (Vertex v = 1; v <= n; ++v) rows[v - 1] = first_combination(required_out_degree(v, m));
  while (true) {
    visit(LabeledDag(n, m, rows));
    Vertex v = 2;
    for (; v <= n; ++v) {
      if (next_combination(rows[v - 1], v - 1)) break;
      rows[v - 1] = first_combination(required_out_degree(v, m));
    }
    if (v > n) break;
  }
}

std::vector<LabeledDag> enumerate_increasing_dags(Vertex n, std::uint32_t m, std::uint64_t cap) {
  std::vector<LabeledDag> out;
  for_each_increasing_dag(n, m, [&out](const LabeledDag& g) { out.push_back(g); }, cap);
  return out;
}

BigInt count_coalescent_traces(Vertex n, std::uint32_t m) {
  check_sizes(n, m);
  BigInt out = 1;
  for (std::uint32_t i = 2; i <= n; ++i) {
    const std::uint32_t k = selection_size(i, m);
    out *= binomial(i, k) * k;
  }
  return out;
}

bool ExactDistribution::uniform_with(std::uint64_t expected) const {
  return std::all_of(graphs.begin(), graphs.end(),
                     [expected](const auto& kv) { return kv.second.count == expected; });
}

ExactDistribution exhaust_coalescent(Vertex n, std::uint32_t m, const ExhaustOptions& options) {
  check_cap(count_coalescent_traces(n, m), options.cap,
            "(m,n) = (" + std::to_string(m) + "," + std::to_string(n) + ") coalescent");
  ExactDistribution dist{n, m, 0, {}};
  if (n == 1) {
    add_graph(dist, LabeledDag(1, m, std::vector<std::vector<Vertex>>(1)), 1);
    return dist;
  }
  std::vector<StepChoices> choices(static_cast<std::size_t>(n) + 1);
  for (std::uint32_t i = 2; i <= n; ++i) {
    StepChoices& c = choices[i];
    c.k = selection_size(i, m);
    c.tuples = all_combinations(c.k, i);
    c.tuple_count = c.tuples.size() / c.k;
  }
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::uint64_t>(options.threads, 1, choices[n].radix()));
  std::vector<std::vector<std::uint64_t>> slices(workers);
  for (std::uint64_t f = 0; f < choices[n].radix(); ++f) slices[f % workers].push_back(f);

  std::vector<ExactDistribution> parts(workers, ExactDistribution{n, m, 0, {}});
  if (workers == 1) {
    exhaust_slice(n, m, options.order, choices, slices[0], parts[0]);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] { exhaust_slice(n, m, options.order, choices, slices[w], parts[w]); });
    }
  }
  for (auto& part : parts) merge_into(dist, std::move(part));
  return dist;
}

ExactDistribution uniform_dag_distribution(Vertex n, std::uint32_t m, std::uint64_t cap) {
  ExactDistribution dist{n, m, 0, {}};
  for_each_increasing_dag(n, m, [&dist](const LabeledDag& g) { add_graph(dist, g, 1); }, cap);
  return dist;
}

Rational joint_degree_tail(const ExactDistribution& dist, std::span<const std::uint32_t> d) {
  return tuple_probability(dist, d, [](std::uint32_t deg, std::uint32_t t) { return deg >= t; });
}

Rational joint_degree_point(const ExactDistribution& dist, std::span<const std::uint32_t> d) {
  return tuple_probability(dist, d, [](std::uint32_t deg, std::uint32_t t) { return deg == t; });
}

std::map<std::vector<std::uint32_t>, Rational> exact_degree_law(const ExactDistribution& dist,
                                                                std::uint32_t k,
                                                                std::uint32_t max_d) {
  std::map<std::vector<std::uint32_t>, Rational> table;
  std::vector<std::uint32_t> d(k, 0);
  while (true) {
    table.emplace(d, joint_degree_tail(dist, d));
    std::uint32_t j = 0;
    for (; j < k; ++j) {
      if (++d[j] <= max_d) break;
      d[j] = 0;
    }
    if (j == k) break;
  }
  return table;
}

Rational verify_inclusion_exclusion(const ExactDistribution& dist,
                                    std::span<const std::uint32_t> d) {
  const std::size_t k = d.size();
  if (k >= 32) throw std::invalid_argument("inclusion-exclusion limited to k < 32");
  Rational sum = 0;
  std::vector<std::uint32_t> shifted(d.begin(), d.end());
  for (std::uint32_t subset = 0; subset < (1u << k); ++subset) {
    for (std::size_t j = 0; j < k; ++j) shifted[j] = d[j] + ((subset >> j) & 1u);
    const Rational p = joint_degree_tail(dist, shifted);
    if (std::popcount(subset) % 2 == 0) {
      sum += p;
    } else {
      sum -= p;
    }
  }
  return joint_degree_point(dist, d) - sum;
}

void write_oracle_fixture(std::ostream& out, const ExactDistribution& dist) {
  out << "{\"m\":" << dist.m << ",\"n\":" << dist.n << ",\"total\":" << dist.total
      << ",\"graphs\":[";
  bool first_graph = true;
  for (const auto& [key, gc] : dist.graphs) {
    out << (first_graph ? "" : ",") << "{\"edges\":[";
    first_graph = false;
    bool first_edge = true;
    for (const Edge& e : gc.graph.edges()) {
      out << (first_edge ? "" : ",") << '[' << e.from << ',' << e.to << ']';
      first_edge = false;
    }
    out << "],\"count\":" << gc.count << '}';
  }
  out << "]}\n";
}

}  // namespace rrdag
