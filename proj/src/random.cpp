#include "rrdag/random.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rrdag {

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(Seed seed, std::uint64_t lane)
    : key_(mix(mix(mix(seed.master_seed ^ 0x243f6a8885a308d3ull) + seed.stream_index * kGamma) +
               lane * 0xd1b54a32d192ed03ull)) {}

CounterRng CounterRng::split(std::uint64_t lane) const {
  return CounterRng(mix(key_ ^ mix(lane + 0x452821e638d01377ull)), 0);
}

namespace {
__extension__ using Wide = unsigned __int128;
}  // namespace

std::uint64_t CounterRng::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection of the biased low region.
  std::uint64_t x = (*this)();
  Wide product = static_cast<Wide>(x) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = (*this)();
      product = static_cast<Wide>(x) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::uint64_t>(product >> 64);
}

void DistinctSampler::sample(std::uint32_t k, std::uint32_t population, CounterRng& rng,
                             std::vector<std::uint32_t>& out) {
  if (k > population) {
    throw std::invalid_argument("sample_distinct: k=" + std::to_string(k) +
                                " exceeds population " + std::to_string(population));
  }
  out.clear();
  if (k == population) {
    out.resize(k);
    std::iota(out.begin(), out.end(), 1u);
    return;
  }
  if (static_cast<std::uint64_t>(k) * 8 <= population) {
    // Sparse regime: keep `out` sorted and reject repeats.
    while (out.size() < k) {
      const auto value = static_cast<std::uint32_t>(rng.below(population) + 1);
      auto pos = std::lower_bound(out.begin(), out.end(), value);
      if (pos == out.end() || *pos != value) out.insert(pos, value);
    }
    return;
  }
  window_.resize(population);
  std::iota(window_.begin(), window_.end(), 1u);
  for (std::uint32_t j = 0; j < k; ++j) {
    const auto r = j + static_cast<std::uint32_t>(rng.below(population - j));
    std::swap(window_[j], window_[r]);
  }
  out.assign(window_.begin(), window_.begin() + k);
  std::sort(out.begin(), out.end());
}

std::vector<std::uint32_t> sample_distinct(std::uint32_t k, std::uint32_t population,
                                           CounterRng& rng) {
  DistinctSampler sampler;
  std::vector<std::uint32_t> out;
  sampler.sample(k, population, rng, out);
  return out;
}

}  // namespace rrdag
