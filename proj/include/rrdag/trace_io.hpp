#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "rrdag/coalescent.hpp"
#include "rrdag/graph_io.hpp"

namespace rrdag {

// Event file: one merge per line, `i a_1 ... a_k xi` with k = (m+1) ∧ i and
// steps descending from n to 2. Blank lines and `#` comments are ignored,
// except that a comment of the form `# m=<int>` fixes m. Otherwise n is the
// first step and m is read off the first tuple shorter than its step (or
// taken as n - 1 when every tuple is full, which yields the same chain).

CoalescentTrace read_trace(std::istream& in, std::optional<std::uint32_t> m = std::nullopt);
CoalescentTrace read_trace_file(const std::string& path,
                                std::optional<std::uint32_t> m = std::nullopt);

void write_trace(std::ostream& out, const CoalescentTrace& trace);

}  // namespace rrdag
