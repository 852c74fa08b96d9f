#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rrdag/graph.hpp"

namespace rrdag {

/// Input that does not follow a line-oriented file format. Carries the
/// 1-based line number and, when known, the offending field.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& message);

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// JSONL graph format, one object per line:
//   {"n":<int>,"m":<int>,"edges":[[v,w],...]}
// with v > w and edges listed by increasing v, then decreasing w.

std::string to_jsonl(const LabeledDag& g);
void write_jsonl(std::ostream& out, const LabeledDag& g);

LabeledDag parse_graph_line(std::string_view line, std::size_t line_number = 1);

/// Reads every non-blank line as a graph.
std::vector<LabeledDag> read_jsonl(std::istream& in);

}  // namespace rrdag
