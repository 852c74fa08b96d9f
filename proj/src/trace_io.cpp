#include "rrdag/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace rrdag {
namespace {

struct RawEvent {
  std::size_t line = 0;
  std::vector<std::uint32_t> fields;
};

std::vector<std::uint32_t> split_numbers(std::string_view text, std::size_t line) {
  std::vector<std::uint32_t> out;
  std::size_t pos = 0;
  while (true) {
    pos = text.find_first_not_of(" \t\r", pos);
    if (pos == std::string_view::npos) break;
    const std::size_t end = std::min(text.find_first_of(" \t\r", pos), text.size());
    const std::string_view token = text.substr(pos, end - pos);
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      throw ParseError(line, "field " + std::to_string(out.size() + 1),
                       "expected a non-negative integer, got '" + std::string(token) + "'");
    }
    out.push_back(value);
    pos = end;
  }
  return out;
}

std::optional<std::uint32_t> m_directive(std::string_view comment, std::size_t line) {
  const auto body = comment.substr(comment.find_first_not_of("# \t"));
  if (body.rfind("m=", 0) != 0) return std::nullopt;
  const auto values = split_numbers(body.substr(2), line);
  if (values.size() != 1 || values[0] == 0) throw ParseError(line, "m", "expected a positive integer");
  return values[0];
}

}  // namespace

CoalescentTrace read_trace(std::istream& in, std::optional<std::uint32_t> m) {
  std::vector<RawEvent> events;
  std::optional<std::uint32_t> declared_m;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view text = line;
    const auto hash = text.find('#');
    if (hash != std::string_view::npos) {
      if (text.find_first_not_of(" \t") == hash) {
        if (auto d = m_directive(text.substr(hash), line_number)) declared_m = d;
      }
      text = text.substr(0, hash);
    }
    auto fields = split_numbers(text, line_number);
    if (fields.empty()) continue;
    if (fields.size() < 3) throw ParseError(line_number, "", "expected `i a_1 ... a_k xi`");
    events.push_back({line_number, std::move(fields)});
  }
  if (events.empty()) throw ParseError(line_number, "", "no events");

  const Vertex n = events.front().fields.front();
  if (n < 2) throw ParseError(events.front().line, "field 1", "step must be at least 2");
  if (!m) m = declared_m;
  if (!m) {
    m = n - 1;
    for (const auto& e : events) {
      const auto k = static_cast<std::uint32_t>(e.fields.size() - 2);
      if (k < e.fields.front()) {
        m = k - 1;
        break;
      }
    }
  }
  if (*m == 0) throw ParseError(events.front().line, "m", "inferred m is 0");

  CoalescentTrace trace(n, *m);
  for (const auto& e : events) {
    const std::span<const std::uint32_t> all(e.fields);
    try {
      trace.append(all.front(), all.subspan(1, all.size() - 2), all.back());
    } catch (const MalformedTrace& err) {
      throw ParseError(e.line, "", err.what());
    }
  }
  if (!trace.complete()) {
    throw ParseError(line_number, "", "trace stops before step 2 (next expected step " +
                                          std::to_string(trace.next_step()) + ")");
  }
  return trace;
}

CoalescentTrace read_trace_file(const std::string& path, std::optional<std::uint32_t> m) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file " + path);
  return read_trace(in, m);
}

void write_trace(std::ostream& out, const CoalescentTrace& trace) {
  out << "# m=" << trace.m() << '\n';
  for (std::size_t j = 0; j < trace.size(); ++j) {
    const MergeEvent e = trace[j];
    out << e.step;
    for (std::uint32_t a : e.selected) out << ' ' << a;
    out << ' ' << e.loser_index << '\n';
  }
}

}  // namespace rrdag
