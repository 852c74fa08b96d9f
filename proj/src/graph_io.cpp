#include "rrdag/graph_io.hpp"

#include <istream>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace rrdag {
namespace {

using nlohmann::json;

std::uint32_t positive_field(const json& obj, const char* name, std::size_t line) {
  auto it = obj.find(name);
  if (it == obj.end()) throw ParseError(line, name, "missing field");
  if (!it->is_number_unsigned() || it->get<std::uint64_t>() == 0 ||
      it->get<std::uint64_t>() > std::numeric_limits<std::uint32_t>::max()) {
    throw ParseError(line, name, "expected a positive 32-bit integer");
  }
  return it->get<std::uint32_t>();
}

}  // namespace

ParseError::ParseError(std::size_t line, std::string field, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) +
                         (field.empty() ? std::string() : ", field '" + field + "'") + ": " +
                         message),
      line_(line),
      field_(std::move(field)) {}

std::string to_jsonl(const LabeledDag& g) {
  std::string out = "{\"n\":" + std::to_string(g.size()) + ",\"m\":" + std::to_string(g.m()) +
                    ",\"edges\":[";
  bool first = true;
  for (Vertex v = 1; v <= g.size(); ++v) {
    for (Vertex w : g.out_neighbors(v)) {
      if (!first) out.push_back(',');
      first = false;
      out += '[' + std::to_string(v) + ',' + std::to_string(w) + ']';
    }
  }
  out += "]}";
  return out;
}

void write_jsonl(std::ostream& out, const LabeledDag& g) { out << to_jsonl(g) << '\n'; }

LabeledDag parse_graph_line(std::string_view line, std::size_t line_number) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_number, "", std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ParseError(line_number, "", "expected a JSON object");
  for (const auto& item : obj.items()) {
    if (item.key() != "n" && item.key() != "m" && item.key() != "edges") {
      throw ParseError(line_number, item.key(), "unknown field");
    }
  }
  const Vertex n = positive_field(obj, "n", line_number);
  const std::uint32_t m = positive_field(obj, "m", line_number);
  auto edges_it = obj.find("edges");
  if (edges_it == obj.end()) throw ParseError(line_number, "edges", "missing field");
  if (!edges_it->is_array()) throw ParseError(line_number, "edges", "expected an array");

  std::vector<Edge> edges;
  edges.reserve(edges_it->size());
  for (std::size_t j = 0; j < edges_it->size(); ++j) {
    const json& pair = (*edges_it)[j];
    const std::string field = "edges[" + std::to_string(j) + "]";
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
        !pair[1].is_number_unsigned()) {
      throw ParseError(line_number, field, "expected [v,w] with non-negative integers");
    }
    const auto v = pair[0].get<std::uint64_t>();
    const auto w = pair[1].get<std::uint64_t>();
    if (v < 1 || v > n || w < 1 || w > n) {
      throw ParseError(line_number, field, "vertex outside [1, n]");
    }
    edges.push_back({static_cast<Vertex>(v), static_cast<Vertex>(w)});
  }
  return LabeledDag::from_edges(n, m, edges);
}

std::vector<LabeledDag> read_jsonl(std::istream& in) {
  std::vector<LabeledDag> graphs;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    graphs.push_back(parse_graph_line(line, line_number));
  }
  return graphs;
}

}  // namespace rrdag
