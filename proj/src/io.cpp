#include "hyperorient/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include <fmt/format.h>

namespace hyperorient {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(fmt::format("line {}: {}", line, what)), line_(line) {}

namespace {

bool is_skippable(const std::string& line) {
  auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

std::vector<std::uint64_t> parse_numbers(const std::string& line, std::size_t lineno) {
  std::vector<std::uint64_t> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p == end) break;
    std::uint64_t value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || (next < end && *next != ' ' && *next != '\t' && *next != '\r')) {
      throw ParseError(lineno, fmt::format("expected a nonnegative integer near '{}'",
                                           std::string(p, std::min<std::size_t>(12, end - p))));
    }
    out.push_back(value);
    p = next;
  }
  return out;
}

}  // namespace

Hypergraph read_hypergraph(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  Hypergraph graph;
  std::vector<VertexId> pins;

  while (std::getline(in, line)) {
    ++lineno;
    if (is_skippable(line)) continue;
    auto numbers = parse_numbers(line, lineno);
    if (!have_header) {
      if (numbers.size() != 2) throw ParseError(lineno, "header must be 'n m'");
      n = numbers[0];
      m = numbers[1];
      graph = Hypergraph(n);
      have_header = true;
      continue;
    }
    if (graph.num_edges() == m) throw ParseError(lineno, fmt::format("more than {} edges", m));
    pins.clear();
    for (auto v : numbers) {
      if (v >= n) throw ParseError(lineno, fmt::format("vertex {} out of range for n={}", v, n));
      pins.push_back(static_cast<VertexId>(v));
    }
    graph.add_edge(pins);
  }
  if (!have_header) throw ParseError(lineno, "missing 'n m' header");
  if (graph.num_edges() != m) {
    throw ParseError(lineno, fmt::format("expected {} edges, found {}", m, graph.num_edges()));
  }
  return graph;
}

Hypergraph read_hypergraph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  return read_hypergraph(in);
}

void write_hypergraph(std::ostream& out, const Hypergraph& graph) {
  out << graph.num_vertices() << ' ' << graph.num_edges() << '\n';
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    bool first = true;
    for (VertexId v : graph.edge(e)) {
      if (!first) out << ' ';
      out << v;
      first = false;
    }
    out << '\n';
  }
}

void write_orientation(std::ostream& out, const Orientation& orientation) {
  for (std::size_t e = 0; e < orientation.signs.size(); ++e) {
    out << e << ':';
    for (VertexId v : orientation.signs[e]) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace hyperorient
