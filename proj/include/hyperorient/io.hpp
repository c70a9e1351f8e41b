#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "hyperorient/hypergraph.hpp"

namespace hyperorient {

// Parse failure carrying the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Hypergraph text format:
//   line 1: "n m"
//   then m lines of whitespace-separated 0-based vertex ids (repeats allowed).
// Lines whose first non-blank character is '#' and blank lines are skipped.
Hypergraph read_hypergraph(std::istream& in);
Hypergraph read_hypergraph_file(const std::string& path);
void write_hypergraph(std::ostream& out, const Hypergraph& graph);

// One line per edge: "edge_id: v1 v2 ...".
void write_orientation(std::ostream& out, const Orientation& orientation);

}  // namespace hyperorient
