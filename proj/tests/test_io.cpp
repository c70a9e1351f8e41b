#include <gtest/gtest.h>

#include <sstream>

#include "hyperorient/io.hpp"

using namespace hyperorient;

TEST(ReadHypergraph, ParsesWithComments) {
  std::istringstream in("# a comment\n4 2\n\n0 1 2\n  # another\n3 3 1\n");
  auto g = read_hypergraph(in);
  EXPECT_EQ(g.num_vertices(), 4U);
  ASSERT_EQ(g.num_edges(), 2U);
  EXPECT_EQ(g.edge_size(1), 3);
  EXPECT_EQ(g.degrees()[3], 2U);
}

TEST(ReadHypergraph, RoundTrip) {
  Hypergraph g(5, {{0, 1, 2}, {4, 4}, {3, 2, 1}});
  std::stringstream buf;
  write_hypergraph(buf, g);
  EXPECT_EQ(read_hypergraph(buf), g);
}

TEST(ReadHypergraph, ReportsLineNumbers) {
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      read_hypergraph(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("3 1\n0 1 x\n"), 2U);
  EXPECT_EQ(line_of("# c\n3 2\n0 1\n0 5\n"), 4U);
  EXPECT_EQ(line_of("3\n"), 1U);
  EXPECT_NE(line_of("3 2\n0 1\n"), 0U);
}

TEST(WriteOrientation, OneLinePerEdge) {
  std::ostringstream out;
  write_orientation(out, Orientation::from_signs(3, {{0, 1}, {2}}));
  EXPECT_EQ(out.str(), "0: 0 1\n1: 2\n");
}
