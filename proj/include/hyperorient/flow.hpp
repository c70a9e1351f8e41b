#pragma once

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "hyperorient/hypergraph.hpp"
#include "hyperorient/rational.hpp"

namespace hyperorient {

struct FlowArc {
  std::uint32_t tail;
  std::uint32_t head;
  std::int64_t capacity;
};

// Bipartite network: source 0, sink 1, edge nodes 2..m+1, vertex nodes
// m+2..m+n+1. Arcs are stored source arcs first (one per edge), then the
// unit edge->vertex arcs grouped by edge, then the sink arcs (one per vertex).
struct FlowNetwork {
  static constexpr std::uint32_t source = 0;
  static constexpr std::uint32_t sink = 1;

  std::size_t num_edges = 0;
  std::size_t num_vertices = 0;
  std::vector<FlowArc> arcs;
  // First unit arc of each edge; edge e owns [unit_offset[e], unit_offset[e+1]).
  std::vector<std::size_t> unit_offset;

  std::size_t num_nodes() const { return num_edges + num_vertices + 2; }
  std::uint32_t edge_node(EdgeId e) const { return 2 + e; }
  std::uint32_t vertex_node(VertexId v) const { return static_cast<std::uint32_t>(2 + num_edges + v); }
  std::int64_t source_capacity() const;
  std::int64_t sink_capacity() const;
};

FlowNetwork build_network(const Hypergraph& graph, const OrientationParams& p);

struct MaxFlow {
  std::int64_t value = 0;
  std::vector<std::int64_t> flow;  // per arc of the network
  // Nodes reachable from the source in the final residual network.
  std::vector<bool> source_side;
};

// Dinic's algorithm with an iterative blocking-flow search.
MaxFlow max_flow(const FlowNetwork& net);

struct CutWitness {
  std::vector<VertexId> subset;  // S, sorted
  Rational kappa_S;              // w-density of the w-induced subgraph on S
  std::int64_t cut_capacity = 0;
  std::int64_t demand = 0;       // total source capacity
};

// An edge of size h-j with fewer than w-j distinct vertices.
struct DegenerateEdge {
  EdgeId edge;
  int distinct;
  int demand;
};

struct OrientResult {
  std::variant<Orientation, CutWitness, DegenerateEdge> outcome;

  bool orientable() const { return std::holds_alternative<Orientation>(outcome); }
  const Orientation& orientation() const { return std::get<Orientation>(outcome); }
};

OrientResult orient(const Hypergraph& graph, const OrientationParams& p);

struct MinMaxIndegree {
  std::uint32_t k_star = 0;
  Orientation orientation;
};

// Smallest k admitting a (w,k)-orientation, by binary search between
// ceil(kappa(H)) and the maximum degree.
MinMaxIndegree min_max_indegree(const Hypergraph& graph, int h, int w);

// kappa(H_S) <= k for every nonempty S. Exhaustive over 2^n subsets.
bool hakimi_check(const Hypergraph& graph, const OrientationParams& p,
                  std::size_t cap = kDefaultBruteForceCap);

// "S: v1 v2 ..." then "kappa: a/b".
void write_witness(std::ostream& out, const CutWitness& witness);

}  // namespace hyperorient
