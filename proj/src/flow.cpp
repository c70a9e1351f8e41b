#include "hyperorient/flow.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <ostream>

#include <fmt/format.h>

namespace hyperorient {

std::int64_t FlowNetwork::source_capacity() const {
  std::int64_t total = 0;
  for (std::size_t i = 0; i < num_edges; ++i) total += arcs[i].capacity;
  return total;
}

std::int64_t FlowNetwork::sink_capacity() const {
  std::int64_t total = 0;
  for (std::size_t i = arcs.size() - num_vertices; i < arcs.size(); ++i) total += arcs[i].capacity;
  return total;
}

FlowNetwork build_network(const Hypergraph& graph, const OrientationParams& p) {
  graph.validate(p);
  FlowNetwork net;
  net.num_edges = graph.num_edges();
  net.num_vertices = graph.num_vertices();
  net.arcs.reserve(graph.num_edges() + graph.num_pins() + graph.num_vertices());
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    net.arcs.push_back({FlowNetwork::source, net.edge_node(e), p.demand_for_size(graph.edge_size(e))});
  }
  net.unit_offset.reserve(graph.num_edges() + 1);
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    net.unit_offset.push_back(net.arcs.size());
    for (VertexId v : graph.distinct_vertices(e)) net.arcs.push_back({net.edge_node(e), net.vertex_node(v), 1});
  }
  net.unit_offset.push_back(net.arcs.size());
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    net.arcs.push_back({net.vertex_node(v), FlowNetwork::sink, p.k});
  }
  return net;
}

namespace {

class Dinic {
 public:
  explicit Dinic(const FlowNetwork& net) : nodes_(net.num_nodes()) {
    const std::size_t a = net.arcs.size();
    head_.resize(2 * a);
    residual_.resize(2 * a);
    start_.assign(nodes_ + 1, 0);
    for (const auto& arc : net.arcs) {
      ++start_[arc.tail + 1];
      ++start_[arc.head + 1];
    }
    for (std::size_t u = 0; u < nodes_; ++u) start_[u + 1] += start_[u];
    order_.resize(2 * a);
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < a; ++i) {
      const auto& arc = net.arcs[i];
      head_[2 * i] = arc.head;
      residual_[2 * i] = arc.capacity;
      head_[2 * i + 1] = arc.tail;
      residual_[2 * i + 1] = 0;
      order_[fill[arc.tail]++] = 2 * i;
      order_[fill[arc.head]++] = 2 * i + 1;
    }
    level_.resize(nodes_);
    current_.resize(nodes_);
  }

  std::int64_t run(std::uint32_t s, std::uint32_t t) {
    std::int64_t total = 0;
    while (bfs(s, t)) total += blocking_flow(s, t);
    return total;
  }

  std::int64_t residual(std::size_t arc) const { return residual_[arc]; }

  std::vector<bool> reachable(std::uint32_t s) const {
    std::vector<bool> seen(nodes_, false);
    std::vector<std::uint32_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (std::size_t i = start_[u]; i < start_[u + 1]; ++i) {
        const auto arc = order_[i];
        if (residual_[arc] > 0 && !seen[head_[arc]]) {
          seen[head_[arc]] = true;
          stack.push_back(head_[arc]);
        }
      }
    }
    return seen;
  }

 private:
  bool bfs(std::uint32_t s, std::uint32_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<std::uint32_t> queue{s};
    level_[s] = 0;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const auto u = queue[q];
      for (std::size_t i = start_[u]; i < start_[u + 1]; ++i) {
        const auto arc = order_[i];
        if (residual_[arc] > 0 && level_[head_[arc]] < 0) {
          level_[head_[arc]] = level_[u] + 1;
          queue.push_back(head_[arc]);
        }
      }
    }
    return level_[t] >= 0;
  }

  std::int64_t blocking_flow(std::uint32_t s, std::uint32_t t) {
    for (std::size_t u = 0; u < nodes_; ++u) current_[u] = start_[u];
    std::int64_t total = 0;
    std::vector<std::size_t> path;
    std::uint32_t u = s;
    while (true) {
      if (u == t) {
        std::int64_t push = std::numeric_limits<std::int64_t>::max();
        for (auto arc : path) push = std::min(push, residual_[arc]);
        std::size_t cut = path.size();
        for (std::size_t i = 0; i < path.size(); ++i) {
          residual_[path[i]] -= push;
          residual_[path[i] ^ 1] += push;
          if (residual_[path[i]] == 0 && cut == path.size()) cut = i;
        }
        total += push;
        path.resize(cut);
        u = cut == 0 ? s : head_[path[cut - 1]];
        continue;
      }
      bool advanced = false;
      for (; current_[u] < start_[u + 1]; ++current_[u]) {
        const auto arc = order_[current_[u]];
        if (residual_[arc] > 0 && level_[head_[arc]] == level_[u] + 1) {
          path.push_back(arc);
          u = head_[arc];
          advanced = true;
          break;
        }
      }
      if (advanced) continue;
      level_[u] = -1;
      if (path.empty()) break;
      path.pop_back();
      u = path.empty() ? s : head_[path.back()];
      ++current_[u];
    }
    return total;
  }

  std::size_t nodes_;
  std::vector<std::uint32_t> head_;
  std::vector<std::int64_t> residual_;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
  std::vector<int> level_;
  std::vector<std::size_t> current_;
};

}  // namespace

MaxFlow max_flow(const FlowNetwork& net) {
  Dinic dinic(net);
  MaxFlow out;
  out.value = dinic.run(FlowNetwork::source, FlowNetwork::sink);
  out.flow.resize(net.arcs.size());
  for (std::size_t i = 0; i < net.arcs.size(); ++i) out.flow[i] = net.arcs[i].capacity - dinic.residual(2 * i);
  out.source_side = dinic.reachable(FlowNetwork::source);
  return out;
}

OrientResult orient(const Hypergraph& graph, const OrientationParams& p) {
  graph.validate(p);
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const int distinct = static_cast<int>(graph.distinct_vertices(e).size());
    const int demand = p.demand_for_size(graph.edge_size(e));
    if (distinct < demand) return {DegenerateEdge{e, distinct, demand}};
  }

  const auto net = build_network(graph, p);
  const auto result = max_flow(net);
  const std::int64_t demand = net.source_capacity();

  if (result.value == demand) {
    std::vector<std::vector<VertexId>> signs(graph.num_edges());
    for (EdgeId e = 0; e < graph.num_edges(); ++e) {
      for (std::size_t i = net.unit_offset[e]; i < net.unit_offset[e + 1]; ++i) {
        if (result.flow[i] > 0) signs[e].push_back(net.arcs[i].head - net.vertex_node(0));
      }
    }
    return {Orientation::from_signs(graph.num_vertices(), std::move(signs))};
  }

  CutWitness witness;
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    if (result.source_side[net.vertex_node(v)]) witness.subset.push_back(v);
  }
  witness.cut_capacity = result.value;
  witness.demand = demand;
  witness.kappa_S = witness.subset.empty()
                        ? Rational(0)
                        : w_density(w_induced_subgraph(graph, witness.subset, p), p);
  return {std::move(witness)};
}

MinMaxIndegree min_max_indegree(const Hypergraph& graph, int h, int w) {
  MinMaxIndegree out;
  if (graph.num_edges() == 0) {
    out.orientation = Orientation::from_signs(graph.num_vertices(), {});
    return out;
  }
  const OrientationParams base(h, w, 1);
  graph.validate(base);
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const auto distinct = static_cast<int>(graph.distinct_vertices(e).size());
    if (distinct < base.demand_for_size(graph.edge_size(e))) {
      throw InvalidInput(fmt::format("edge {} has {} distinct vertices but needs {} signs", e, distinct,
                                     base.demand_for_size(graph.edge_size(e))));
    }
  }

  const Rational kappa = w_density(graph, base);
  auto lo = static_cast<std::int64_t>((kappa.num() + kappa.den() - 1) / kappa.den());
  lo = std::max<std::int64_t>(lo, 1);
  auto hi = std::max<std::int64_t>(lo, graph.max_degree());
  auto best = orient(graph, OrientationParams(h, w, static_cast<int>(hi)));
  while (lo < hi) {
    const auto mid = lo + (hi - lo) / 2;
    auto attempt = orient(graph, OrientationParams(h, w, static_cast<int>(mid)));
    if (attempt.orientable()) {
      hi = mid;
      best = std::move(attempt);
    } else {
      lo = mid + 1;
    }
  }
  out.k_star = static_cast<std::uint32_t>(hi);
  out.orientation = best.orientation();
  return out;
}

bool hakimi_check(const Hypergraph& graph, const OrientationParams& p, std::size_t cap) {
  graph.validate(p);
  const std::size_t n = graph.num_vertices();
  if (n > cap || n > 63) throw SizeLimitExceeded(fmt::format("hakimi_check: n={} exceeds cap {}", n, cap));

  // Per-edge vertex masks with multiplicity, so |x & S| is a sum of popcounts.
  std::vector<std::vector<std::uint64_t>> layers(graph.num_edges());
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    auto& layer = layers[e];
    for (VertexId v : graph.edge(e)) {
      std::size_t i = 0;
      while (i < layer.size() && (layer[i] >> v & 1U)) ++i;
      if (i == layer.size()) layer.push_back(0);
      layer[i] |= std::uint64_t{1} << v;
    }
  }
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    std::int64_t demand = 0;
    for (const auto& layer : layers) {
      int inside = 0;
      for (auto bits : layer) inside += std::popcount(bits & mask);
      if (inside >= p.min_edge_size()) demand += p.demand_for_size(inside);
    }
    if (demand > static_cast<std::int64_t>(p.k) * std::popcount(mask)) return false;
  }
  return true;
}

void write_witness(std::ostream& out, const CutWitness& witness) {
  out << "S:";
  for (VertexId v : witness.subset) out << ' ' << v;
  out << "\nkappa: " << witness.kappa_S.str() << '\n';
}

}  // namespace hyperorient
