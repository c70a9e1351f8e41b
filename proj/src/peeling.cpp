#include "hyperorient/peeling.hpp"

#include "hyperorient/flow.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

namespace hyperorient {

namespace {

// Vertex -> pin indices, grouped by vertex; pins of one vertex appear in
// increasing pin order, hence grouped by edge.
struct Incidence {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> pins;
  std::vector<EdgeId> pin_edge;

  explicit Incidence(const Hypergraph& g) {
    const std::size_t n = g.num_vertices();
    offsets.assign(n + 1, 0);
    pin_edge.resize(g.num_pins());
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      for (std::size_t i = g.pin_offset(e); i < g.pin_offset(e) + g.edge_size(e); ++i) {
        pin_edge[i] = e;
        ++offsets[g.pin(i) + 1];
      }
    }
    for (std::size_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];
    pins.resize(g.num_pins());
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t i = 0; i < g.num_pins(); ++i) pins[cursor[g.pin(i)]++] = i;
  }

  std::span<const std::size_t> of(VertexId v) const {
    return {pins.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
};

// Builds the canonical core from per-pin liveness.
void assemble_core(const Hypergraph& g, const std::vector<bool>& vertex_in_core,
                   const std::vector<bool>& edge_alive, const std::vector<bool>& pin_alive,
                   PeelResult& out) {
  std::vector<VertexId> relabel(g.num_vertices(), 0);
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (vertex_in_core[v]) {
      relabel[v] = static_cast<VertexId>(out.core_vertices.size());
      out.core_vertices.push_back(v);
    }
  }
  out.core = Hypergraph(out.core_vertices.size());
  out.edge_fate.assign(g.num_edges(), EdgeFate{});
  std::vector<VertexId> pins;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    if (!edge_alive[e]) continue;
    pins.clear();
    for (std::size_t i = g.pin_offset(e); i < g.pin_offset(e) + g.edge_size(e); ++i) {
      if (pin_alive[i]) pins.push_back(relabel[g.pin(i)]);
    }
    out.edge_fate[e] = {static_cast<EdgeId>(out.core_edges.size()), static_cast<int>(pins.size())};
    out.core_edges.push_back(e);
    out.core.add_edge(pins);
  }
}

}  // namespace

std::int64_t default_trace_stride(std::size_t n_bar) {
  return std::max<std::int64_t>(1, static_cast<std::int64_t>((n_bar + 999) / 1000));
}

PeelResult rancore(const Hypergraph& graph, const OrientationParams& p) {
  graph.validate(p);
  const std::size_t n = graph.num_vertices();
  const Incidence inc(graph);

  PeelResult out;
  out.source = std::make_shared<const Hypergraph>(graph);

  std::vector<std::int64_t> degree(n);
  for (VertexId v = 0; v < n; ++v) degree[v] = static_cast<std::int64_t>(inc.of(v).size());
  std::vector<int> size(graph.num_edges());
  for (EdgeId e = 0; e < graph.num_edges(); ++e) size[e] = graph.edge_size(e);
  std::vector<bool> edge_alive(graph.num_edges(), true);
  std::vector<bool> pin_alive(graph.num_pins(), true);
  std::vector<bool> removed(n, false);
  std::vector<bool> queued(n, false);

  std::deque<VertexId> queue;
  for (VertexId v = 0; v < n; ++v) {
    if (degree[v] <= p.k) {
      queue.push_back(v);
      queued[v] = true;
    }
  }

  std::vector<bool> flagged(graph.num_edges(), false);
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    removed[v] = true;
    PeeledVertex record{v, {}};

    auto pins = inc.of(v);
    for (std::size_t a = 0; a < pins.size();) {
      const EdgeId e = inc.pin_edge[pins[a]];
      std::size_t b = a;
      while (b < pins.size() && inc.pin_edge[pins[b]] == e) ++b;
      const int multiplicity = static_cast<int>(b - a);
      if (edge_alive[e]) {
        for (std::size_t t = a; t < b; ++t) pin_alive[pins[t]] = false;
        record.signed_edges.push_back(e);
        if (multiplicity > 1 && !flagged[e]) {
          flagged[e] = true;
          out.multiplicity_edges.push_back(e);
        }
        size[e] -= multiplicity;
        if (size[e] <= p.h - p.w) {
          edge_alive[e] = false;
          for (std::size_t i = graph.pin_offset(e); i < graph.pin_offset(e) + graph.edge_size(e); ++i) {
            if (!pin_alive[i]) continue;
            pin_alive[i] = false;
            const VertexId u = graph.pin(i);
            if (--degree[u] <= p.k && !queued[u]) {
              queued[u] = true;
              queue.push_back(u);
            }
          }
        }
      }
      a = b;
    }
    out.elimination.push_back(std::move(record));
  }

  std::vector<bool> in_core(n);
  for (VertexId v = 0; v < n; ++v) in_core[v] = !removed[v];
  assemble_core(graph, in_core, edge_alive, pin_alive, out);
  return out;
}

namespace {

// Ball-level state for the randomized process. A ball is a pin index.
class BallProcess {
 public:
  BallProcess(const Hypergraph& g, const OrientationParams& p)
      : g_(g), p_(p), inc_(g), degree_(g.num_vertices()), heavy_(g.num_vertices(), false),
        size_(g.num_edges()), edge_light_(g.num_edges(), 0), edge_alive_(g.num_edges(), true),
        pin_alive_(g.num_pins(), true), pool_pos_(g.num_pins(), kNone),
        balls_by_deficit_(p.w, 0), light_by_deficit_(p.w, 0) {
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      degree_[v] = static_cast<std::int64_t>(inc_.of(v).size());
      heavy_[v] = degree_[v] >= p.k + 1;
      if (heavy_[v]) {
        ++heavy_bins_;
        if (degree_[v] == p.k + 1) ++at_floor_;
      }
    }
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
      size_[e] = g.edge_size(e);
      balls_by_deficit_[deficit(e)] += size_[e];
      balls_ += size_[e];
    }
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      if (!heavy_[v]) make_light_balls(v);
    }
  }

  bool light_pool_empty() const { return pool_.empty(); }
  std::int64_t heavy_bins() const { return heavy_bins_; }

  // One step: remove a uniformly random light ball. Returns the step kind.
  StepKind step(Rng& rng, std::vector<std::vector<VertexId>>& signs) {
    const std::size_t ball = pool_[rng.uniform_below(pool_.size())];
    const EdgeId e = inc_.pin_edge[ball];
    const VertexId v = g_.pin(ball);
    auto& s = signs[e];
    if (std::find(s.begin(), s.end(), v) == s.end()) {
      s.push_back(v);
    } else {
      multiplicity_hit_.push_back(e);
    }

    if (size_[e] >= p_.h - p_.w + 2) {
      detach_edge(e);
      kill_light_ball(ball);
      --size_[e];
      attach_edge(e);
      return StepKind::recolour;
    }

    detach_edge(e);
    edge_alive_[e] = false;
    touched_.clear();
    for (std::size_t i = g_.pin_offset(e); i < g_.pin_offset(e) + g_.edge_size(e); ++i) {
      if (!pin_alive_[i]) continue;
      const VertexId u = g_.pin(i);
      if (pool_pos_[i] != kNone) {
        kill_light_ball(i);
      } else {
        pin_alive_[i] = false;
        --balls_;
        if (degree_[u] == p_.k + 1) --at_floor_;
        --degree_[u];
        if (degree_[u] == p_.k + 1) ++at_floor_;
        touched_.push_back(u);
      }
    }
    size_[e] = 0;
    edge_light_[e] = 0;
    for (VertexId u : touched_) {
      if (heavy_[u] && degree_[u] <= p_.k) {
        heavy_[u] = false;
        --heavy_bins_;
        make_light_balls(u);
      }
    }
    return StepKind::removal;
  }

  TraceRow snapshot(std::int64_t t, StepKind kind) const {
    TraceRow row;
    row.step = t;
    row.kind = kind;
    row.balls = balls_;
    row.balls_by_deficit = balls_by_deficit_;
    row.light = static_cast<std::int64_t>(pool_.size());
    row.light_by_deficit = light_by_deficit_;
    row.heavy_by_deficit.resize(p_.w);
    for (int j = 0; j < p_.w; ++j) row.heavy_by_deficit[j] = balls_by_deficit_[j] - light_by_deficit_[j];
    row.heavy_bins = heavy_bins_;
    row.heavy_bins_at_floor = at_floor_;
    return row;
  }

  const std::vector<bool>& edge_alive() const { return edge_alive_; }
  const std::vector<bool>& pin_alive() const { return pin_alive_; }
  const std::vector<bool>& heavy() const { return heavy_; }
  const std::vector<EdgeId>& multiplicity_hits() const { return multiplicity_hit_; }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  int deficit(EdgeId e) const { return p_.h - size_[e]; }

  // Remove / re-add the edge's balls from the per-size tallies.
  void detach_edge(EdgeId e) {
    balls_by_deficit_[deficit(e)] -= size_[e];
    light_by_deficit_[deficit(e)] -= edge_light_[e];
  }
  void attach_edge(EdgeId e) {
    balls_by_deficit_[deficit(e)] += size_[e];
    light_by_deficit_[deficit(e)] += edge_light_[e];
  }

  void kill_light_ball(std::size_t ball) {
    const std::size_t pos = pool_pos_[ball];
    pool_pos_[pool_.back()] = pos;
    pool_[pos] = pool_.back();
    pool_.pop_back();
    pool_pos_[ball] = kNone;
    pin_alive_[ball] = false;
    --balls_;
    --edge_light_[inc_.pin_edge[ball]];
    --degree_[g_.pin(ball)];
  }

  void make_light_balls(VertexId v) {
    for (std::size_t ball : inc_.of(v)) {
      if (!pin_alive_[ball]) continue;
      const EdgeId e = inc_.pin_edge[ball];
      pool_pos_[ball] = pool_.size();
      pool_.push_back(ball);
      ++edge_light_[e];
      ++light_by_deficit_[deficit(e)];
    }
  }

  const Hypergraph& g_;
  const OrientationParams& p_;
  Incidence inc_;
  std::vector<std::int64_t> degree_;
  std::vector<bool> heavy_;
  std::vector<int> size_;
  std::vector<int> edge_light_;
  std::vector<bool> edge_alive_;
  std::vector<bool> pin_alive_;
  std::vector<std::size_t> pool_;
  std::vector<std::size_t> pool_pos_;
  std::vector<std::int64_t> balls_by_deficit_;
  std::vector<std::int64_t> light_by_deficit_;
  std::int64_t balls_ = 0;
  std::int64_t heavy_bins_ = 0;
  std::int64_t at_floor_ = 0;
  std::vector<VertexId> touched_;
  std::vector<EdgeId> multiplicity_hit_;
};

}  // namespace

PeelResult rancore(const Hypergraph& graph, const OrientationParams& p, Rng& rng,
                   ProcessTrace* trace, std::int64_t stride) {
  graph.validate(p);
  PeelResult out;
  out.source = std::make_shared<const Hypergraph>(graph);
  BallProcess process(graph, p);

  if (trace != nullptr) {
    trace->params = p;
    trace->n_bar = graph.num_vertices();
    trace->stride = stride > 0 ? stride : default_trace_stride(graph.num_vertices());
    trace->rows.clear();
    trace->rows.push_back(process.snapshot(0, StepKind::start));
  }

  std::vector<std::vector<VertexId>> signs(graph.num_edges());
  bool tracing = trace != nullptr;
  std::int64_t t = 0;
  // The process proper stops when either side empties; peeling continues
  // past an exhausted heavy side so every surviving edge is fully signed.
  while (!process.light_pool_empty()) {
    if (tracing && process.heavy_bins() == 0) tracing = false;
    const StepKind kind = process.step(rng, signs);
    ++t;
    if (tracing && (t % trace->stride == 0 || process.light_pool_empty() || process.heavy_bins() == 0)) {
      trace->rows.push_back(process.snapshot(t, kind));
    }
  }

  // Peeled vertices in order of id; each lists the edges it was signed for.
  std::vector<std::vector<EdgeId>> by_vertex(graph.num_vertices());
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    for (VertexId v : signs[e]) by_vertex[v].push_back(e);
  }
  std::vector<bool> in_core(graph.num_vertices());
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    in_core[v] = process.heavy()[v];
    if (!in_core[v]) out.elimination.push_back({v, std::move(by_vertex[v])});
  }
  auto hits = process.multiplicity_hits();
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  out.multiplicity_edges = std::move(hits);

  assemble_core(graph, in_core, process.edge_alive(), process.pin_alive(), out);
  return out;
}

namespace {

// Adds signs to the given edges until each meets its demand; returns the
// number of signs that could not be placed.
std::int64_t fill_deficits(const Hypergraph& g, const std::vector<EdgeId>& edges, const OrientationParams& p,
                           std::vector<std::vector<VertexId>>& signs, std::vector<std::uint32_t>& indegree) {
  FlowNetwork net;
  net.num_edges = edges.size();
  net.num_vertices = g.num_vertices();
  std::int64_t missing = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const EdgeId e = edges[i];
    const int deficit = std::max(0, p.demand_for_size(g.edge_size(e)) - static_cast<int>(signs[e].size()));
    net.arcs.push_back({FlowNetwork::source, net.edge_node(static_cast<EdgeId>(i)), deficit});
    missing += deficit;
  }
  if (missing == 0) return 0;
  net.unit_offset.push_back(net.arcs.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const EdgeId e = edges[i];
    for (VertexId v : g.distinct_vertices(e)) {
      if (std::find(signs[e].begin(), signs[e].end(), v) == signs[e].end()) {
        net.arcs.push_back({net.edge_node(static_cast<EdgeId>(i)), net.vertex_node(v), 1});
      }
    }
    net.unit_offset.push_back(net.arcs.size());
  }
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (static_cast<int>(indegree[v]) < p.k) {
      net.arcs.push_back({net.vertex_node(v), FlowNetwork::sink, p.k - static_cast<std::int64_t>(indegree[v])});
    }
  }
  const auto flow = max_flow(net);
  if (flow.value < missing) return missing - flow.value;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const EdgeId e = edges[i];
    for (std::size_t a = net.unit_offset[i]; a < net.unit_offset[i + 1]; ++a) {
      if (flow.flow[a] > 0) {
        const VertexId v = static_cast<VertexId>(net.arcs[a].head - net.vertex_node(0));
        signs[e].push_back(v);
        ++indegree[v];
      }
    }
  }
  return 0;
}

}  // namespace

Orientation extend_orientation(const PeelResult& result, const Orientation& core_orientation,
                               const OrientationParams& p) {
  if (!result.source) throw InvalidInput("peel result has no source hypergraph");
  if (auto report = verify_orientation(result.core, core_orientation, p); !report) {
    throw InvalidInput("core orientation is invalid: " + report.first_violation);
  }
  const Hypergraph& g = *result.source;
  std::vector<std::vector<VertexId>> signs(g.num_edges());
  std::vector<std::uint32_t> indegree(g.num_vertices(), 0);
  for (const auto& peeled : result.elimination) {
    for (EdgeId e : peeled.signed_edges) {
      signs[e].push_back(peeled.vertex);
      ++indegree[peeled.vertex];
    }
  }
  for (EdgeId ce = 0; ce < result.core.num_edges(); ++ce) {
    const EdgeId e = result.core_edges[ce];
    for (VertexId cv : core_orientation.signs[ce]) {
      const VertexId v = result.core_vertices[cv];
      signs[e].push_back(v);
      ++indegree[v];
    }
  }

  // Sign deficits left by multi-pin removals are filled by a flow from the
  // short edges to unsigned members with spare capacity. If that falls short,
  // the peeled signs are dropped and every edge is completed around the core.
  std::int64_t shortfall = fill_deficits(g, result.multiplicity_edges, p, signs, indegree);
  if (shortfall > 0) {
    std::vector<EdgeId> all(g.num_edges());
    std::iota(all.begin(), all.end(), EdgeId{0});
    for (auto& s : signs) s.clear();
    std::fill(indegree.begin(), indegree.end(), 0);
    for (EdgeId ce = 0; ce < result.core.num_edges(); ++ce) {
      for (VertexId cv : core_orientation.signs[ce]) {
        const VertexId v = result.core_vertices[cv];
        signs[result.core_edges[ce]].push_back(v);
        ++indegree[v];
      }
    }
    shortfall = fill_deficits(g, all, p, signs, indegree);
    if (shortfall > 0) {
      throw ExtensionError(fmt::format(
          "core orientation cannot be extended: {} signs lack a member with spare capacity", shortfall));
    }
  }

  auto orientation = Orientation::from_signs(g.num_vertices(), std::move(signs));
  if (auto report = verify_orientation(g, orientation, p); !report) {
    throw ExtensionError("extended orientation failed verification: " + report.first_violation);
  }
  return orientation;
}

CoreSummary core_statistics(const PeelResult& result, const OrientationParams& p) {
  CoreSummary s;
  s.edges_by_deficit.assign(p.w, 0);
  if (result.core_empty()) return s;
  s.empty = false;
  s.num_vertices = result.core.num_vertices();
  s.edges_by_deficit = result.core.edge_count_by_deficit(p);
  s.kappa = w_density(result.core, p);
  s.mu_hat = static_cast<double>(result.core.num_pins()) / static_cast<double>(s.num_vertices);
  return s;
}

void write_trace_csv(std::ostream& out, const ProcessTrace& trace) {
  const int w = trace.params.w;
  const int h = trace.params.h;
  out << "x,z_L,z_B,z_HV,z_A";
  for (int j = 0; j < w; ++j) out << ",z_L_" << h - j;
  for (int j = 0; j < w; ++j) out << ",z_H_" << h - j;
  out << '\n';
  for (const auto& row : trace.rows) {
    out << fmt::format("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}", trace.scaled_time(row),
                       trace.scale(row.light), trace.scale(row.balls), trace.scale(row.heavy_bins),
                       trace.scale(row.heavy_bins_at_floor));
    for (int j = 0; j < w; ++j) out << fmt::format(",{:.9g}", trace.scale(row.light_by_deficit[j]));
    for (int j = 0; j < w; ++j) out << fmt::format(",{:.9g}", trace.scale(row.heavy_by_deficit[j]));
    out << '\n';
  }
}

}  // namespace hyperorient
