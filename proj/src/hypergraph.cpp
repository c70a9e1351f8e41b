#include "hyperorient/hypergraph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "hyperorient/peeling.hpp"

namespace hyperorient {

OrientationParams::OrientationParams(int h_, int w_, int k_) : h(h_), w(w_), k(k_) {
  if (!(h > w && w > 0)) throw InvalidInput(fmt::format("need h > w > 0, got h={} w={}", h, w));
  if (k < 1) throw InvalidInput(fmt::format("need k >= 1, got k={}", k));
}

Hypergraph::Hypergraph(std::size_t num_vertices, const std::vector<std::vector<VertexId>>& edges)
    : n_(num_vertices) {
  offsets_.reserve(edges.size() + 1);
  for (const auto& e : edges) add_edge(e);
}

EdgeId Hypergraph::add_edge(std::span<const VertexId> pins) {
  for (VertexId v : pins) {
    if (v >= n_) {
      throw InvalidInput(fmt::format("vertex {} out of range for n={}", v, n_));
    }
  }
  pins_.insert(pins_.end(), pins.begin(), pins.end());
  offsets_.push_back(pins_.size());
  return static_cast<EdgeId>(offsets_.size() - 2);
}

std::vector<VertexId> Hypergraph::distinct_vertices(EdgeId e) const {
  auto pins = edge(e);
  std::vector<VertexId> out(pins.begin(), pins.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::uint32_t> Hypergraph::degrees() const {
  std::vector<std::uint32_t> deg(n_, 0);
  for (VertexId v : pins_) ++deg[v];
  return deg;
}

std::uint32_t Hypergraph::max_degree() const {
  auto deg = degrees();
  return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

void Hypergraph::validate(const OrientationParams& p) const {
  for (EdgeId e = 0; e < num_edges(); ++e) {
    const int s = edge_size(e);
    if (s < p.min_edge_size() || s > p.h) {
      throw InvalidInput(fmt::format("edge {} has size {} outside [{}, {}]", e, s,
                                     p.min_edge_size(), p.h));
    }
  }
}

std::vector<std::int64_t> Hypergraph::edge_count_by_deficit(const OrientationParams& p) const {
  validate(p);
  std::vector<std::int64_t> counts(p.w, 0);
  for (EdgeId e = 0; e < num_edges(); ++e) ++counts[p.h - edge_size(e)];
  return counts;
}

std::int64_t Hypergraph::sign_demand(const OrientationParams& p) const {
  auto counts = edge_count_by_deficit(p);
  std::int64_t total = 0;
  for (int j = 0; j < p.w; ++j) total += (p.w - j) * counts[j];
  return total;
}

Orientation Orientation::from_signs(std::size_t num_vertices,
                                    std::vector<std::vector<VertexId>> signs) {
  Orientation o;
  o.indegree.assign(num_vertices, 0);
  for (auto& s : signs) {
    std::sort(s.begin(), s.end());
    for (VertexId v : s) {
      if (v >= num_vertices) throw InvalidInput(fmt::format("signed vertex {} out of range", v));
      ++o.indegree[v];
    }
  }
  o.signs = std::move(signs);
  return o;
}

std::uint32_t Orientation::max_indegree() const {
  return indegree.empty() ? 0 : *std::max_element(indegree.begin(), indegree.end());
}

Rational w_density(const Hypergraph& graph, const OrientationParams& p) {
  if (graph.num_vertices() == 0) throw std::domain_error("w-density of an empty vertex set");
  return {graph.sign_demand(p), static_cast<std::int64_t>(graph.num_vertices())};
}

namespace {

// rank[v] = position of v in S, or -1.
std::vector<std::int64_t> subset_ranks(std::size_t n, std::span<const VertexId> subset) {
  std::vector<std::int64_t> rank(n, -1);
  std::int64_t next = 0;
  for (VertexId v : subset) {
    if (v >= n) throw InvalidInput(fmt::format("subset vertex {} out of range for n={}", v, n));
    if (rank[v] < 0) rank[v] = next++;
  }
  return rank;
}

}  // namespace

Hypergraph w_induced_subgraph(const Hypergraph& graph, std::span<const VertexId> subset,
                              const OrientationParams& p) {
  auto rank = subset_ranks(graph.num_vertices(), subset);
  std::size_t size = 0;
  for (auto r : rank) size += r >= 0;
  Hypergraph out(size);
  std::vector<VertexId> kept;
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    kept.clear();
    for (VertexId v : graph.edge(e)) {
      if (rank[v] >= 0) kept.push_back(static_cast<VertexId>(rank[v]));
    }
    if (static_cast<int>(kept.size()) >= p.min_edge_size()) out.add_edge(kept);
  }
  return out;
}

SubsetStats subset_stats(const Hypergraph& graph, std::span<const VertexId> subset,
                         const OrientationParams& p) {
  graph.validate(p);
  auto rank = subset_ranks(graph.num_vertices(), subset);
  SubsetStats st;
  for (std::size_t v = 0; v < rank.size(); ++v) {
    if (rank[v] >= 0) st.subset.push_back(static_cast<VertexId>(v));
  }
  st.counts.resize(p.w);
  for (int j = 0; j < p.w; ++j) st.counts[j].assign(p.h - j + 1, 0);
  st.degree_by_deficit.assign(p.w, 0);

  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    const int size = graph.edge_size(e);
    const int j = p.h - size;
    int inside = 0;
    for (VertexId v : graph.edge(e)) inside += rank[v] >= 0;
    ++st.counts[j][inside];
    st.degree_by_deficit[j] += inside;
    st.degree_sum += inside;
    st.partially_contained += inside >= 2;
    st.intersecting += inside >= 1;
    st.straddling += inside >= 1 && inside <= size - 1;
  }

  std::int64_t surplus = 0;
  for (int j = 0; j < p.w; ++j) {
    const int demand = p.w - j;
    for (int i = demand + 1; i <= p.h - j; ++i) surplus += (i - demand) * st.counts[j][i];
  }
  st.expansion = st.degree_sum - surplus;
  return st;
}

VerifyReport verify_orientation(const Hypergraph& graph, const Orientation& orientation,
                                const OrientationParams& p) {
  graph.validate(p);
  if (orientation.signs.size() != graph.num_edges()) {
    throw InvalidInput(fmt::format("orientation covers {} edges, hypergraph has {}",
                                   orientation.signs.size(), graph.num_edges()));
  }
  if (orientation.indegree.size() != graph.num_vertices()) {
    throw InvalidInput(fmt::format("indegree vector has {} entries, hypergraph has {} vertices",
                                   orientation.indegree.size(), graph.num_vertices()));
  }

  std::vector<std::uint32_t> indegree(graph.num_vertices(), 0);
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    std::vector<VertexId> signs = orientation.signs[e];
    std::sort(signs.begin(), signs.end());
    const int demand = p.demand_for_size(graph.edge_size(e));
    if (std::adjacent_find(signs.begin(), signs.end()) != signs.end()) {
      return {false, fmt::format("edge {} signs a vertex twice", e)};
    }
    if (static_cast<int>(signs.size()) != demand) {
      return {false, fmt::format("edge {} has {} signs, needs {}", e, signs.size(), demand)};
    }
    auto members = graph.distinct_vertices(e);
    for (VertexId v : signs) {
      if (!std::binary_search(members.begin(), members.end(), v)) {
        return {false, fmt::format("edge {} signs vertex {} which it does not contain", e, v)};
      }
      ++indegree[v];
    }
  }
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    if (indegree[v] != orientation.indegree[v]) {
      return {false, fmt::format("vertex {} indegree recorded {} but signs give {}", v,
                                 orientation.indegree[v], indegree[v])};
    }
    if (static_cast<int>(indegree[v]) > p.k) {
      return {false, fmt::format("vertex {} has indegree {} > k={}", v, indegree[v], p.k)};
    }
  }
  return {};
}

bool check_property_T(const Hypergraph& graph, const OrientationParams& p) {
  auto peeled = rancore(graph, p);
  if (peeled.core.num_vertices() == 0) return true;
  return w_density(peeled.core, p) <= Rational(p.k);
}

std::vector<VertexId> subset_from_mask(std::uint64_t mask, std::size_t n) {
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < n; ++v) {
    if (mask >> v & 1U) out.push_back(static_cast<VertexId>(v));
  }
  return out;
}

bool check_property_A(const Hypergraph& graph, double gamma, const OrientationParams& p,
                      std::size_t cap) {
  const std::size_t n = graph.num_vertices();
  if (n > cap) {
    throw SizeLimitExceeded(fmt::format("property A is exhaustive; n={} exceeds cap {}", n, cap));
  }
  const double limit = gamma * static_cast<double>(n);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    const auto size = static_cast<std::int64_t>(std::popcount(mask));
    if (!(static_cast<double>(size) < limit)) continue;
    auto st = subset_stats(graph, subset_from_mask(mask, n), p);
    if (!(2 * p.w * st.partially_contained < p.k * size)) return false;
  }
  return true;
}

DeterministicConditions check_deterministic_conditions(const Hypergraph& graph,
                                                       std::span<const VertexId> subset,
                                                       const OrientationParams& p, double delta) {
  auto st = subset_stats(graph, subset, p);
  std::vector<bool> in(graph.num_vertices(), false);
  for (VertexId v : st.subset) in[v] = true;
  std::vector<VertexId> complement;
  for (VertexId v = 0; v < graph.num_vertices(); ++v) {
    if (!in[v]) complement.push_back(v);
  }
  auto comp = subset_stats(graph, complement, p);

  const std::int64_t s = static_cast<std::int64_t>(st.subset.size());
  const std::int64_t sc = static_cast<std::int64_t>(complement.size());
  DeterministicConditions out;
  out.complement_dense = p.w * comp.partially_contained > p.k * sc;
  out.few_touching = st.intersecting < p.k * s;
  out.inner_heavy = (p.h - p.w) * st.partially_contained > st.degree_sum - p.k * s;

  double weighted = 0.0;
  for (int j = 0; j < p.w; ++j) {
    weighted += static_cast<double>(p.w - j) / (p.h - j) * static_cast<double>(st.degree_by_deficit[j]);
  }
  out.straddle_premise = weighted >= (1.0 - delta) * p.k * static_cast<double>(s);
  out.few_straddling = static_cast<double>(st.straddling) <
                       static_cast<double>(p.h) * p.h * delta * p.k * static_cast<double>(s);
  return out;
}

bool expansion_condition(const Hypergraph& graph, std::span<const VertexId> subset,
                         const OrientationParams& p) {
  auto st = subset_stats(graph, subset, p);
  const std::int64_t n = static_cast<std::int64_t>(graph.num_vertices());
  const std::int64_t s = static_cast<std::int64_t>(st.subset.size());
  return st.expansion >= p.k * s + graph.sign_demand(p) - p.k * n;
}

double recommended_gamma(const OrientationParams& p) {
  return std::exp(-4.0) * std::pow(static_cast<double>(p.h), -6.0) / 4.0;
}

}  // namespace hyperorient
