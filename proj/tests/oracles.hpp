#pragma once

// Brute-force reference implementations shared by the unit tests and the
// acceptance runner. None of them reuse library algorithms beyond the
// Hypergraph container.

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hyperorient/hypergraph.hpp"
#include "hyperorient/rng.hpp"

namespace oracle {

using hyperorient::EdgeId;
using hyperorient::Hypergraph;
using hyperorient::OrientationParams;
using hyperorient::Rng;
using hyperorient::VertexId;

inline std::vector<VertexId> distinct(const Hypergraph& g, EdgeId e) {
  std::vector<VertexId> v(g.edge(e).begin(), g.edge(e).end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// All r-subsets of `items`.
inline std::vector<std::vector<VertexId>> choose(const std::vector<VertexId>& items, int r) {
  std::vector<std::vector<VertexId>> out;
  if (r < 0 || r > static_cast<int>(items.size())) return out;
  std::vector<int> idx(r);
  for (int i = 0; i < r; ++i) idx[i] = i;
  while (true) {
    std::vector<VertexId> pick;
    for (int i : idx) pick.push_back(items[i]);
    out.push_back(pick);
    int i = r - 1;
    while (i >= 0 && idx[i] == static_cast<int>(items.size()) - r + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

// Backtracking over per-edge sign sets; returns the signs of some valid
// (w,k)-orientation, if any.
class SignSearch {
 public:
  SignSearch(const Hypergraph& g, const OrientationParams& p) : g_(g), p_(p), load_(g.num_vertices(), 0) {
    for (EdgeId e = 0; e < g.num_edges(); ++e) options_.push_back(choose(distinct(g, e), p.w - (p.h - g.edge_size(e))));
    chosen_.resize(g.num_edges());
  }

  std::optional<std::vector<std::vector<VertexId>>> run() {
    if (search(0)) return chosen_;
    return std::nullopt;
  }

 private:
  bool search(std::size_t e) {
    if (e == options_.size()) return true;
    for (const auto& pick : options_[e]) {
      bool ok = true;
      for (VertexId v : pick) ok = ok && load_[v] < p_.k;
      if (!ok) continue;
      for (VertexId v : pick) ++load_[v];
      chosen_[e] = pick;
      if (search(e + 1)) return true;
      for (VertexId v : pick) --load_[v];
    }
    return false;
  }

  const Hypergraph& g_;
  OrientationParams p_;
  std::vector<int> load_;
  std::vector<std::vector<std::vector<VertexId>>> options_;
  std::vector<std::vector<VertexId>> chosen_;
};

inline bool orientable(const Hypergraph& g, const OrientationParams& p) { return SignSearch(g, p).run().has_value(); }

// Smallest k admitting an orientation, by linear scan with the brute force.
inline int min_k(const Hypergraph& g, int h, int w) {
  if (g.num_edges() == 0) return 0;
  for (int k = 1;; ++k) {
    if (orientable(g, OrientationParams(h, w, k))) return k;
  }
}

// Edmonds-Karp on a dense capacity matrix.
inline std::int64_t max_flow(std::size_t nodes, const std::vector<std::array<std::int64_t, 3>>& arcs, std::size_t s,
                             std::size_t t) {
  std::vector<std::vector<std::int64_t>> cap(nodes, std::vector<std::int64_t>(nodes, 0));
  for (const auto& a : arcs) cap[a[0]][a[1]] += a[2];
  std::int64_t total = 0;
  while (true) {
    std::vector<long> parent(nodes, -1);
    parent[s] = static_cast<long>(s);
    std::deque<std::size_t> q{s};
    while (!q.empty() && parent[t] < 0) {
      const auto u = q.front();
      q.pop_front();
      for (std::size_t v = 0; v < nodes; ++v) {
        if (parent[v] < 0 && cap[u][v] > 0) {
          parent[v] = static_cast<long>(u);
          q.push_back(v);
        }
      }
    }
    if (parent[t] < 0) return total;
    std::int64_t push = std::numeric_limits<std::int64_t>::max();
    for (std::size_t v = t; v != s; v = static_cast<std::size_t>(parent[v])) push = std::min(push, cap[parent[v]][v]);
    for (std::size_t v = t; v != s; v = static_cast<std::size_t>(parent[v])) {
      cap[parent[v]][v] -= push;
      cap[v][parent[v]] += push;
    }
    total += push;
  }
}

// Induced edges on S (as a bitmask) with at least h-w+1 pins inside.
inline std::vector<std::vector<VertexId>> induced_edges(const Hypergraph& g, std::uint64_t mask, const OrientationParams& p) {
  std::vector<std::vector<VertexId>> out;
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    std::vector<VertexId> kept;
    for (VertexId v : g.edge(e)) {
      if (mask >> v & 1U) kept.push_back(v);
    }
    if (static_cast<int>(kept.size()) >= p.h - p.w + 1) out.push_back(kept);
  }
  return out;
}

// The (w,k+1)-core as the largest S whose induced subgraph has minimum
// degree >= k+1 (the union of all such S is again such a set).
inline std::uint64_t core_mask(const Hypergraph& g, const OrientationParams& p) {
  const std::size_t n = g.num_vertices();
  std::uint64_t best = 0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<int> deg(n, 0);
    for (const auto& e : induced_edges(g, mask, p)) {
      for (VertexId v : e) ++deg[v];
    }
    bool ok = true;
    for (std::size_t v = 0; v < n && ok; ++v) {
      if (mask >> v & 1U) ok = deg[v] >= p.k + 1;
    }
    if (ok) best |= mask;
  }
  return best;
}

// Random hypergraph with edge sizes in [h-w+1, h]; distinct vertices per
// edge unless `repeats` is set.
inline Hypergraph random_instance(Rng& rng, std::size_t n, std::size_t m, const OrientationParams& p, bool repeats) {
  Hypergraph g(n);
  for (std::size_t e = 0; e < m; ++e) {
    const int size = p.h - static_cast<int>(rng.uniform_below(p.w));
    std::vector<VertexId> pins;
    if (repeats) {
      for (int i = 0; i < size; ++i) pins.push_back(static_cast<VertexId>(rng.uniform_below(n)));
    } else {
      std::vector<VertexId> all(n);
      for (std::size_t v = 0; v < n; ++v) all[v] = static_cast<VertexId>(v);
      rng.shuffle(std::span<VertexId>(all));
      pins.assign(all.begin(), all.begin() + size);
    }
    g.add_edge(pins);
  }
  return g;
}

}  // namespace oracle
