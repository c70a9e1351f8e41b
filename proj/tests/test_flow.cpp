#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "hyperorient/flow.hpp"
#include "hyperorient/peeling.hpp"
#include "oracles.hpp"

using namespace hyperorient;

namespace {

bool expansion_everywhere(const Hypergraph& g, const OrientationParams& p) {
  const std::size_t n = g.num_vertices();
  // S is the sink side of a cut, so the empty set carries the whole-graph bound.
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (!expansion_condition(g, subset_from_mask(mask, n), p)) return false;
  }
  return true;
}

void expect_conservation(const FlowNetwork& net, const MaxFlow& f) {
  std::vector<std::int64_t> balance(net.num_nodes(), 0);
  for (std::size_t a = 0; a < net.arcs.size(); ++a) {
    EXPECT_GE(f.flow[a], 0);
    EXPECT_LE(f.flow[a], net.arcs[a].capacity);
    balance[net.arcs[a].tail] -= f.flow[a];
    balance[net.arcs[a].head] += f.flow[a];
  }
  EXPECT_EQ(balance[FlowNetwork::source], -f.value);
  EXPECT_EQ(balance[FlowNetwork::sink], f.value);
  for (std::size_t v = 2; v < net.num_nodes(); ++v) EXPECT_EQ(balance[v], 0);
}

}  // namespace

TEST(BuildNetwork, SingleEdge) {
  const auto net = build_network(Hypergraph(3, {{0, 1, 2}}), OrientationParams(3, 2, 1));
  EXPECT_EQ(net.num_nodes(), 6U);
  ASSERT_EQ(net.arcs.size(), 7U);
  EXPECT_EQ(net.arcs[0].tail, FlowNetwork::source);
  EXPECT_EQ(net.arcs[0].capacity, 2);
  for (int a = 1; a <= 3; ++a) EXPECT_EQ(net.arcs[a].capacity, 1);
  for (int a = 4; a <= 6; ++a) {
    EXPECT_EQ(net.arcs[a].head, FlowNetwork::sink);
    EXPECT_EQ(net.arcs[a].capacity, 1);
  }
  const auto f = max_flow(net);
  EXPECT_EQ(f.value, 2);
  expect_conservation(net, f);
}

TEST(BuildNetwork, ResidualEdgeDemand) {
  const auto net = build_network(Hypergraph(3, {{0, 1}}), OrientationParams(3, 2, 1));
  EXPECT_EQ(net.arcs[0].capacity, 1);
}

TEST(BuildNetwork, CountsOnRandomInstances) {
  Rng rng(RngSeed{31, 0});
  const OrientationParams p(4, 3, 2);
  for (int t = 0; t < 100; ++t) {
    const auto g = oracle::random_instance(rng, 3 + rng.uniform_below(20), rng.uniform_below(40), p, true);
    const auto net = build_network(g, p);
    std::size_t distinct = 0;
    for (EdgeId e = 0; e < g.num_edges(); ++e) distinct += oracle::distinct(g, e).size();
    EXPECT_EQ(net.num_nodes(), g.num_edges() + g.num_vertices() + 2);
    EXPECT_EQ(net.arcs.size(), distinct + g.num_edges() + g.num_vertices());
    EXPECT_EQ(net.source_capacity(), g.sign_demand(p));
    EXPECT_EQ(net.sink_capacity(), static_cast<std::int64_t>(p.k * g.num_vertices()));
    const auto f = max_flow(net);
    EXPECT_LE(f.value, std::min(net.source_capacity(), net.sink_capacity()));
    expect_conservation(net, f);
  }
}

TEST(MaxFlow, MatchesEdmondsKarp) {
  Rng rng(RngSeed{32, 0});
  for (int t = 0; t < 300; ++t) {
    const auto g = oracle::random_instance(rng, 2 + rng.uniform_below(12), rng.uniform_below(15),
                                           OrientationParams(3, 2, 1 + static_cast<int>(rng.uniform_below(3))), true);
    const OrientationParams p(3, 2, 1 + static_cast<int>(rng.uniform_below(3)));
    const auto net = build_network(g, p);
    ASSERT_LE(net.num_nodes(), 30U);
    std::vector<std::array<std::int64_t, 3>> arcs;
    for (const auto& a : net.arcs) arcs.push_back({a.tail, a.head, a.capacity});
    const auto f = max_flow(net);
    EXPECT_EQ(f.value, oracle::max_flow(net.num_nodes(), arcs, FlowNetwork::source, FlowNetwork::sink));
    expect_conservation(net, f);
  }
}

TEST(MaxFlow, InvariantUnderRelabelling) {
  Rng rng(RngSeed{33, 0});
  const OrientationParams p(3, 2, 2);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 5 + rng.uniform_below(30);
    const auto g = oracle::random_instance(rng, n, rng.uniform_below(2 * n), p, false);
    std::vector<VertexId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<VertexId>(perm));
    std::vector<EdgeId> order(g.num_edges());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<EdgeId>(order));
    Hypergraph relabelled(n);
    for (EdgeId e : order) {
      std::vector<VertexId> pins;
      for (VertexId v : g.edge(e)) pins.push_back(perm[v]);
      relabelled.add_edge(pins);
    }
    EXPECT_EQ(max_flow(build_network(g, p)).value, max_flow(build_network(relabelled, p)).value);
  }
}

TEST(Orient, Triangle) {
  const OrientationParams p(2, 1, 1);
  const Hypergraph g(3, {{0, 1}, {1, 2}, {2, 0}});
  const auto r = orient(g, p);
  ASSERT_TRUE(r.orientable());
  EXPECT_TRUE(verify_orientation(g, r.orientation(), p).ok);
}

TEST(Orient, DoubledTripleWitness) {
  const OrientationParams p(3, 2, 1);
  const Hypergraph g(3, {{0, 1, 2}, {0, 1, 2}});
  const auto r = orient(g, p);
  ASSERT_FALSE(r.orientable());
  const auto& cut = std::get<CutWitness>(r.outcome);
  EXPECT_EQ(cut.subset, (std::vector<VertexId>{0, 1, 2}));
  EXPECT_EQ(cut.kappa_S, Rational(4, 3));
  std::ostringstream out;
  write_witness(out, cut);
  EXPECT_EQ(out.str(), "S: 0 1 2\nkappa: 4/3\n");
}

TEST(Orient, DegenerateEdge) {
  const auto r = orient(Hypergraph(3, {{0, 1, 2}, {1, 1, 1}}), OrientationParams(3, 2, 5));
  ASSERT_TRUE(std::holds_alternative<DegenerateEdge>(r.outcome));
  const auto& d = std::get<DegenerateEdge>(r.outcome);
  EXPECT_EQ(d.edge, 1U);
  EXPECT_EQ(d.distinct, 1);
  EXPECT_EQ(d.demand, 2);
}

TEST(Orient, MatchesExhaustiveSearch) {
  Rng rng(RngSeed{34, 0});
  for (const auto& p : {OrientationParams(2, 1, 1), OrientationParams(3, 2, 1), OrientationParams(3, 2, 2),
                        OrientationParams(4, 2, 2), OrientationParams(4, 3, 2)}) {
    int yes = 0, no = 0;
    for (int t = 0; t < 150; ++t) {
      const std::size_t n = 4 + rng.uniform_below(5);
      const std::size_t m = rng.uniform_below(p.k * n / p.w + 4);
      const auto g = oracle::random_instance(rng, n, m, p, false);
      const auto r = orient(g, p);
      ASSERT_EQ(r.orientable(), oracle::orientable(g, p));
      if (r.orientable()) {
        ++yes;
        EXPECT_TRUE(verify_orientation(g, r.orientation(), p).ok);
      } else {
        ++no;
        const auto& cut = std::get<CutWitness>(r.outcome);
        EXPECT_GT(cut.kappa_S, Rational(p.k, 1));
        EXPECT_EQ(w_density(w_induced_subgraph(g, cut.subset, p), p), cut.kappa_S);
      }
    }
    EXPECT_GT(yes, 10);
    EXPECT_GT(no, 10);
  }
}

TEST(Orient, FlowHakimiExpansionAgree) {
  Rng rng(RngSeed{35, 0});
  for (const auto& p : {OrientationParams(2, 1, 1), OrientationParams(3, 2, 1), OrientationParams(3, 2, 2),
                        OrientationParams(4, 2, 3)}) {
    for (int t = 0; t < 500; ++t) {
      const std::size_t n = 4 + rng.uniform_below(9);
      const std::size_t m = rng.uniform_below(p.k * n / p.w + 3);
      const auto g = oracle::random_instance(rng, n, m, p, false);
      const bool flow = orient(g, p).orientable();
      EXPECT_EQ(flow, hakimi_check(g, p));
      EXPECT_EQ(flow, expansion_everywhere(g, p));
    }
  }
}

TEST(Orient, PeelingPreservesOrientability) {
  Rng rng(RngSeed{36, 0});
  const OrientationParams p(3, 2, 2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 10 + rng.uniform_below(60);
    const auto g = oracle::random_instance(rng, n, n + rng.uniform_below(n), p, false);
    EXPECT_EQ(orient(g, p).orientable(), orient(rancore(g, p).core, p).orientable());
  }
}

TEST(Orient, RepeatedPinsBreakTheDensityCriterion) {
  // Every subset passes the density test, but a must take all three signs.
  const OrientationParams p(3, 2, 2);
  const Hypergraph g(4, {{0, 1, 1}, {0, 2, 2}, {0, 3, 3}});
  EXPECT_TRUE(hakimi_check(g, p));
  EXPECT_TRUE(expansion_everywhere(g, p));
  EXPECT_FALSE(orient(g, p).orientable());
  EXPECT_FALSE(oracle::orientable(g, p));
}

TEST(MinMaxIndegree, Examples) {
  EXPECT_EQ(min_max_indegree(Hypergraph(4), 3, 2).k_star, 0U);
  const auto r = min_max_indegree(Hypergraph(3, {{0, 1, 2}, {0, 1, 2}}), 3, 2);
  EXPECT_EQ(r.k_star, 2U);
  EXPECT_EQ(r.orientation.max_indegree(), 2U);
  EXPECT_THROW(min_max_indegree(Hypergraph(3, {{1, 1, 1}}), 3, 2), InvalidInput);
}

TEST(MinMaxIndegree, MatchesBruteForce) {
  Rng rng(RngSeed{37, 0});
  for (const auto& [h, w] : {std::pair{2, 1}, std::pair{3, 2}, std::pair{4, 2}}) {
    for (int t = 0; t < 60; ++t) {
      const std::size_t n = 4 + rng.uniform_below(4);
      const auto g = oracle::random_instance(rng, n, rng.uniform_below(2 * n), OrientationParams(h, w, 1), false);
      const auto r = min_max_indegree(g, h, w);
      EXPECT_EQ(static_cast<int>(r.k_star), oracle::min_k(g, h, w));
      if (g.num_edges() > 0) {
        EXPECT_TRUE(verify_orientation(g, r.orientation, OrientationParams(h, w, static_cast<int>(r.k_star))).ok);
      }
    }
  }
}

TEST(Hakimi, WholeSetBound) {
  // m > kn/w is caught by S = V.
  const OrientationParams p(3, 2, 1);
  const Hypergraph g(4, {{0, 1, 2}, {1, 2, 3}, {0, 2, 3}});
  EXPECT_GT(w_density(g, p), Rational(1, 1));
  EXPECT_FALSE(hakimi_check(g, p));
}

TEST(Hakimi, SizeCap) {
  EXPECT_THROW(hakimi_check(Hypergraph(21), OrientationParams(3, 2, 1)), SizeLimitExceeded);
  EXPECT_TRUE(hakimi_check(Hypergraph(12), OrientationParams(3, 2, 1), 12));
}
