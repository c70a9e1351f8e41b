#include "hyperorient/random_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "hyperorient/poisson.hpp"

namespace hyperorient {

EdgeCountVector::EdgeCountVector(int h_, std::vector<std::int64_t> counts_)
    : h(h_), counts(std::move(counts_)) {
  if (static_cast<int>(counts.size()) >= h) {
    throw InvalidInput("edge count vector longer than h-1 entries");
  }
  for (auto c : counts) {
    if (c < 0) throw InvalidInput("negative edge count");
  }
}

std::int64_t EdgeCountVector::total_edges() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

std::int64_t EdgeCountVector::total_degree() const {
  std::int64_t d = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) d += (h - static_cast<int>(j)) * counts[j];
  return d;
}

double EdgeCountVector::average_degree(std::size_t n) const {
  return static_cast<double>(total_degree()) / static_cast<double>(n);
}

Hypergraph sample_uniform_multi(std::size_t n, std::size_t m, int h, Rng& rng) {
  if (n == 0) throw InvalidInput("sampling needs n >= 1");
  Hypergraph graph(n);
  std::vector<VertexId> pins(h);
  for (std::size_t e = 0; e < m; ++e) {
    for (auto& v : pins) v = static_cast<VertexId>(rng.uniform_below(n));
    graph.add_edge(pins);
  }
  return graph;
}

namespace {

double binomial(std::size_t n, int r) {
  if (r < 0 || static_cast<std::size_t>(r) > n) return 0.0;
  double out = 1.0;
  for (int i = 0; i < r; ++i) out = out * static_cast<double>(n - i) / (i + 1);
  return out;
}

bool is_simple(const Hypergraph& graph) {
  std::set<std::vector<VertexId>> seen;
  for (EdgeId e = 0; e < graph.num_edges(); ++e) {
    auto members = graph.distinct_vertices(e);
    if (static_cast<int>(members.size()) != graph.edge_size(e)) return false;
    if (!seen.insert(std::move(members)).second) return false;
  }
  return true;
}

}  // namespace

Hypergraph sample_uniform_simple(std::size_t n, std::size_t m, int h, Rng& rng,
                                 std::size_t max_attempts) {
  if (static_cast<double>(m) > binomial(n, h)) {
    throw InvalidInput(fmt::format("m={} exceeds C({}, {})", m, n, h));
  }
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    auto graph = sample_uniform_multi(n, m, h, rng);
    if (is_simple(graph)) return graph;
  }
  throw RetryBudgetExhausted(
      fmt::format("no simple hypergraph after {} attempts", max_attempts),
      1.0 / static_cast<double>(max_attempts));
}

Hypergraph sample_nonuniform_multi(std::size_t n, const EdgeCountVector& counts, Rng& rng) {
  if (n == 0) throw InvalidInput("sampling needs n >= 1");
  Hypergraph graph(n);
  std::vector<VertexId> pins;
  for (std::size_t j = 0; j < counts.counts.size(); ++j) {
    pins.resize(counts.h - j);
    for (std::int64_t e = 0; e < counts.counts[j]; ++e) {
      for (auto& v : pins) v = static_cast<VertexId>(rng.uniform_below(n));
      graph.add_edge(pins);
    }
  }
  return graph;
}

std::vector<std::uint32_t> sample_truncated_degree_sequence(std::size_t n, std::int64_t total_degree,
                                                            int k, Rng& rng,
                                                            std::int64_t max_rejections) {
  const auto floor_degree = static_cast<std::int64_t>(k + 1);
  if (n == 0) throw InvalidInput("degree sequence needs n >= 1");
  if (total_degree < floor_degree * static_cast<std::int64_t>(n)) {
    throw InvalidInput(fmt::format("D={} below (k+1)n={}", total_degree,
                                   floor_degree * static_cast<std::int64_t>(n)));
  }
  if (total_degree == floor_degree * static_cast<std::int64_t>(n)) {
    return std::vector<std::uint32_t>(n, static_cast<std::uint32_t>(k + 1));
  }
  if (max_rejections < 0) {
    max_rejections = 200 * static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(total_degree))));
  }

  const double mean = static_cast<double>(total_degree) / static_cast<double>(n);
  // Mean of Z_{(>=k+1)}(lambda) is lambda f_k / f_{k+1}.
  const double lambda = solve_lambda<double>(mean, k);
  const TruncatedPoissonSampler sampler(TruncatedPoisson(lambda, k + 1));

  std::vector<std::uint32_t> degrees(n);
  for (std::int64_t attempt = 1; attempt <= max_rejections; ++attempt) {
    std::int64_t sum = 0;
    for (auto& d : degrees) {
      d = static_cast<std::uint32_t>(sampler(rng));
      sum += d;
    }
    if (sum == total_degree) return degrees;
  }
  throw RetryBudgetExhausted(
      fmt::format("truncated multinomial: no hit in {} attempts (n={}, D={})", max_rejections, n,
                  total_degree),
      1.0 / static_cast<double>(max_rejections));
}

Hypergraph sample_core_model(std::size_t n, const EdgeCountVector& counts, int k, Rng& rng) {
  const std::int64_t total = counts.total_degree();
  auto degrees = sample_truncated_degree_sequence(n, total, k, rng);

  std::vector<VertexId> slots;
  slots.reserve(static_cast<std::size_t>(total));
  for (VertexId v = 0; v < n; ++v) slots.insert(slots.end(), degrees[v], v);
  rng.shuffle(std::span<VertexId>(slots));

  Hypergraph graph(n);
  std::size_t pos = 0;
  for (std::size_t j = 0; j < counts.counts.size(); ++j) {
    const std::size_t size = counts.h - j;
    for (std::int64_t e = 0; e < counts.counts[j]; ++e) {
      graph.add_edge(std::span<const VertexId>(slots.data() + pos, size));
      pos += size;
    }
  }
  return graph;
}

}  // namespace hyperorient
