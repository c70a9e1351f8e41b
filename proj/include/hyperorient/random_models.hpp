#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hyperorient/hypergraph.hpp"
#include "hyperorient/rng.hpp"

namespace hyperorient {

// A sampler ran out of rejection attempts.
class RetryBudgetExhausted : public std::runtime_error {
 public:
  RetryBudgetExhausted(const std::string& what, double acceptance_estimate)
      : std::runtime_error(what), acceptance_estimate_(acceptance_estimate) {}
  // Upper estimate of the per-attempt acceptance rate (1 / attempts made).
  double acceptance_estimate() const { return acceptance_estimate_; }

 private:
  double acceptance_estimate_;
};

// Edge counts by size for a non-uniform model: counts[j] = m_{h-j}.
struct EdgeCountVector {
  int h = 2;
  std::vector<std::int64_t> counts;

  EdgeCountVector(int h_, std::vector<std::int64_t> counts_);

  std::int64_t total_edges() const;
  // D = sum_j (h-j) m_{h-j}.
  std::int64_t total_degree() const;
  double average_degree(std::size_t n) const;
};

// M_{n,m,h}: every pin iid uniform over [n].
Hypergraph sample_uniform_multi(std::size_t n, std::size_t m, int h, Rng& rng);

// Uniform simple h-hypergraph by rejection from M_{n,m,h}: no repeated
// vertex inside an edge and no two equal edges.
Hypergraph sample_uniform_simple(std::size_t n, std::size_t m, int h, Rng& rng,
                                 std::size_t max_attempts = 10000);

// M_{n,m}: per-size counts honoured exactly; edges emitted largest size first.
Hypergraph sample_nonuniform_multi(std::size_t n, const EdgeCountVector& counts, Rng& rng);

// Multi(n, D, k+1): n iid truncated Poissons Z_{(>=k+1)} with mean D/n,
// conditioned on summing to D by rejection. Default budget 200 ceil(sqrt(D)).
std::vector<std::uint32_t> sample_truncated_degree_sequence(std::size_t n, std::int64_t total_degree,
                                                            int k, Rng& rng,
                                                            std::int64_t max_rejections = -1);

// M(n, m, k+1) via allocation-partition: degrees from the truncated
// multinomial, then a uniform shuffle of the ball slots cut into edges
// by size.
Hypergraph sample_core_model(std::size_t n, const EdgeCountVector& counts, int k, Rng& rng);

}  // namespace hyperorient
