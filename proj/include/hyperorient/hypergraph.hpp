#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperorient/rational.hpp"

namespace hyperorient {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;

// Thrown when an instance does not satisfy a structural precondition
// (vertex out of range, edge size outside [h-w+1, h], index mismatch).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown by exhaustive routines when the instance exceeds the brute-force cap.
class SizeLimitExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Edge arity h, positive signs w per full-size edge, indegree cap k.
struct OrientationParams {
  int h = 2;
  int w = 1;
  int k = 1;

  OrientationParams() = default;
  OrientationParams(int h_, int w_, int k_);

  int min_edge_size() const { return h - w + 1; }
  // Signs still owed by an edge currently holding `size` balls.
  int demand_for_size(int size) const { return w - (h - size); }
};

// Multihypergraph on vertices 0..n-1. Edges are multisets stored in CSR
// form; a vertex may appear several times in one edge and every
// occurrence counts towards both the edge size and the vertex degree.
class Hypergraph {
 public:
  Hypergraph() = default;
  explicit Hypergraph(std::size_t num_vertices) : n_(num_vertices) {}
  Hypergraph(std::size_t num_vertices, const std::vector<std::vector<VertexId>>& edges);

  EdgeId add_edge(std::span<const VertexId> pins);
  EdgeId add_edge(std::initializer_list<VertexId> pins) {
    return add_edge(std::span<const VertexId>(pins.begin(), pins.size()));
  }

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return offsets_.size() - 1; }
  std::size_t num_pins() const { return pins_.size(); }

  std::span<const VertexId> edge(EdgeId e) const {
    return {pins_.data() + offsets_[e], offsets_[e + 1] - offsets_[e]};
  }
  int edge_size(EdgeId e) const { return static_cast<int>(offsets_[e + 1] - offsets_[e]); }
  // Index of the first pin of `e` in the flat pin array; pins of edge e
  // occupy [pin_offset(e), pin_offset(e + 1)).
  std::size_t pin_offset(EdgeId e) const { return offsets_[e]; }
  VertexId pin(std::size_t index) const { return pins_[index]; }

  // Distinct vertices of an edge, sorted.
  std::vector<VertexId> distinct_vertices(EdgeId e) const;

  // Degree counting multiplicity (configuration-model ball count).
  std::vector<std::uint32_t> degrees() const;
  std::uint32_t max_degree() const;

  // Throws InvalidInput unless every edge size lies in [h-w+1, h].
  void validate(const OrientationParams& p) const;

  // Number of edges of size h-j, indexed by j = 0..w-1.
  std::vector<std::int64_t> edge_count_by_deficit(const OrientationParams& p) const;

  // Total positive signs demanded: sum over edges of (w - j).
  std::int64_t sign_demand(const OrientationParams& p) const;

  bool operator==(const Hypergraph& other) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<VertexId> pins_;
};

// Per-edge sets of positively signed distinct vertices plus the induced
// indegree vector.
struct Orientation {
  std::vector<std::vector<VertexId>> signs;
  std::vector<std::uint32_t> indegree;

  static Orientation from_signs(std::size_t num_vertices, std::vector<std::vector<VertexId>> signs);
  std::uint32_t max_indegree() const;
};

struct VerifyReport {
  bool ok = true;
  std::string first_violation;
  explicit operator bool() const { return ok; }
};

struct SubsetStats {
  std::vector<VertexId> subset;
  std::int64_t degree_sum = 0;
  // counts[j][i]: edges of size h-j with exactly i pins (with multiplicity) in S.
  std::vector<std::vector<std::int64_t>> counts;
  std::int64_t partially_contained = 0;  // rho: |x & S| >= 2
  std::int64_t intersecting = 0;         // nu:  |x & S| >= 1
  std::int64_t straddling = 0;           // eta: 1 <= |x & S| <= |x| - 1
  std::vector<std::int64_t> degree_by_deficit;  // q_{h-j}
  std::int64_t expansion = 0;                   // d*(S)
};

struct DeterministicConditions {
  bool complement_dense = false;   // (i)   rho(S^c) > k|S^c|/w
  bool few_touching = false;       // (ii)  nu(S) < k|S|
  bool inner_heavy = false;        // (iii) (h-w) rho(S) > d(S) - k|S|
  bool straddle_premise = false;   // premise of (iv)
  bool few_straddling = false;     // (iv)  eta(S) < h^2 delta k|S|
};

// kappa(H) = sum_j (w-j) m_{h-j} / n, exact.
Rational w_density(const Hypergraph& graph, const OrientationParams& p);

// Edges x & S with |x & S| >= h-w+1, vertices relabelled by their rank in S.
Hypergraph w_induced_subgraph(const Hypergraph& graph, std::span<const VertexId> subset,
                              const OrientationParams& p);

SubsetStats subset_stats(const Hypergraph& graph, std::span<const VertexId> subset,
                         const OrientationParams& p);

VerifyReport verify_orientation(const Hypergraph& graph, const Orientation& orientation,
                                const OrientationParams& p);

// kappa(core) <= k, with an empty core counting as satisfied.
bool check_property_T(const Hypergraph& graph, const OrientationParams& p);

inline constexpr std::size_t kDefaultBruteForceCap = 20;

// Every nonempty S with |S| < gamma n has rho(S) < k|S|/(2w). Exhaustive.
bool check_property_A(const Hypergraph& graph, double gamma, const OrientationParams& p,
                      std::size_t cap = kDefaultBruteForceCap);

DeterministicConditions check_deterministic_conditions(const Hypergraph& graph,
                                                       std::span<const VertexId> subset,
                                                       const OrientationParams& p, double delta);

// d*(S) >= k|S| + sum_j (w-j) m_{h-j} - kn.
bool expansion_condition(const Hypergraph& graph, std::span<const VertexId> subset,
                         const OrientationParams& p);

// gamma = e^{-4} h^{-6} / 4.
double recommended_gamma(const OrientationParams& p);

// Sorted vertex list for the bits set in `mask`.
std::vector<VertexId> subset_from_mask(std::uint64_t mask, std::size_t n);

}  // namespace hyperorient
