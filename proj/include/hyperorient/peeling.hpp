#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hyperorient/hypergraph.hpp"
#include "hyperorient/rational.hpp"
#include "hyperorient/rng.hpp"

namespace hyperorient {

// A core orientation could not be extended to the original hypergraph.
// Only possible when a peeled vertex occurred several times in one edge.
class ExtensionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PeeledVertex {
  VertexId vertex;
  std::vector<EdgeId> signed_edges;
};

struct EdgeFate {
  std::optional<EdgeId> core_edge;  // empty once the edge was removed
  int residual_size = 0;
};

// Result of peeling to the (w,k+1)-core. Core vertices and edges are
// relabelled in increasing order of their original ids, so both peeling
// modes produce identical `core` values.
struct PeelResult {
  std::shared_ptr<const Hypergraph> source;
  Hypergraph core;
  std::vector<VertexId> core_vertices;  // core id -> original id
  std::vector<EdgeId> core_edges;       // core edge -> original edge
  std::vector<PeeledVertex> elimination;
  std::vector<EdgeFate> edge_fate;      // indexed by original edge
  // Edges from which some peeled vertex removed two or more pins at once.
  std::vector<EdgeId> multiplicity_edges;

  bool core_empty() const { return core.num_vertices() == 0; }
};

enum class StepKind : std::uint8_t { start, recolour, removal };

struct TraceRow {
  std::int64_t step = 0;
  StepKind kind = StepKind::start;
  std::int64_t balls = 0;                       // B_t
  std::vector<std::int64_t> balls_by_deficit;   // B_{t,h-j}
  std::int64_t light = 0;                       // L_t
  std::vector<std::int64_t> light_by_deficit;   // L_{t,h-j}
  std::vector<std::int64_t> heavy_by_deficit;   // H_{t,h-j}
  std::int64_t heavy_bins = 0;                  // HV_t
  std::int64_t heavy_bins_at_floor = 0;         // A_{t,k+1}
};

// Sampled per-step state of the ball-level peeling process.
struct ProcessTrace {
  OrientationParams params;
  std::size_t n_bar = 0;
  std::int64_t stride = 1;
  std::vector<TraceRow> rows;

  double scaled_time(const TraceRow& row) const {
    return static_cast<double>(row.step) / static_cast<double>(n_bar);
  }
  double scale(std::int64_t value) const {
    return static_cast<double>(value) / static_cast<double>(n_bar);
  }
};

// Default trace stride: every ceil(n_bar / 1000)-th step.
std::int64_t default_trace_stride(std::size_t n_bar);

// Deterministic peeling: FIFO queue of light vertices, each removed with
// all its incidences at once. Linear in the number of pins.
PeelResult rancore(const Hypergraph& graph, const OrientationParams& p);

// Ball-level randomized peeling: one uniformly random light ball per step.
// Heavy bins falling to degree <= k join the light pool with all their
// balls. When `trace` is given, rows are recorded every `stride` steps
// (0 selects default_trace_stride) until the light pool or the heavy bins
// run out.
PeelResult rancore(const Hypergraph& graph, const OrientationParams& p, Rng& rng,
                   ProcessTrace* trace = nullptr, std::int64_t stride = 0);

// Merge recorded peel signs with a valid orientation of `result.core`.
// Sign deficits from repeated pins are filled by flow, first on the short
// edges alone, then on every edge around the fixed core signs; throws
// ExtensionError if both fall short.
Orientation extend_orientation(const PeelResult& result, const Orientation& core_orientation,
                               const OrientationParams& p);

struct CoreSummary {
  std::size_t num_vertices = 0;
  std::vector<std::int64_t> edges_by_deficit;  // m_{h-j}
  Rational kappa;
  double mu_hat = 0.0;
  bool empty = true;
};

CoreSummary core_statistics(const PeelResult& result, const OrientationParams& p);

// CSV with columns x, z_L, z_B, z_HV, z_A, z_L_{h-j}..., z_H_{h-j}... (j = 0..w-1).
void write_trace_csv(std::ostream& out, const ProcessTrace& trace);

}  // namespace hyperorient
