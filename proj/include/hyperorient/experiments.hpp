#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hyperorient/hypergraph.hpp"
#include "hyperorient/ode.hpp"
#include "hyperorient/rng.hpp"

namespace hyperorient {

inline constexpr int kSchemaVersion = 1;

// Runs fn(i) for i in [0, count) on `workers` threads (0 = hardware
// concurrency). fn must only write to slot i of its output.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn);

struct TrialRecord {
  std::size_t index = 0;
  RngSeed seed;
  std::size_t n = 0;
  std::size_t m = 0;
  double mu_bar = 0;
  std::size_t n_core = 0;
  std::vector<std::int64_t> m_core;  // core edges of size h-j
  Rational kappa;
  double mu_hat = 0;
  bool orientable = false;
  double wall_seconds = 0;
  // degree_histogram[d] = core vertices of degree d (only when requested).
  std::vector<std::int64_t> degree_histogram;
};

struct TrialOptions {
  bool orient = true;
  bool degree_histogram = false;
};

// m = round(mu_bar n / h) edges from M_{n,m,h}, peeled, core oriented by flow.
TrialRecord run_trial(const OrientationParams& p, std::size_t n, double mu_bar, RngSeed seed,
                      std::size_t index, const TrialOptions& options = {});

// Trial i uses stream i of `master_seed`; results are ordered by index.
std::vector<TrialRecord> run_trials(const OrientationParams& p, std::size_t n, double mu_bar,
                                    std::size_t trials, std::uint64_t master_seed, unsigned workers,
                                    const TrialOptions& options = {});

struct OrientabilityPoint {
  double mu_bar = 0;
  std::size_t orientable = 0;
  std::size_t trials = 0;
  double fraction() const { return trials == 0 ? 0.0 : static_cast<double>(orientable) / trials; }
  // 95% Wilson score half-width.
  double half_width() const;
};

struct SimulatedThreshold {
  std::vector<OrientabilityPoint> points;  // in evaluation order
  double estimate = 0;
  double lower = 0;  // bracket of the 50% crossing
  double upper = 0;
  std::vector<TrialRecord> records;
};

// Bisection on the 50% crossing of the orientable fraction.
SimulatedThreshold simulate_threshold_bisect(const OrientationParams& p, std::size_t n, std::size_t trials,
                                             double lower, double upper, double tol,
                                             std::uint64_t master_seed, unsigned workers);

// Orientable fraction over a grid; the crossing is linearly interpolated.
SimulatedThreshold simulate_threshold_grid(const OrientationParams& p, std::size_t n, std::size_t trials,
                                           const std::vector<double>& grid, std::uint64_t master_seed,
                                           unsigned workers);

struct ChiSquare {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
  std::size_t cells = 0;
};

struct CoreProfile {
  OrientationParams params;
  double mu_bar = 0;
  std::size_t n = 0;
  std::vector<TrialRecord> records;
  CoreStats prediction;
  double alpha = 0;              // mean n_core / n
  std::vector<double> beta;      // mean m_core[j] / n
  double kappa = 0;
  double mu_hat = 0;
  double alpha_deviation = 0;    // relative to the prediction
  double mu_hat_deviation = 0;
  double kappa_deviation = 0;
  ChiSquare degree_fit;
};

// Pooled chi-square of core degrees against Z_{(>=k+1)}(lambda_t), with
// lambda_t fitted to each trial's mean core degree.
ChiSquare core_degree_chi_square(const std::vector<TrialRecord>& records, int k);

CoreProfile core_profile(const OrientationParams& p, double mu_bar, std::size_t n, std::size_t trials,
                         std::uint64_t master_seed, unsigned workers);

struct Table1Row {
  int h = 0;
  int w = 0;
  int k = 0;
  double ref_mu_tilde = 0;
  double ref_mu_hat = 0;
  std::optional<ThresholdResult> result;
  std::string error;
};

// The four parameter triples with their published values.
std::vector<Table1Row> table1_rows();
std::vector<Table1Row> compute_table1(long double tol, const OdeControls& controls, unsigned workers);

enum class Format { csv, json };

void write_trials(std::ostream& out, const std::vector<TrialRecord>& records, const OrientationParams& p,
                  Format format, bool timing);
void write_threshold(std::ostream& out, const SimulatedThreshold& result, const OrientationParams& p,
                     std::size_t n, Format format);
void write_core_profile(std::ostream& out, const CoreProfile& profile, Format format);
void write_table1(std::ostream& out, const std::vector<Table1Row>& rows, Format format);
void write_ode_threshold(std::ostream& out, const OrientationParams& p, const ThresholdResult& result,
                         Format format);
void write_core_stats(std::ostream& out, const OrientationParams& p, long double mu_bar,
                      const CoreStats& stats, Format format);

}  // namespace hyperorient
