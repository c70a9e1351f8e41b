#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperorient/hypergraph.hpp"
#include "hyperorient/peeling.hpp"

namespace hyperorient {

// Step size collapsed below the minimum before any boundary was reached.
class StiffnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// find_threshold could not find kappa on both sides of k.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tolerances for the Dormand-Prince integrator. atol, min_step and
// initial_step are relative to z_L(0), since the whole trajectory lives
// on that scale; event_tol is relative to each guard's initial value.
struct OdeControls {
  long double rtol = 1e-12L;
  long double atol = 1e-13L;
  long double initial_step = 0.1L;
  long double min_step = 1e-16L;
  long double event_tol = 1e-12L;
  std::size_t max_steps = 200000;

  OdeControls scaled(long double factor) const;
};

struct OdeParams {
  OrientationParams p;
  long double mu_bar = 0;
  OdeControls controls;
  // Also carry lambda as an integrated component (consistency checks only).
  bool integrate_lambda = false;
};

// Point of the system with the derived quantities filled in. Vectors are
// indexed by j = 0..w-1 for edge size h-j.
struct OdeState {
  long double x = 0;
  std::vector<long double> light;  // z_{L,h-j}
  std::vector<long double> heavy;  // z_{H,h-j}
  long double z_L = 0;
  long double z_B = 0;
  long double z_HV = 0;
  long double lambda = 0;             // algebraic
  long double lambda_integrated = 0;  // only with integrate_lambda
  long double z_A = 0;
  long double mu = 0;

  long double balls(int j) const { return light[j] + heavy[j]; }
};

// Derivative of every state quantity; light[0] and heavy[0] are the
// derivatives of the derived z_{L,h}, z_{H,h}.
struct OdeRates {
  bool in_domain = false;
  std::vector<long double> light;
  std::vector<long double> heavy;
  long double z_L = 0;
  long double z_B = 0;
  long double z_HV = 0;
  long double lambda = 0;  // from the lambda' equation at the state's lambda
  long double mu = 0;
};

OdeState initial_state(const OdeParams& params);

// Right-hand side. Outside {z_L > 0, z_B - z_L > 0, z_HV > 0, mu > k+1}
// returns in_domain = false instead of throwing.
OdeRates derivatives(const OdeState& state, const OdeParams& params);

enum class Termination : std::uint8_t {
  light_exhausted,   // z_L reached 0
  heavy_exhausted,   // z_B - z_L reached 0
  bins_exhausted,    // z_HV reached 0
  mu_floor,          // mu reached k+1
};

const char* to_string(Termination t);

struct CoreStats {
  long double x_star = 0;
  long double alpha = 0;
  std::vector<long double> beta;  // beta_{h-j}
  long double kappa = 0;
  long double mu_hat = 0;
  Termination terminated_by = Termination::light_exhausted;
  std::size_t steps = 0;

  bool core_found() const { return terminated_by == Termination::light_exhausted; }
  // kappa used by the threshold search: 0 unless z_L ran out.
  long double effective_kappa() const { return core_found() ? kappa : 0; }
};

// Accepted steps with cubic Hermite interpolation between them.
class Trajectory {
 public:
  Trajectory(OdeParams params) : params_(std::move(params)) {}

  void push(OdeState state, OdeRates rates);
  const std::vector<OdeState>& states() const { return states_; }
  const OdeParams& params() const { return params_; }
  long double end() const { return states_.empty() ? 0 : states_.back().x; }
  // Interpolated state; x is clamped to the integrated range.
  OdeState at(long double x) const;

  // Columns: x, z_L_{h-j}..., z_H_{h-j}..., z_L, z_B, z_HV, z_A, lambda, mu.
  void write_csv(std::ostream& out) const;

 private:
  OdeParams params_;
  std::vector<OdeState> states_;
  std::vector<OdeRates> rates_;
};

struct Integration {
  Trajectory trajectory;
  CoreStats stats;
};

Integration integrate(const OdeParams& params);

// Core statistics only, without keeping the trajectory.
CoreStats core_prediction(const OrientationParams& p, long double mu_bar,
                          const OdeControls& controls = {});

struct ThresholdResult {
  long double mu_tilde = 0;
  long double lower = 0;
  long double upper = 0;
  long double kappa_lower = 0;
  long double kappa_upper = 0;
  int iterations = 0;
  CoreStats stats_lower;
  CoreStats stats_upper;
  CoreStats stats_at_threshold;
  long double mu_hat() const { return stats_at_threshold.mu_hat; }
};

// Bisection on mu_bar for kappa(mu_bar) = k, seeded with [k, hk/w].
ThresholdResult find_threshold(const OrientationParams& p, long double tol,
                               const OdeControls& controls = {});

struct TraceDeviation {
  std::vector<std::string> names;
  std::vector<double> deviation;  // sup |trace - ode| / sup |ode|
  std::size_t samples = 0;

  double max() const;
};

// Compares trace rows with x inside the integrated range.
TraceDeviation trajectory_vs_trace(const Trajectory& trajectory, const ProcessTrace& trace);

}  // namespace hyperorient
