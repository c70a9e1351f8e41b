#include "hyperorient/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "hyperorient/poisson.hpp"

namespace hyperorient {

using Real = long double;
using Vec = std::vector<Real>;

OdeControls OdeControls::scaled(long double factor) const {
  OdeControls c = *this;
  c.rtol *= factor;
  c.atol *= factor;
  c.event_tol *= factor;
  return c;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::light_exhausted: return "light_exhausted";
    case Termination::heavy_exhausted: return "heavy_exhausted";
    case Termination::bins_exhausted: return "bins_exhausted";
    case Termination::mu_floor: return "mu_floor";
  }
  return "unknown";
}

namespace {

// Packed layout: z_{L,h-j} (j=1..w-1), z_{H,h-j} (j=1..w-1), z_L, z_B, z_HV
// and, optionally, the integrated lambda.
struct Layout {
  int w;
  bool with_lambda;
  std::size_t light(int j) const { return static_cast<std::size_t>(j - 1); }
  std::size_t heavy(int j) const { return static_cast<std::size_t>(w - 1 + j - 1); }
  std::size_t z_L() const { return static_cast<std::size_t>(2 * (w - 1)); }
  std::size_t z_B() const { return z_L() + 1; }
  std::size_t z_HV() const { return z_L() + 2; }
  std::size_t lambda() const { return z_L() + 3; }
  std::size_t size() const { return z_L() + 3 + (with_lambda ? 1 : 0); }
};

Layout layout_of(const OdeParams& params) { return {params.p.w, params.integrate_lambda}; }

// Fills light[0], heavy[0], mu, lambda, z_A from the primary quantities.
// False when lambda is undefined there.
bool complete(OdeState& s, const OdeParams& params) {
  const int w = params.p.w;
  const int k = params.p.k;
  s.light.resize(w);
  s.heavy.resize(w);
  Real light_rest = 0;
  Real heavy_rest = 0;
  for (int j = 1; j < w; ++j) {
    light_rest += s.light[j];
    heavy_rest += s.heavy[j];
  }
  s.light[0] = s.z_L - light_rest;
  s.heavy[0] = s.z_B - s.z_L - heavy_rest;
  if (!(s.z_L > 0 && s.z_B - s.z_L > 0 && s.z_HV > 0)) return false;
  s.mu = (s.z_B - s.z_L) / s.z_HV;
  if (!(s.mu > k + 1) || !std::isfinite(s.mu)) return false;
  s.lambda = solve_lambda<Real>(s.mu, k);
  s.z_A = heavy_bucket_fraction<Real>(s.lambda, k) * s.z_HV;
  return true;
}

OdeState unpack(Real x, const Vec& y, const OdeParams& params, bool& ok) {
  const Layout lay = layout_of(params);
  OdeState s;
  s.x = x;
  s.light.assign(lay.w, 0);
  s.heavy.assign(lay.w, 0);
  for (int j = 1; j < lay.w; ++j) {
    s.light[j] = y[lay.light(j)];
    s.heavy[j] = y[lay.heavy(j)];
  }
  s.z_L = y[lay.z_L()];
  s.z_B = y[lay.z_B()];
  s.z_HV = y[lay.z_HV()];
  if (lay.with_lambda) s.lambda_integrated = y[lay.lambda()];
  ok = complete(s, params);
  return s;
}

Vec pack(const OdeRates& r, const OdeParams& params) {
  const Layout lay = layout_of(params);
  Vec dy(lay.size());
  for (int j = 1; j < lay.w; ++j) {
    dy[lay.light(j)] = r.light[j];
    dy[lay.heavy(j)] = r.heavy[j];
  }
  dy[lay.z_L()] = r.z_L;
  dy[lay.z_B()] = r.z_B;
  dy[lay.z_HV()] = r.z_HV;
  if (lay.with_lambda) dy[lay.lambda()] = r.lambda;
  return dy;
}

Vec pack(const OdeState& s, const OdeParams& params) {
  const Layout lay = layout_of(params);
  Vec y(lay.size());
  for (int j = 1; j < lay.w; ++j) {
    y[lay.light(j)] = s.light[j];
    y[lay.heavy(j)] = s.heavy[j];
  }
  y[lay.z_L()] = s.z_L;
  y[lay.z_B()] = s.z_B;
  y[lay.z_HV()] = s.z_HV;
  if (lay.with_lambda) y[lay.lambda()] = s.lambda_integrated;
  return y;
}

// a/b with the value 0 where both vanish.
Real ratio(Real a, Real b) { return b == 0 ? 0 : a / b; }

// (a / z_L)(a / b) continued to the closure of the domain.
Real f_star(Real a, Real b, Real z_L) {
  if (a == 0 && b == 0) return 0;
  if (a > b && b >= 0) return b / z_L;
  return (std::abs(a) / z_L) * (std::abs(a) / std::abs(b));
}

// Rates at a completed in-domain state.
OdeRates rates_at(const OdeState& s, const OdeParams& params) {
  const int h = params.p.h;
  const int w = params.p.w;
  const int k = params.p.k;
  OdeRates r;
  r.in_domain = true;
  r.light.assign(w, 0);
  r.heavy.assign(w, 0);

  const Real heavy_balls = s.z_B - s.z_L;
  const int last = w - 1;
  const Real last_share = s.light[last] / s.z_L;
  const Real last_heavy = ratio(s.heavy[last], s.balls(last));
  const Real promote = (k + 1) * s.z_A / heavy_balls;
  // Rate at which heavy bins turn light.
  const Real bins_lost = last_share * (h - w) * last_heavy * promote;

  Real light_rest = 0;
  Real heavy_rest = 0;
  for (int j = 1; j < w; ++j) {
    const Real migrate = bins_lost * k * s.heavy[j] / heavy_balls;
    r.light[j] = -s.light[j] / s.z_L - (h - j - 1) * f_star(s.light[j], s.balls(j), s.z_L) + migrate +
                 (h - j) * f_star(s.light[j - 1], s.balls(j - 1), s.z_L);
    r.heavy[j] = -(s.light[j] / s.z_L) * (h - j - 1) * ratio(s.heavy[j], s.balls(j)) - migrate +
                 (s.light[j - 1] / s.z_L) * (h - j) * ratio(s.heavy[j - 1], s.balls(j - 1));
    light_rest += r.light[j];
    heavy_rest += r.heavy[j];
  }
  r.z_L = -1 - (h - w) * f_star(s.light[last], s.balls(last), s.z_L) +
          (h - w) * k * last_share * last_heavy * promote;
  r.z_B = -1 - (h - w) * last_share;
  r.z_HV = -bins_lost;
  r.light[0] = r.z_L - light_rest;
  r.heavy[0] = r.z_B - r.z_L - heavy_rest;
  r.mu = ((r.z_B - r.z_L) * s.z_HV - heavy_balls * r.z_HV) / (s.z_HV * s.z_HV);

  const Real lam = params.integrate_lambda ? s.lambda_integrated : s.lambda;
  const Real denom = f_k<Real>(k, lam) + lam * poisson_pmf<Real>(k - 1, lam) - s.mu * poisson_pmf<Real>(k, lam);
  r.lambda = r.mu * f_k<Real>(k + 1, lam) / denom;
  return r;
}

constexpr int kGuards = 4;

std::array<Real, kGuards> guards(const OdeState& s, int k) {
  return {s.z_L, s.z_B - s.z_L, s.z_HV, s.mu - (k + 1)};
}

std::array<Real, kGuards> guard_rates(const OdeRates& r) {
  return {r.z_L, r.z_B - r.z_L, r.z_HV, r.mu};
}

CoreStats stats_from(const OdeState& s, const OdeParams& params, Termination how, std::size_t steps) {
  const int h = params.p.h;
  const int w = params.p.w;
  CoreStats c;
  c.x_star = s.x;
  c.alpha = s.z_HV;
  c.terminated_by = how;
  c.steps = steps;
  c.beta.resize(w);
  Real signs = 0;
  Real degree = 0;
  for (int j = 0; j < w; ++j) {
    c.beta[j] = s.heavy[j] / (h - j);
    signs += (w - j) * c.beta[j];
    degree += (h - j) * c.beta[j];
  }
  if (c.alpha > 0) {
    c.kappa = signs / c.alpha;
    c.mu_hat = degree / c.alpha;
  }
  return c;
}

// Dormand-Prince 5(4) tableau.
constexpr std::array<Real, 7> kC{0, 1.0L / 5, 3.0L / 10, 4.0L / 5, 8.0L / 9, 1, 1};
constexpr Real kA[7][6] = {
    {},
    {1.0L / 5},
    {3.0L / 40, 9.0L / 40},
    {44.0L / 45, -56.0L / 15, 32.0L / 9},
    {19372.0L / 6561, -25360.0L / 2187, 64448.0L / 6561, -212.0L / 729},
    {9017.0L / 3168, -355.0L / 33, 46732.0L / 5247, 49.0L / 176, -5103.0L / 18656},
    {35.0L / 384, 0, 500.0L / 1113, 125.0L / 192, -2187.0L / 6784, 11.0L / 84},
};
constexpr std::array<Real, 7> kE{71.0L / 57600,     0,          -71.0L / 16695, 71.0L / 1920,
                                 -17253.0L / 339200, 22.0L / 525, -1.0L / 40};

class Integrator {
 public:
  explicit Integrator(const OdeParams& params, Trajectory* trajectory)
      : params_(params), trajectory_(trajectory) {}

  CoreStats run() {
    const auto& ctl = params_.controls;
    const int k = params_.p.k;
    OdeState state = initial_state(params_);
    bool ok = complete(state, params_);
    auto g = guards(state, k);
    if (!ok || !std::all_of(g.begin(), g.end(), [](Real v) { return v > 0; })) {
      return stats_from(state, params_, first_nonpositive(g), 0);
    }
    OdeRates rates = rates_at(state, params_);
    record(state, rates);

    const Real scale = state.z_L;
    const Real atol = ctl.atol * scale;
    const Real min_step = ctl.min_step * scale;
    const auto g0 = g;
    Real step = ctl.initial_step * scale;
    Vec y = pack(state, params_);
    Vec f = pack(rates, params_);
    const std::size_t dim = y.size();
    std::array<Vec, 7> stage;
    Vec trial(dim);
    std::size_t steps = 0;

    while (true) {
      g = guards(state, k);
      const auto gr = guard_rates(rates);
      for (int i = 0; i < kGuards; ++i) {
        if (g[i] < ctl.event_tol * g0[i]) return finish(state, rates, static_cast<Termination>(i), steps);
      }
      for (int i = 0; i < kGuards; ++i) {
        if (gr[i] < 0) step = std::min(step, Real{0.5} * g[i] / -gr[i]);
      }
      if (step < min_step) {
        throw StiffnessError(fmt::format("step {:.3e} below minimum at x={:.6e}, z_L={:.6e}, z_B={:.6e}, z_HV={:.6e}",
                                         static_cast<double>(step), static_cast<double>(state.x),
                                         static_cast<double>(state.z_L), static_cast<double>(state.z_B),
                                         static_cast<double>(state.z_HV)));
      }
      if (steps >= ctl.max_steps) throw StiffnessError(fmt::format("exceeded {} steps", ctl.max_steps));

      // Stages; any stage outside the domain shrinks the step.
      stage[0] = f;
      bool inside = true;
      OdeState stage_state;
      OdeRates stage_rates;
      for (int s = 1; s < 7 && inside; ++s) {
        for (std::size_t i = 0; i < dim; ++i) {
          Real acc = 0;
          for (int r = 0; r < s; ++r) acc += kA[s][r] * stage[r][i];
          trial[i] = y[i] + step * acc;
        }
        stage_state = unpack(state.x + kC[s] * step, trial, params_, inside);
        if (!inside) break;
        stage_rates = rates_at(stage_state, params_);
        stage[s] = pack(stage_rates, params_);
      }
      if (!inside) {
        step *= Real{0.25};
        continue;
      }

      // trial holds the 5th-order solution (last stage row equals the weights).
      Real err = 0;
      for (std::size_t i = 0; i < dim; ++i) {
        Real e = 0;
        for (int s = 0; s < 7; ++s) e += kE[s] * stage[s][i];
        e *= step;
        const Real sc = atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(trial[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / static_cast<Real>(dim));
      const Real factor = err == 0 ? Real{5} : std::clamp(Real{0.9} * std::pow(err, Real{-0.2}), Real{0.2}, Real{5});
      if (err > 1) {
        step *= std::min(factor, Real{0.9});
        continue;
      }
      ++steps;
      y = trial;
      f = stage[6];
      state = stage_state;
      rates = stage_rates;
      record(state, rates);
      step *= factor;
    }
  }

 private:
  static Termination first_nonpositive(const std::array<Real, kGuards>& g) {
    for (int i = 0; i < kGuards; ++i) {
      if (!(g[i] > 0)) return static_cast<Termination>(i);
    }
    return Termination::light_exhausted;
  }

  // Linear extrapolation from a point within event_tol of the boundary.
  CoreStats finish(const OdeState& state, const OdeRates& rates, Termination how, std::size_t steps) {
    const auto g = guards(state, params_.p.k)[static_cast<int>(how)];
    const auto gr = guard_rates(rates)[static_cast<int>(how)];
    const Real dx = gr < 0 ? g / -gr : 0;
    Vec y = pack(state, params_);
    const Vec f = pack(rates, params_);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += dx * f[i];
    bool ok = false;
    OdeState end = unpack(state.x + dx, y, params_, ok);
    if (ok && dx > 0) record(end, rates_at(end, params_));
    return stats_from(end, params_, how, steps);
  }

  void record(const OdeState& s, const OdeRates& r) {
    if (trajectory_ != nullptr) trajectory_->push(s, r);
  }

  const OdeParams& params_;
  Trajectory* trajectory_;
};

}  // namespace

OdeState initial_state(const OdeParams& params) {
  if (!(params.mu_bar > 0)) throw InvalidInput("mu_bar must be positive");
  const auto ic = initial_conditions<Real>(params.mu_bar, params.p.k);
  OdeState s;
  s.light.assign(params.p.w, 0);
  s.heavy.assign(params.p.w, 0);
  s.z_L = ic.light_balls;
  s.z_B = ic.balls;
  s.z_HV = ic.heavy_bins;
  s.lambda_integrated = ic.lambda;
  complete(s, params);
  return s;
}

OdeRates derivatives(const OdeState& state, const OdeParams& params) {
  OdeState s = state;
  if (!complete(s, params)) return {};
  return rates_at(s, params);
}

void Trajectory::push(OdeState state, OdeRates rates) {
  states_.push_back(std::move(state));
  rates_.push_back(std::move(rates));
}

OdeState Trajectory::at(long double x) const {
  if (states_.empty()) throw std::logic_error("empty trajectory");
  if (x <= states_.front().x) return states_.front();
  if (x >= states_.back().x) return states_.back();
  auto it = std::upper_bound(states_.begin(), states_.end(), x,
                             [](Real v, const OdeState& s) { return v < s.x; });
  const std::size_t i = static_cast<std::size_t>(it - states_.begin()) - 1;
  const auto& a = states_[i];
  const auto& b = states_[i + 1];
  const Real dt = b.x - a.x;
  const Real t = (x - a.x) / dt;
  const Real h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  const Real h10 = t * (1 - t) * (1 - t);
  const Real h01 = t * t * (3 - 2 * t);
  const Real h11 = t * t * (t - 1);
  const Vec ya = pack(a, params_);
  const Vec yb = pack(b, params_);
  const Vec fa = pack(rates_[i], params_);
  const Vec fb = pack(rates_[i + 1], params_);
  Vec y(ya.size());
  for (std::size_t c = 0; c < y.size(); ++c) {
    y[c] = h00 * ya[c] + h10 * dt * fa[c] + h01 * yb[c] + h11 * dt * fb[c];
  }
  bool ok = false;
  return unpack(x, y, params_, ok);
}

void Trajectory::write_csv(std::ostream& out) const {
  const int h = params_.p.h;
  const int w = params_.p.w;
  out << "x";
  for (int j = 0; j < w; ++j) out << ",z_L_" << h - j;
  for (int j = 0; j < w; ++j) out << ",z_H_" << h - j;
  out << ",z_L,z_B,z_HV,z_A,lambda,mu\n";
  auto num = [](Real v) { return fmt::format("{:.12g}", static_cast<double>(v)); };
  for (const auto& s : states_) {
    out << num(s.x);
    for (int j = 0; j < w; ++j) out << ',' << num(s.light[j]);
    for (int j = 0; j < w; ++j) out << ',' << num(s.heavy[j]);
    out << ',' << num(s.z_L) << ',' << num(s.z_B) << ',' << num(s.z_HV) << ',' << num(s.z_A) << ','
        << num(s.lambda) << ',' << num(s.mu) << '\n';
  }
}

Integration integrate(const OdeParams& params) {
  Integration out{Trajectory(params), {}};
  Integrator integrator(params, &out.trajectory);
  out.stats = integrator.run();
  return out;
}

CoreStats core_prediction(const OrientationParams& p, long double mu_bar, const OdeControls& controls) {
  OdeParams params{p, mu_bar, controls, false};
  Integrator integrator(params, nullptr);
  return integrator.run();
}

ThresholdResult find_threshold(const OrientationParams& p, long double tol, const OdeControls& controls) {
  if (!(tol > 0)) throw InvalidInput("threshold tolerance must be positive");
  ThresholdResult r;
  r.lower = p.k;
  r.upper = static_cast<Real>(p.h) * p.k / p.w;
  r.stats_lower = core_prediction(p, r.lower, controls);
  r.stats_upper = core_prediction(p, r.upper, controls);
  for (int i = 0; i < 8 && r.stats_lower.effective_kappa() >= p.k; ++i) {
    r.lower /= 2;
    r.stats_lower = core_prediction(p, r.lower, controls);
  }
  for (int i = 0; i < 16 && r.stats_upper.effective_kappa() <= p.k; ++i) {
    r.upper += (r.upper - r.lower) / 2;
    r.stats_upper = core_prediction(p, r.upper, controls);
  }
  if (r.stats_lower.effective_kappa() >= p.k || r.stats_upper.effective_kappa() <= p.k) {
    throw BracketError(fmt::format("no sign change of kappa - k on [{}, {}]", static_cast<double>(r.lower),
                                   static_cast<double>(r.upper)));
  }
  while (r.upper - r.lower > tol) {
    const Real mid = (r.lower + r.upper) / 2;
    auto stats = core_prediction(p, mid, controls);
    if (stats.effective_kappa() > p.k) {
      r.upper = mid;
      r.stats_upper = std::move(stats);
    } else {
      r.lower = mid;
      r.stats_lower = std::move(stats);
    }
    ++r.iterations;
  }
  r.kappa_lower = r.stats_lower.effective_kappa();
  r.kappa_upper = r.stats_upper.effective_kappa();
  r.mu_tilde = (r.lower + r.upper) / 2;
  r.stats_at_threshold = core_prediction(p, r.mu_tilde, controls);
  // When the core appears abruptly the midpoint can still be degenerate;
  // report the core just above the jump instead.
  if (!r.stats_at_threshold.core_found()) r.stats_at_threshold = r.stats_upper;
  return r;
}

double TraceDeviation::max() const {
  return deviation.empty() ? 0.0 : *std::max_element(deviation.begin(), deviation.end());
}

TraceDeviation trajectory_vs_trace(const Trajectory& trajectory, const ProcessTrace& trace) {
  const int h = trace.params.h;
  const int w = trace.params.w;
  if (trajectory.params().p.h != h || trajectory.params().p.w != w || trajectory.params().p.k != trace.params.k) {
    throw InvalidInput("trajectory and trace use different parameters");
  }
  TraceDeviation out;
  out.names = {"z_L", "z_B", "z_HV", "z_A"};
  for (int j = 0; j < w; ++j) out.names.push_back(fmt::format("z_L_{}", h - j));
  for (int j = 0; j < w; ++j) out.names.push_back(fmt::format("z_H_{}", h - j));
  const std::size_t vars = out.names.size();
  std::vector<Real> worst(vars, 0);
  std::vector<Real> size(vars, 0);

  for (const auto& row : trace.rows) {
    const Real x = trace.scaled_time(row);
    if (x > trajectory.end()) break;
    const OdeState s = trajectory.at(x);
    std::vector<Real> ode{s.z_L, s.z_B, s.z_HV, s.z_A};
    std::vector<Real> sim{trace.scale(row.light), trace.scale(row.balls), trace.scale(row.heavy_bins),
                          trace.scale(row.heavy_bins_at_floor)};
    for (int j = 0; j < w; ++j) {
      ode.push_back(s.light[j]);
      sim.push_back(trace.scale(row.light_by_deficit[j]));
    }
    for (int j = 0; j < w; ++j) {
      ode.push_back(s.heavy[j]);
      sim.push_back(trace.scale(row.heavy_by_deficit[j]));
    }
    for (std::size_t v = 0; v < vars; ++v) {
      worst[v] = std::max(worst[v], std::abs(sim[v] - ode[v]));
      size[v] = std::max(size[v], std::abs(ode[v]));
    }
    ++out.samples;
  }
  out.deviation.resize(vars);
  for (std::size_t v = 0; v < vars; ++v) {
    out.deviation[v] = static_cast<double>(size[v] > 0 ? worst[v] / size[v] : worst[v]);
  }
  return out;
}

}  // namespace hyperorient
