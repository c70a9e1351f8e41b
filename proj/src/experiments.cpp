#include "hyperorient/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "hyperorient/flow.hpp"
#include "hyperorient/peeling.hpp"
#include "hyperorient/poisson.hpp"
#include "hyperorient/random_models.hpp"

namespace hyperorient {

using nlohmann::json;

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

TrialRecord run_trial(const OrientationParams& p, std::size_t n, double mu_bar, RngSeed seed,
                      std::size_t index, const TrialOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.index = index;
  rec.seed = seed;
  rec.n = n;
  rec.mu_bar = mu_bar;
  rec.m = static_cast<std::size_t>(std::llround(mu_bar * static_cast<double>(n) / p.h));

  Rng rng(seed);
  const auto graph = sample_uniform_multi(n, rec.m, p.h, rng);
  const auto peeled = rancore(graph, p);
  const auto summary = core_statistics(peeled, p);
  rec.n_core = summary.num_vertices;
  rec.m_core = summary.edges_by_deficit;
  rec.kappa = summary.kappa;
  rec.mu_hat = summary.mu_hat;
  if (options.orient) rec.orientable = peeled.core_empty() || orient(peeled.core, p).orientable();
  if (options.degree_histogram && !peeled.core_empty()) {
    const auto degrees = peeled.core.degrees();
    rec.degree_histogram.assign(*std::max_element(degrees.begin(), degrees.end()) + 1, 0);
    for (auto d : degrees) ++rec.degree_histogram[d];
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<TrialRecord> run_trials(const OrientationParams& p, std::size_t n, double mu_bar,
                                    std::size_t trials, std::uint64_t master_seed, unsigned workers,
                                    const TrialOptions& options) {
  std::vector<TrialRecord> records(trials);
  parallel_for(trials, workers, [&](std::size_t i) {
    records[i] = run_trial(p, n, mu_bar, RngSeed{master_seed, i}, i, options);
  });
  return records;
}

double OrientabilityPoint::half_width() const {
  if (trials == 0) return 1.0;
  const double z = 1.959963984540054;
  const double t = static_cast<double>(trials);
  const double f = fraction();
  return z / (1 + z * z / t) * std::sqrt(f * (1 - f) / t + z * z / (4 * t * t));
}

namespace {

OrientabilityPoint evaluate_point(const OrientationParams& p, std::size_t n, std::size_t trials, double mu_bar,
                                  std::uint64_t master_seed, unsigned workers,
                                  std::vector<TrialRecord>& records) {
  auto batch = run_trials(p, n, mu_bar, trials, master_seed, workers);
  OrientabilityPoint point{mu_bar, 0, trials};
  for (const auto& r : batch) point.orientable += r.orientable;
  records.insert(records.end(), batch.begin(), batch.end());
  return point;
}

}  // namespace

SimulatedThreshold simulate_threshold_bisect(const OrientationParams& p, std::size_t n, std::size_t trials,
                                             double lower, double upper, double tol,
                                             std::uint64_t master_seed, unsigned workers) {
  if (!(lower < upper) || !(tol > 0)) throw InvalidInput("need lower < upper and tol > 0");
  SimulatedThreshold out;
  out.lower = lower;
  out.upper = upper;
  while (out.upper - out.lower > tol) {
    const double mid = (out.lower + out.upper) / 2;
    const auto point = evaluate_point(p, n, trials, mid, master_seed, workers, out.records);
    out.points.push_back(point);
    if (point.fraction() >= 0.5) {
      out.lower = mid;
    } else {
      out.upper = mid;
    }
  }
  out.estimate = (out.lower + out.upper) / 2;
  return out;
}

SimulatedThreshold simulate_threshold_grid(const OrientationParams& p, std::size_t n, std::size_t trials,
                                           const std::vector<double>& grid, std::uint64_t master_seed,
                                           unsigned workers) {
  if (grid.empty()) throw InvalidInput("empty grid");
  SimulatedThreshold out;
  auto sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  for (double mu : sorted) out.points.push_back(evaluate_point(p, n, trials, mu, master_seed, workers, out.records));
  out.lower = sorted.front();
  out.upper = sorted.back();
  out.estimate = std::nan("");
  for (std::size_t i = 0; i + 1 < out.points.size(); ++i) {
    const auto& a = out.points[i];
    const auto& b = out.points[i + 1];
    if (a.fraction() >= 0.5 && b.fraction() < 0.5) {
      out.lower = a.mu_bar;
      out.upper = b.mu_bar;
      const double t = (a.fraction() - 0.5) / (a.fraction() - b.fraction());
      out.estimate = a.mu_bar + t * (b.mu_bar - a.mu_bar);
      break;
    }
  }
  return out;
}

ChiSquare core_degree_chi_square(const std::vector<TrialRecord>& records, int k) {
  std::vector<double> observed;
  std::vector<double> expected;
  double total = 0;
  for (const auto& r : records) {
    if (r.n_core == 0 || r.degree_histogram.empty() || !(r.mu_hat > k + 1 + 1e-9)) continue;
    const TruncatedPoisson dist(solve_lambda<double>(r.mu_hat, k), k + 1);
    const std::size_t top = std::max<std::size_t>(r.degree_histogram.size(), 4 * (k + 1) + 64);
    if (observed.size() < top) {
      observed.resize(top, 0);
      expected.resize(top, 0);
    }
    for (std::size_t d = 0; d < r.degree_histogram.size(); ++d) observed[d] += r.degree_histogram[d];
    for (std::size_t d = k + 1; d < top; ++d) expected[d] += static_cast<double>(r.n_core) * dist.pmf(static_cast<int>(d));
    total += static_cast<double>(r.n_core);
  }
  ChiSquare out;
  if (total == 0) return out;

  // Cells left to right; the last one absorbs the upper tail so every cell
  // expects at least 5.
  double remaining = total;
  double remaining_obs = total;
  double stat = 0;
  for (std::size_t d = k + 1; d < expected.size(); ++d) {
    const double after = remaining - expected[d];
    if (expected[d] < 5 || after < 5) break;
    stat += (observed[d] - expected[d]) * (observed[d] - expected[d]) / expected[d];
    remaining = after;
    remaining_obs -= observed[d];
    ++out.cells;
  }
  stat += (remaining_obs - remaining) * (remaining_obs - remaining) / remaining;
  ++out.cells;
  out.statistic = stat;
  out.dof = std::max(1, static_cast<int>(out.cells) - 2);
  const boost::math::chi_squared_distribution<double> chi(out.dof);
  out.p_value = boost::math::cdf(boost::math::complement(chi, stat));
  return out;
}

CoreProfile core_profile(const OrientationParams& p, double mu_bar, std::size_t n, std::size_t trials,
                         std::uint64_t master_seed, unsigned workers) {
  CoreProfile prof;
  prof.params = p;
  prof.mu_bar = mu_bar;
  prof.n = n;
  prof.records = run_trials(p, n, mu_bar, trials, master_seed, workers, TrialOptions{false, true});
  prof.prediction = core_prediction(p, mu_bar);
  prof.beta.assign(p.w, 0);
  for (const auto& r : prof.records) {
    prof.alpha += static_cast<double>(r.n_core) / static_cast<double>(n);
    for (int j = 0; j < p.w; ++j) prof.beta[j] += static_cast<double>(r.m_core[j]) / static_cast<double>(n);
    prof.kappa += r.kappa.to_double();
    prof.mu_hat += r.mu_hat;
  }
  const double t = static_cast<double>(std::max<std::size_t>(trials, 1));
  prof.alpha /= t;
  for (auto& b : prof.beta) b /= t;
  prof.kappa /= t;
  prof.mu_hat /= t;

  auto rel = [](double empirical, long double predicted) {
    if (predicted == 0) return std::abs(empirical);
    return static_cast<double>(std::abs(empirical - predicted) / std::abs(predicted));
  };
  const auto& pred = prof.prediction;
  const bool has_core = pred.core_found();
  prof.alpha_deviation = rel(prof.alpha, has_core ? pred.alpha : 0);
  prof.mu_hat_deviation = rel(prof.mu_hat, has_core ? pred.mu_hat : 0);
  prof.kappa_deviation = rel(prof.kappa, pred.effective_kappa());
  prof.degree_fit = core_degree_chi_square(prof.records, p.k);
  return prof;
}

std::vector<Table1Row> table1_rows() {
  return {
      {3, 2, 4, 5.485, 6.65086, std::nullopt, {}},
      {3, 2, 10, 14.766, 15.5872, std::nullopt, {}},
      {3, 2, 40, 59.991, 60.0773, std::nullopt, {}},
      {10, 2, 4, 19.99999, 20.0003, std::nullopt, {}},
  };
}

std::vector<Table1Row> compute_table1(long double tol, const OdeControls& controls, unsigned workers) {
  auto rows = table1_rows();
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    auto& row = rows[i];
    try {
      row.result = find_threshold(OrientationParams(row.h, row.w, row.k), tol, controls);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

namespace {

std::string num(double v) { return fmt::format("{:.10g}", v); }
std::string num(long double v) { return fmt::format("{:.10g}", static_cast<double>(v)); }

json params_json(const OrientationParams& p) { return {{"h", p.h}, {"w", p.w}, {"k", p.k}}; }

json trial_json(const TrialRecord& r, bool timing) {
  json j = {{"index", r.index},       {"seed", r.seed.seed},   {"stream", r.seed.stream},
            {"n", r.n},               {"m", r.m},              {"mu_bar", r.mu_bar},
            {"n_core", r.n_core},     {"m_core", r.m_core},    {"kappa", r.kappa.str()},
            {"mu_hat", r.mu_hat},     {"orientable", r.orientable}};
  if (timing) j["wall_seconds"] = r.wall_seconds;
  return j;
}

json stats_json(const CoreStats& s) {
  std::vector<double> beta(s.beta.begin(), s.beta.end());
  return {{"x_star", static_cast<double>(s.x_star)},
          {"alpha", static_cast<double>(s.alpha)},
          {"beta", beta},
          {"kappa", static_cast<double>(s.kappa)},
          {"mu_hat", static_cast<double>(s.mu_hat)},
          {"terminated_by", to_string(s.terminated_by)}};
}

}  // namespace

void write_trials(std::ostream& out, const std::vector<TrialRecord>& records, const OrientationParams& p,
                  Format format, bool timing) {
  if (format == Format::json) {
    json arr = json::array();
    for (const auto& r : records) arr.push_back(trial_json(r, timing));
    out << json{{"schema_version", kSchemaVersion}, {"params", params_json(p)}, {"trials", arr}}.dump(2) << '\n';
    return;
  }
  out << "index,seed,stream,n,m,mu_bar,n_core";
  for (int j = 0; j < p.w; ++j) out << ",m_core_" << p.h - j;
  out << ",kappa,mu_hat,orientable" << (timing ? ",wall_seconds" : "") << '\n';
  for (const auto& r : records) {
    out << r.index << ',' << r.seed.seed << ',' << r.seed.stream << ',' << r.n << ',' << r.m << ',' << num(r.mu_bar)
        << ',' << r.n_core;
    for (auto c : r.m_core) out << ',' << c;
    out << ',' << num(r.kappa.to_double()) << ',' << num(r.mu_hat) << ',' << (r.orientable ? 1 : 0);
    if (timing) out << ',' << num(r.wall_seconds);
    out << '\n';
  }
}

void write_threshold(std::ostream& out, const SimulatedThreshold& result, const OrientationParams& p,
                     std::size_t n, Format format) {
  if (format == Format::json) {
    json points = json::array();
    for (const auto& pt : result.points) {
      points.push_back({{"mu_bar", pt.mu_bar},
                        {"orientable", pt.orientable},
                        {"trials", pt.trials},
                        {"fraction", pt.fraction()},
                        {"half_width", pt.half_width()}});
    }
    out << json{{"schema_version", kSchemaVersion},
                {"params", params_json(p)},
                {"n", n},
                {"estimate", result.estimate},
                {"lower", result.lower},
                {"upper", result.upper},
                {"points", points}}
               .dump(2)
        << '\n';
    return;
  }
  out << "mu_bar,orientable,trials,fraction,half_width\n";
  for (const auto& pt : result.points) {
    out << num(pt.mu_bar) << ',' << pt.orientable << ',' << pt.trials << ',' << num(pt.fraction()) << ','
        << num(pt.half_width()) << '\n';
  }
  out << "# estimate," << num(result.estimate) << ",lower," << num(result.lower) << ",upper," << num(result.upper)
      << '\n';
}

void write_core_profile(std::ostream& out, const CoreProfile& prof, Format format) {
  const auto& pred = prof.prediction;
  if (format == Format::json) {
    out << json{{"schema_version", kSchemaVersion},
                {"params", params_json(prof.params)},
                {"mu_bar", prof.mu_bar},
                {"n", prof.n},
                {"trials", prof.records.size()},
                {"empirical",
                 {{"alpha", prof.alpha}, {"beta", prof.beta}, {"kappa", prof.kappa}, {"mu_hat", prof.mu_hat}}},
                {"prediction", stats_json(pred)},
                {"deviation",
                 {{"alpha", prof.alpha_deviation}, {"kappa", prof.kappa_deviation}, {"mu_hat", prof.mu_hat_deviation}}},
                {"degree_chi_square",
                 {{"statistic", prof.degree_fit.statistic},
                  {"dof", prof.degree_fit.dof},
                  {"p_value", prof.degree_fit.p_value}}}}
               .dump(2)
        << '\n';
    return;
  }
  out << "quantity,empirical,predicted,relative_deviation\n";
  out << "alpha," << num(prof.alpha) << ',' << num(pred.alpha) << ',' << num(prof.alpha_deviation) << '\n';
  for (int j = 0; j < prof.params.w; ++j) {
    const long double b = j < static_cast<int>(pred.beta.size()) ? pred.beta[j] : 0;
    const double dev = b == 0 ? 0.0 : static_cast<double>(std::abs(prof.beta[j] - b) / b);
    out << "beta_" << prof.params.h - j << ',' << num(prof.beta[j]) << ',' << num(b) << ',' << num(dev) << '\n';
  }
  out << "kappa," << num(prof.kappa) << ',' << num(pred.effective_kappa()) << ',' << num(prof.kappa_deviation) << '\n';
  out << "mu_hat," << num(prof.mu_hat) << ',' << num(pred.mu_hat) << ',' << num(prof.mu_hat_deviation) << '\n';
  out << "# chi_square," << num(prof.degree_fit.statistic) << ",dof," << prof.degree_fit.dof << ",p_value,"
      << num(prof.degree_fit.p_value) << ",terminated_by," << to_string(pred.terminated_by) << '\n';
}

void write_table1(std::ostream& out, const std::vector<Table1Row>& rows, Format format) {
  if (format == Format::json) {
    json arr = json::array();
    for (const auto& r : rows) {
      json j = {{"h", r.h}, {"w", r.w}, {"k", r.k}, {"ref_mu_tilde", r.ref_mu_tilde}, {"ref_mu_hat", r.ref_mu_hat}};
      if (r.result) {
        j["mu_tilde"] = static_cast<double>(r.result->mu_tilde);
        j["mu_hat"] = static_cast<double>(r.result->mu_hat());
        j["delta_mu_tilde"] = static_cast<double>(r.result->mu_tilde) - r.ref_mu_tilde;
        j["delta_mu_hat"] = static_cast<double>(r.result->mu_hat()) - r.ref_mu_hat;
      } else {
        j["error"] = r.error;
      }
      arr.push_back(j);
    }
    out << json{{"schema_version", kSchemaVersion}, {"rows", arr}}.dump(2) << '\n';
    return;
  }
  out << "h,w,k,mu_tilde,mu_hat,ref_mu_tilde,ref_mu_hat,delta_mu_tilde,delta_mu_hat,error\n";
  for (const auto& r : rows) {
    out << r.h << ',' << r.w << ',' << r.k << ',';
    if (r.result) {
      const double mt = static_cast<double>(r.result->mu_tilde);
      const double mh = static_cast<double>(r.result->mu_hat());
      out << fmt::format("{:.7f},{:.7f},{},{},{:.3e},{:.3e},", mt, mh, r.ref_mu_tilde, r.ref_mu_hat,
                         mt - r.ref_mu_tilde, mh - r.ref_mu_hat);
    } else {
      out << ",," << r.ref_mu_tilde << ',' << r.ref_mu_hat << ",,," << '"' << r.error << '"';
    }
    out << '\n';
  }
}

void write_ode_threshold(std::ostream& out, const OrientationParams& p, const ThresholdResult& r, Format format) {
  if (format == Format::json) {
    out << json{{"schema_version", kSchemaVersion},
                {"params", params_json(p)},
                {"mu_tilde", static_cast<double>(r.mu_tilde)},
                {"mu_hat", static_cast<double>(r.mu_hat())},
                {"lower", static_cast<double>(r.lower)},
                {"upper", static_cast<double>(r.upper)},
                {"kappa_lower", static_cast<double>(r.kappa_lower)},
                {"kappa_upper", static_cast<double>(r.kappa_upper)},
                {"iterations", r.iterations},
                {"at_threshold", stats_json(r.stats_at_threshold)}}
               .dump(2)
        << '\n';
    return;
  }
  out << "h,w,k,mu_tilde,mu_hat,lower,upper,kappa_lower,kappa_upper,iterations\n";
  out << p.h << ',' << p.w << ',' << p.k << ',' << fmt::format("{:.9f},{:.9f},{:.12g},{:.12g},", static_cast<double>(r.mu_tilde),
                                                              static_cast<double>(r.mu_hat()), static_cast<double>(r.lower),
                                                              static_cast<double>(r.upper))
      << num(r.kappa_lower) << ',' << num(r.kappa_upper) << ',' << r.iterations << '\n';
}

void write_core_stats(std::ostream& out, const OrientationParams& p, long double mu_bar, const CoreStats& s,
                      Format format) {
  if (format == Format::json) {
    json j = stats_json(s);
    j["schema_version"] = kSchemaVersion;
    j["params"] = params_json(p);
    j["mu_bar"] = static_cast<double>(mu_bar);
    out << j.dump(2) << '\n';
    return;
  }
  out << "h,w,k,mu_bar,x_star,alpha";
  for (int j = 0; j < p.w; ++j) out << ",beta_" << p.h - j;
  out << ",kappa,mu_hat,terminated_by\n";
  out << p.h << ',' << p.w << ',' << p.k << ',' << num(mu_bar) << ',' << num(s.x_star) << ',' << num(s.alpha);
  for (auto b : s.beta) out << ',' << num(b);
  out << ',' << num(s.kappa) << ',' << num(s.mu_hat) << ',' << to_string(s.terminated_by) << '\n';
}

}  // namespace hyperorient
