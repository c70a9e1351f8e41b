#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "hyperorient/experiments.hpp"
#include "hyperorient/flow.hpp"
#include "hyperorient/io.hpp"
#include "hyperorient/ode.hpp"
#include "hyperorient/peeling.hpp"
#include "hyperorient/random_models.hpp"

using namespace hyperorient;

namespace {

constexpr int kOrientable = 0;
constexpr int kError = 1;
constexpr int kNotOrientable = 2;

struct Options {
  int h = 3;
  int w = 2;
  int k = 4;
  std::size_t n = 100000;
  std::size_t m = 0;
  double mu = 0;
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  double tol = 0;
  std::string out;
  std::string format = "csv";
  unsigned workers = 0;
  bool timing = false;

  std::string input;
  std::string model = "multi";
  std::string mode = "det";
  std::string trace;
  std::string trajectory;
  std::string records;
  std::vector<double> grid;
  std::vector<double> bisect;
  bool minimize = false;

  OrientationParams params() const { return OrientationParams(h, w, k); }
  Format fmt() const { return format == "json" ? Format::json : Format::csv; }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::runtime_error("cannot open " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void add_hwk(CLI::App* cmd, Options& o) {
  cmd->add_option("--h", o.h, "edge size")->capture_default_str();
  cmd->add_option("--w", o.w, "signs per edge")->capture_default_str();
  cmd->add_option("--k", o.k, "indegree bound")->capture_default_str();
}

void add_output(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "output path (default stdout)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

Hypergraph load(const Options& o) {
  if (o.input.empty() || o.input == "-") return read_hypergraph(std::cin);
  return read_hypergraph_file(o.input);
}

int cmd_gen(const Options& o) {
  Rng rng(RngSeed{o.seed, 0});
  std::size_t m = o.m;
  if (m == 0) m = static_cast<std::size_t>(std::llround(o.mu * static_cast<double>(o.n) / o.h));
  Hypergraph g = o.model == "simple" ? sample_uniform_simple(o.n, m, o.h, rng) : sample_uniform_multi(o.n, m, o.h, rng);
  Output out(o.out);
  write_hypergraph(out.stream(), g);
  return 0;
}

int cmd_core(const Options& o) {
  const auto p = o.params();
  const auto g = load(o);
  PeelResult r;
  if (o.mode == "random") {
    Rng rng(RngSeed{o.seed, 0});
    ProcessTrace trace;
    r = rancore(g, p, rng, o.trace.empty() ? nullptr : &trace);
    if (!o.trace.empty()) {
      std::ofstream t(o.trace);
      write_trace_csv(t, trace);
    }
  } else {
    r = rancore(g, p);
  }
  Output out(o.out);
  write_hypergraph(out.stream(), r.core);
  const auto s = core_statistics(r, p);
  std::cerr << fmt::format("core: n={} m={} kappa={} mu_hat={:.6g}\n", s.num_vertices, r.core.num_edges(),
                           s.kappa.str(), s.mu_hat);
  return 0;
}

int cmd_orient(const Options& o) {
  const auto g = load(o);
  Output out(o.out);
  if (o.minimize) {
    const auto r = min_max_indegree(g, o.h, o.w);
    out.stream() << "# k* = " << r.k_star << '\n';
    write_orientation(out.stream(), r.orientation);
    return kOrientable;
  }
  const auto r = orient(g, o.params());
  if (r.orientable()) {
    write_orientation(out.stream(), r.orientation());
    return kOrientable;
  }
  if (const auto* witness = std::get_if<CutWitness>(&r.outcome)) {
    write_witness(out.stream(), *witness);
  } else {
    const auto& d = std::get<DegenerateEdge>(r.outcome);
    out.stream() << fmt::format("degenerate edge {}: {} distinct vertices, {} signs needed\n", d.edge, d.distinct,
                                d.demand);
  }
  return kNotOrientable;
}

int cmd_stats(const Options& o) {
  const auto p = o.params();
  const auto g = load(o);
  const auto peeled = rancore(g, p);
  const auto core = core_statistics(peeled, p);
  const auto by_size = g.edge_count_by_deficit(p);
  const Rational kappa = g.num_vertices() == 0 ? Rational(0) : w_density(g, p);
  const bool t = core.empty || core.kappa <= Rational(p.k);
  Output out(o.out);
  if (o.fmt() == Format::json) {
    nlohmann::json j = {{"schema_version", kSchemaVersion},
                        {"n", g.num_vertices()},
                        {"m", g.num_edges()},
                        {"m_by_size", by_size},
                        {"kappa", kappa.str()},
                        {"max_degree", g.max_degree()},
                        {"core_n", core.num_vertices},
                        {"core_m_by_size", core.edges_by_deficit},
                        {"core_kappa", core.kappa.str()},
                        {"core_mu_hat", core.mu_hat},
                        {"property_T", t}};
    out.stream() << j.dump(2) << '\n';
    return 0;
  }
  out.stream() << "n,m";
  for (int j = 0; j < p.w; ++j) out.stream() << ",m_" << p.h - j;
  out.stream() << ",kappa,max_degree,core_n";
  for (int j = 0; j < p.w; ++j) out.stream() << ",core_m_" << p.h - j;
  out.stream() << ",core_kappa,core_mu_hat,property_T\n";
  out.stream() << g.num_vertices() << ',' << g.num_edges();
  for (auto c : by_size) out.stream() << ',' << c;
  out.stream() << ',' << kappa.str() << ',' << g.max_degree() << ',' << core.num_vertices;
  for (auto c : core.edges_by_deficit) out.stream() << ',' << c;
  out.stream() << ',' << core.kappa.str() << ',' << fmt::format("{:.10g}", core.mu_hat) << ',' << (t ? 1 : 0) << '\n';
  return 0;
}

int cmd_ode(const Options& o) {
  OdeParams params{o.params(), o.mu, {}, false};
  const auto r = integrate(params);
  if (!o.trajectory.empty()) {
    std::ofstream t(o.trajectory);
    r.trajectory.write_csv(t);
  }
  Output out(o.out);
  write_core_stats(out.stream(), params.p, params.mu_bar, r.stats, o.fmt());
  return 0;
}

int cmd_threshold(const Options& o) {
  const auto r = find_threshold(o.params(), o.tol > 0 ? o.tol : 1e-7);
  Output out(o.out);
  write_ode_threshold(out.stream(), o.params(), r, o.fmt());
  return 0;
}

int cmd_simulate(const Options& o) {
  const auto p = o.params();
  Output out(o.out);
  if (o.grid.empty() && o.bisect.empty()) {
    const auto records = run_trials(p, o.n, o.mu, o.trials, o.seed, o.workers);
    write_trials(out.stream(), records, p, o.fmt(), o.timing);
    return 0;
  }
  if (o.n < 1000) throw InvalidInput("threshold simulation needs n >= 1000");
  SimulatedThreshold r;
  if (!o.grid.empty()) {
    r = simulate_threshold_grid(p, o.n, o.trials, o.grid, o.seed, o.workers);
  } else {
    if (o.bisect.size() != 2) throw InvalidInput("--bisect takes LOWER,UPPER");
    r = simulate_threshold_bisect(p, o.n, o.trials, o.bisect[0], o.bisect[1], o.tol > 0 ? o.tol : 0.01, o.seed,
                                  o.workers);
  }
  write_threshold(out.stream(), r, p, o.n, o.fmt());
  if (!o.records.empty()) {
    std::ofstream rec(o.records);
    write_trials(rec, r.records, p, o.fmt(), o.timing);
  }
  return 0;
}

int cmd_core_profile(const Options& o) {
  const auto r = core_profile(o.params(), o.mu, o.n, o.trials, o.seed, o.workers);
  Output out(o.out);
  write_core_profile(out.stream(), r, o.fmt());
  if (!o.records.empty()) {
    std::ofstream rec(o.records);
    write_trials(rec, r.records, o.params(), o.fmt(), o.timing);
  }
  return 0;
}

int cmd_table1(const Options& o) {
  const auto rows = compute_table1(o.tol > 0 ? o.tol : 1e-7, {}, o.workers);
  Output out(o.out);
  write_table1(out.stream(), rows, o.fmt());
  for (const auto& r : rows) {
    if (!r.result) return kError;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hypergraph (w,k)-orientability: peeling, flows, and the threshold ODE"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "sample a random h-uniform multihypergraph");
  gen->add_option("--h", o.h, "edge size")->capture_default_str();
  gen->add_option("--n", o.n, "vertices")->capture_default_str();
  gen->add_option("--m", o.m, "edges (overrides --mu)");
  gen->add_option("--mu", o.mu, "average degree; m = round(mu n / h)");
  gen->add_option("--seed", o.seed)->capture_default_str();
  gen->add_option("--model", o.model, "multi or simple")->check(CLI::IsMember({"multi", "simple"}));
  gen->add_option("--out", o.out, "output path (default stdout)");

  auto* core = app.add_subcommand("core", "peel to the (w,k+1)-core and write it");
  core->add_option("input", o.input, "hypergraph file (default stdin)");
  add_hwk(core, o);
  core->add_option("--mode", o.mode, "det or random")->check(CLI::IsMember({"det", "random"}));
  core->add_option("--seed", o.seed)->capture_default_str();
  core->add_option("--trace", o.trace, "process trace CSV (random mode)");
  core->add_option("--out", o.out, "output path (default stdout)");

  auto* orient_cmd = app.add_subcommand("orient", "find a (w,k)-orientation or a violating set");
  orient_cmd->add_option("input", o.input, "hypergraph file (default stdin)");
  add_hwk(orient_cmd, o);
  orient_cmd->add_flag("--min", o.minimize, "minimise the maximum indegree instead");
  orient_cmd->add_option("--out", o.out, "output path (default stdout)");

  auto* stats = app.add_subcommand("stats", "densities and core statistics of a hypergraph file");
  stats->add_option("input", o.input, "hypergraph file (default stdin)");
  add_hwk(stats, o);
  add_output(stats, o);

  auto* ode = app.add_subcommand("ode", "integrate the core ODE at one average degree");
  add_hwk(ode, o);
  ode->add_option("--mu", o.mu, "average degree")->required();
  ode->add_option("--trajectory", o.trajectory, "trajectory CSV path");
  add_output(ode, o);

  auto* threshold = app.add_subcommand("threshold", "bisect the ODE for the orientability threshold");
  add_hwk(threshold, o);
  threshold->add_option("--tol", o.tol, "bracket width (default 1e-7)");
  add_output(threshold, o);

  auto* simulate = app.add_subcommand("simulate", "random trials; orientable fraction or threshold estimate");
  add_hwk(simulate, o);
  simulate->add_option("--n", o.n)->capture_default_str();
  simulate->add_option("--mu", o.mu, "average degree for plain trials");
  simulate->add_option("--trials", o.trials)->capture_default_str();
  simulate->add_option("--seed", o.seed)->capture_default_str();
  simulate->add_option("--grid", o.grid, "average degrees to sweep")->delimiter(',');
  simulate->add_option("--bisect", o.bisect, "LOWER,UPPER bracket for bisection")->delimiter(',');
  simulate->add_option("--tol", o.tol, "bisection width (default 0.01)");
  simulate->add_option("--records", o.records, "per-trial records path");
  simulate->add_option("--workers", o.workers, "threads (0 = all cores)");
  simulate->add_flag("--timing", o.timing, "include wall time per trial");
  add_output(simulate, o);

  auto* profile = app.add_subcommand("core-profile", "empirical core statistics against the ODE");
  add_hwk(profile, o);
  profile->add_option("--mu", o.mu, "average degree")->required();
  profile->add_option("--n", o.n)->capture_default_str();
  profile->add_option("--trials", o.trials)->capture_default_str();
  profile->add_option("--seed", o.seed)->capture_default_str();
  profile->add_option("--records", o.records, "per-trial records path");
  profile->add_option("--workers", o.workers, "threads (0 = all cores)");
  profile->add_flag("--timing", o.timing, "include wall time per trial");
  add_output(profile, o);

  auto* table1 = app.add_subcommand("table1", "thresholds for the four reference triples");
  table1->add_option("--tol", o.tol, "bracket width (default 1e-7)");
  table1->add_option("--workers", o.workers, "threads (0 = all cores)");
  add_output(table1, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kError;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*core) return cmd_core(o);
    if (*orient_cmd) return cmd_orient(o);
    if (*stats) return cmd_stats(o);
    if (*ode) return cmd_ode(o);
    if (*threshold) return cmd_threshold(o);
    if (*simulate) return cmd_simulate(o);
    if (*profile) return cmd_core_profile(o);
    if (*table1) return cmd_table1(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error at line " << e.line() << ": " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
