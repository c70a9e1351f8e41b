#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hyperorient/experiments.hpp"
#include "hyperorient/flow.hpp"
#include "hyperorient/io.hpp"
#include "hyperorient/random_models.hpp"
#include "oracles.hpp"

using namespace hyperorient;

namespace {

std::string trials_text(unsigned workers, Format format) {
  const OrientationParams p(3, 2, 4);
  TrialOptions opts;
  opts.degree_histogram = true;
  const auto records = run_trials(p, 3000, 5.6, 8, 77, workers, opts);
  std::ostringstream out;
  write_trials(out, records, p, format, false);
  return out.str();
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(HYPERORIENT_CLI) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Trials, ByteIdenticalAcrossWorkerCounts) {
  EXPECT_EQ(trials_text(1, Format::csv), trials_text(3, Format::csv));
  EXPECT_EQ(trials_text(1, Format::json), trials_text(4, Format::json));
}

TEST(Trials, ReproducibleFromSeedAndIndex) {
  const OrientationParams p(3, 2, 2);
  const auto records = run_trials(p, 500, 3.0, 5, 9, 2);
  ASSERT_EQ(records.size(), 5U);
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].index, i);
    EXPECT_EQ(records[i].seed.seed, 9U);
    EXPECT_EQ(records[i].seed.stream, i);
    const auto again = run_trial(p, 500, 3.0, records[i].seed, i);
    EXPECT_EQ(again.n_core, records[i].n_core);
    EXPECT_EQ(again.m_core, records[i].m_core);
    EXPECT_EQ(again.kappa, records[i].kappa);
    EXPECT_EQ(again.orientable, records[i].orientable);
    EXPECT_EQ(records[i].m, 500U);
  }
}

TEST(Trials, JsonCarriesSchemaVersion) {
  const auto doc = nlohmann::json::parse(trials_text(1, Format::json));
  EXPECT_EQ(doc["schema_version"], kSchemaVersion);
  EXPECT_EQ(doc["trials"].size(), 8U);
}

TEST(Trials, CsvHeader) {
  const auto text = trials_text(1, Format::csv);
  EXPECT_EQ(text.substr(0, text.find('\n')), "index,seed,stream,n,m,mu_bar,n_core,m_core_3,m_core_2,kappa,mu_hat,orientable");
}

TEST(OrientabilityPoint, WilsonHalfWidth) {
  EXPECT_NEAR((OrientabilityPoint{5.0, 5, 10}).half_width(), 0.2634, 1e-3);
  EXPECT_NEAR((OrientabilityPoint{5.0, 0, 10}).half_width(), 0.1391, 1e-3);
  EXPECT_EQ((OrientabilityPoint{5.0, 0, 0}).fraction(), 0.0);
}

TEST(SimulateThreshold, GridIsDeterministicAndBracketsCrossing) {
  const OrientationParams p(3, 2, 2);
  const std::vector<double> grid{1.9, 2.27, 2.7};
  const auto a = simulate_threshold_grid(p, 2000, 6, grid, 5, 1);
  const auto b = simulate_threshold_grid(p, 2000, 6, grid, 5, 3);
  std::ostringstream sa, sb;
  write_threshold(sa, a, p, 2000, Format::csv);
  write_threshold(sb, b, p, 2000, Format::csv);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(a.points.front().fraction(), 1.0);
  EXPECT_EQ(a.points.back().fraction(), 0.0);
  EXPECT_GT(a.estimate, 1.9);
  EXPECT_LT(a.estimate, 2.7);
}

TEST(ChiSquare, AcceptsTruncatedMultinomialDegrees) {
  const int k = 4;
  Rng rng(RngSeed{51, 0});
  std::vector<TrialRecord> records;
  for (int t = 0; t < 4; ++t) {
    TrialRecord r;
    const auto degrees = sample_truncated_degree_sequence(5000, 5000 * 7, k, rng);
    for (auto d : degrees) {
      if (d >= r.degree_histogram.size()) r.degree_histogram.resize(d + 1, 0);
      ++r.degree_histogram[d];
    }
    r.n_core = 5000;
    r.mu_hat = 7.0;
    records.push_back(r);
  }
  const auto fit = core_degree_chi_square(records, k);
  EXPECT_GT(fit.p_value, 0.001);
  EXPECT_EQ(fit.dof, static_cast<int>(fit.cells) - 2);
  EXPECT_GT(fit.cells, 5U);
}

TEST(ChiSquare, RejectsWrongShape) {
  // Degrees k+1 and k+5 only, same mean as a Z_{(>=5)}(lambda) sample.
  TrialRecord r;
  r.degree_histogram.assign(10, 0);
  r.degree_histogram[5] = 5000;
  r.degree_histogram[9] = 5000;
  r.n_core = 10000;
  r.mu_hat = 7.0;
  EXPECT_LT(core_degree_chi_square({r}, 4).p_value, 1e-6);
}

TEST(CoreProfile, EmptyCoreRegime) {
  const auto prof = core_profile(OrientationParams(3, 2, 4), 2.0, 2000, 3, 1, 1);
  EXPECT_EQ(prof.alpha, 0.0);
  EXPECT_FALSE(prof.prediction.core_found());
  std::ostringstream out;
  write_core_profile(out, prof, Format::json);
  EXPECT_EQ(nlohmann::json::parse(out.str())["schema_version"], kSchemaVersion);
}

TEST(CoreProfile, TracksPrediction) {
  const auto prof = core_profile(OrientationParams(3, 2, 4), 6.0, 20000, 3, 2, 0);
  ASSERT_TRUE(prof.prediction.core_found());
  EXPECT_LT(std::abs(prof.alpha - static_cast<double>(prof.prediction.alpha)), 0.01);
  EXPECT_LT(std::abs(prof.mu_hat_deviation), 0.01);
  EXPECT_GT(prof.degree_fit.p_value, 0.001);
}

TEST(ReferenceRows, BelowTrivialBound) {
  const auto rows = compute_table1(1e-7L, {}, 0);
  ASSERT_EQ(rows.size(), 4U);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.result.has_value()) << r.error;
    EXPECT_LT(r.result->mu_tilde, static_cast<long double>(r.h) * r.k / r.w);
    EXPECT_GT(r.result->mu_hat(), r.result->mu_tilde);
  }
  std::ostringstream out;
  write_table1(out, rows, Format::csv);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "h,w,k,mu_tilde,mu_hat,ref_mu_tilde,ref_mu_hat,delta_mu_tilde,delta_mu_hat,error");
}

TEST(Cli, ExitCodes) {
  const auto dir = std::filesystem::temp_directory_path() / "hyperorient_cli_codes";
  std::filesystem::create_directories(dir);
  const auto tri = (dir / "tri.txt").string();
  const auto dbl = (dir / "dbl.txt").string();
  std::ofstream(tri) << "3 3\n0 1\n1 2\n2 0\n";
  std::ofstream(dbl) << "3 2\n0 1 2\n0 1 2\n";
  EXPECT_EQ(run_cli("orient --h 2 --w 1 --k 1 " + tri), 0);
  EXPECT_EQ(run_cli("orient --h 3 --w 2 --k 1 " + dbl), 2);
  EXPECT_EQ(run_cli("orient --h 3 --w 2 --k 1 " + (dir / "missing.txt").string()), 1);
  EXPECT_EQ(run_cli("orient --h 2 --w 3 --k 1 " + tri), 1);
  EXPECT_EQ(run_cli("bogus"), 1);
  std::filesystem::remove_all(dir);
}

TEST(Cli, CoreThenOrientMatchesDirectOrient) {
  const auto dir = std::filesystem::temp_directory_path() / "hyperorient_cli_pipeline";
  std::filesystem::create_directories(dir);
  Rng rng(RngSeed{52, 0});
  std::map<int, int> verdicts;
  for (int t = 0; t < 100; ++t) {
    const OrientationParams p(3, 2, 1 + static_cast<int>(rng.uniform_below(3)));
    const std::size_t n = 10 + rng.uniform_below(40);
    const auto g = oracle::random_instance(rng, n, rng.uniform_below(p.k * n / p.w + 4), p, false);
    const auto in = (dir / "in.txt").string();
    const auto core = (dir / "core.txt").string();
    {
      std::ofstream f(in);
      write_hypergraph(f, g);
    }
    const std::string flags = fmt::format("--h {} --w {} --k {} ", p.h, p.w, p.k);
    const int direct = run_cli("orient " + flags + in);
    ASSERT_EQ(run_cli("core " + flags + in + " --out " + core), 0);
    EXPECT_EQ(run_cli("orient " + flags + core), direct);
    EXPECT_EQ(direct, orient(g, p).orientable() ? 0 : 2);
    ++verdicts[direct];
  }
  EXPECT_GT(verdicts[0], 10);
  EXPECT_GT(verdicts[2], 10);
  std::filesystem::remove_all(dir);
}
