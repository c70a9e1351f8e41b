#include <gtest/gtest.h>

#include <cmath>

#include "hyperorient/poisson.hpp"

using namespace hyperorient;

namespace {

// Direct series; fine for moderate mu.
double naive_upper(int k, double mu) {
  if (k <= 0) return 1.0;
  double term = std::exp(-mu), below = 0;
  for (int j = 0; j < k; ++j) {
    below += term;
    term *= mu / (j + 1);
  }
  return 1.0 - below;
}

double bisect_lambda(double mu, int k) {
  auto g = [&](double x) { return x * naive_upper(k, x) - mu * naive_upper(k + 1, x); };
  double lo = 1e-9, hi = mu;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(Poisson, TailsSimpleValues) {
  EXPECT_EQ(f_k(0, 3.0), 1.0);
  EXPECT_EQ(f_k(-2, 3.0), 1.0);
  EXPECT_NEAR(f_k(1, 2.0), 1 - std::exp(-2.0), 1e-15);
  for (int k = 0; k < 12; ++k) {
    for (double mu : {0.3, 1.0, 4.5, 9.0}) {
      const auto t = poisson_tails(k, mu);
      EXPECT_NEAR(t.lower + t.upper, 1.0, 1e-14);
      EXPECT_NEAR(t.upper, naive_upper(k, mu), 1e-13);
    }
  }
}

TEST(Poisson, TailsMonotone) {
  for (int k = 1; k < 8; ++k) {
    double prev = 0;
    for (double mu = 0.1; mu < 20; mu += 0.1) {
      const double f = f_k(k, mu);
      EXPECT_GT(f, prev);
      EXPECT_LE(f, f_k(k - 1, mu));
      prev = f;
    }
  }
}

TEST(Poisson, TinyUpperTailKeepsRelativePrecision) {
  // P(X >= 60) for mu = 1: leading term dominates.
  const long double lead = poisson_pmf<long double>(60, 1.0L);
  const long double f = f_k(60, 1.0L);
  EXPECT_GT(f, lead);
  EXPECT_LT(f, lead * 1.02L);
  EXPECT_GT(f, 0.0L);
}

TEST(Poisson, TailRatio) {
  for (int k = 1; k < 6; ++k) {
    for (double y : {0.5, 2.0, 7.0}) {
      EXPECT_NEAR(tail_ratio(k, y), poisson_pmf(k, y) / naive_upper(k + 1, y), 1e-10);
    }
  }
}

TEST(SolveLambda, KnownValue) {
  EXPECT_NEAR(solve_lambda(2.0, 0), 1.5936242600400401, 1e-12);
}

TEST(SolveLambda, MatchesBisection) {
  for (int k : {0, 1, 2, 3, 5}) {
    for (double excess : {0.05, 0.5, 2.0, 7.0}) {
      const double mu = k + 1 + excess;
      EXPECT_NEAR(solve_lambda(mu, k), bisect_lambda(mu, k), 1e-9) << k << " " << mu;
    }
  }
}

TEST(SolveLambda, ResidualAndTruncatedMean) {
  for (int k : {1, 4, 10}) {
    for (double mu : {k + 1.01, k + 3.0, 3.0 * k + 2}) {
      const long double lam = solve_lambda(static_cast<long double>(mu), k);
      const long double resid = lam * f_k(k, lam) - mu * f_k(k + 1, lam);
      EXPECT_LT(std::fabs(resid), 1e-14L * mu);
      EXPECT_NEAR(TruncatedPoisson(static_cast<double>(lam), k + 1).mean(), mu, 1e-9);
    }
  }
}

TEST(SolveLambda, LargeK) {
  // mu - lambda = lambda p_k / f_{k+1}, about 0.089 here and shrinking as mu/k grows.
  const double lam = solve_lambda(60.0, 40);
  EXPECT_NEAR(lam, bisect_lambda(60.0, 40), 1e-9);
  EXPECT_GT(60.0 - lam, 0.0);
  EXPECT_LT(60.0 - lam, 0.1);
  EXPECT_LT(120.0 - solve_lambda(120.0, 40), 1e-12);
}

TEST(SolveLambda, NoSolutionAtOrBelowFloor) {
  EXPECT_THROW(solve_lambda(3.0, 2), NoSolution);
  EXPECT_THROW(solve_lambda(2.5, 2), NoSolution);
}

TEST(TruncatedPoisson, Normalised) {
  for (int k : {0, 1, 3, 8}) {
    for (double lam : {0.2, 2.0, 10.0}) {
      TruncatedPoisson tp(lam, k);
      double sum = 0, mean = 0;
      for (int j = 0; j < k + 200; ++j) {
        sum += tp.pmf(j);
        mean += j * tp.pmf(j);
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
      EXPECT_NEAR(mean, tp.mean(), 1e-9);
      for (int j = 0; j < k; ++j) EXPECT_EQ(tp.pmf(j), 0.0);
    }
  }
}

TEST(TruncatedPoisson, KZeroIsPoisson) {
  TruncatedPoisson tp(3.2, 0);
  for (int j = 0; j < 15; ++j) EXPECT_NEAR(tp.pmf(j), poisson_pmf(j, 3.2), 1e-15);
  EXPECT_NEAR(tp.mean(), 3.2, 1e-13);
  EXPECT_NEAR(tp.variance(), 3.2, 1e-12);
}

TEST(TruncatedPoisson, SamplerMoments) {
  TruncatedPoisson tp(2.5, 3);
  TruncatedPoissonSampler sample(tp);
  Rng rng(RngSeed{11, 0});
  const int draws = 1000000;
  double sum = 0;
  int below = 0;
  for (int i = 0; i < draws; ++i) {
    const int z = sample(rng);
    below += z < 3;
    sum += z;
  }
  EXPECT_EQ(below, 0);
  EXPECT_NEAR(sum / draws, tp.mean(), 4 * std::sqrt(tp.variance() / draws));
}

TEST(TruncatedPoisson, SamplerReachesFarTail) {
  // Tail guard: a value beyond the precomputed table must still be possible.
  TruncatedPoisson tp(30.0, 0);
  TruncatedPoissonSampler sample(tp);
  Rng rng(RngSeed{12, 0});
  int top = 0;
  for (int i = 0; i < 200000; ++i) top = std::max(top, sample(rng));
  EXPECT_GT(top, 50);
}

TEST(HeavyBucket, EqualsFloorProbability) {
  for (int k : {1, 2, 5}) {
    for (double lam : {0.5, 3.0, 12.0}) {
      EXPECT_NEAR(heavy_bucket_fraction(lam, k), TruncatedPoisson(lam, k + 1).pmf(k + 1), 1e-12);
    }
  }
}

TEST(InitialConditions, Values) {
  const auto ic = initial_conditions(5.0, 2);
  EXPECT_DOUBLE_EQ(ic.balls, 5.0);
  EXPECT_DOUBLE_EQ(ic.lambda, 5.0);
  EXPECT_NEAR(ic.light_balls, 5.0 * (1 - naive_upper(2, 5.0)), 1e-14);
  EXPECT_NEAR(ic.heavy_bins, naive_upper(3, 5.0), 1e-14);
}

TEST(InitialConditions, LambdaRoundTrip) {
  // The heavy part of Poisson(mu) is Z_{(>=k+1)} with parameter mu, so
  // solving for its mean recovers mu.
  for (int k : {1, 2, 4}) {
    const double mu = 4.7 + k;
    const auto ic = initial_conditions(mu, k);
    const double heavy_mean = (ic.balls - ic.light_balls) / ic.heavy_bins;
    EXPECT_NEAR(solve_lambda(heavy_mean, k), ic.lambda, 1e-10);
  }
}
