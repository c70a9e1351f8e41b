#pragma once

#include <concepts>
#include <stdexcept>
#include <vector>

#include "hyperorient/rng.hpp"

namespace hyperorient {

// Raised when lambda f_k(lambda) = mu f_{k+1}(lambda) has no positive root.
class NoSolution : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Both tails of Poisson(mu) split at k, each accurate to full relative
// precision: lower = P(X <= k-1), upper = P(X >= k) = f_k(mu).
template <std::floating_point T>
struct PoissonTails {
  T lower;
  T upper;
};

template <std::floating_point T>
T poisson_pmf(int j, T mu);

template <std::floating_point T>
PoissonTails<T> poisson_tails(int k, T mu);

// f_k(mu) = P(Poisson(mu) >= k); 1 for k <= 0.
template <std::floating_point T>
T f_k(int k, T mu) {
  return poisson_tails(k, mu).upper;
}

// p_k(y) / f_{k+1}(y), evaluated without forming either tiny quantity.
template <std::floating_point T>
T tail_ratio(int k, T y);

// The unique lambda with lambda f_k(lambda) = mu f_{k+1}(lambda), for mu > k+1.
template <std::floating_point T>
T solve_lambda(T mu, int k);

// Z_{(>=k)}: Poisson(lambda) conditioned on being at least k.
struct TruncatedPoisson {
  double lambda;
  int k;

  TruncatedPoisson(double lambda_, int k_);

  double pmf(int j) const;
  // lambda f_{k-1}(lambda) / f_k(lambda).
  double mean() const;
  double variance() const;
};

// Inversion sampler over a precomputed CDF table with a sequential tail guard.
class TruncatedPoissonSampler {
 public:
  explicit TruncatedPoissonSampler(const TruncatedPoisson& dist);
  int operator()(Rng& rng) const;
  const TruncatedPoisson& distribution() const { return dist_; }

 private:
  TruncatedPoisson dist_;
  std::vector<double> cdf_;  // cdf_[i] = P(Z <= k + i)
};

inline int truncated_sample(const TruncatedPoisson& tp, Rng& rng) {
  return TruncatedPoissonSampler(tp)(rng);
}

// Predicted fraction of heavy bins holding exactly k+1 balls:
// e^{-lambda} lambda^{k+1} / ((k+1)! f_{k+1}(lambda)).
template <std::floating_point T>
T heavy_bucket_fraction(T lambda, int k) {
  return tail_ratio(k + 1, lambda) / (1 + tail_ratio(k + 1, lambda));
}

template <std::floating_point T>
struct InitialConditions {
  T light_balls;   // z_L(0) = mu (1 - f_k(mu))
  T balls;         // z_B(0) = mu
  T heavy_bins;    // z_HV(0) = f_{k+1}(mu)
  T lambda;        // lambda(0) = mu
};

template <std::floating_point T>
InitialConditions<T> initial_conditions(T mu_bar, int k);

}  // namespace hyperorient
