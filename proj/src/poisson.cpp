#include "hyperorient/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace hyperorient {

namespace {

// Neumaier compensated accumulator.
template <typename T>
struct CompensatedSum {
  T sum = 0;
  T carry = 0;
  void add(T x) {
    const T t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  T value() const { return sum + carry; }
};

template <typename T>
T log_pmf(int j, T mu) {
  return -mu + static_cast<T>(j) * std::log(mu) - std::lgamma(static_cast<T>(j) + 1);
}

void check_mu(long double mu) {
  if (!(mu >= 0)) throw std::domain_error(fmt::format("Poisson mean must be >= 0, got {}", static_cast<double>(mu)));
}

}  // namespace

template <std::floating_point T>
T poisson_pmf(int j, T mu) {
  check_mu(mu);
  if (j < 0) return 0;
  if (mu == 0) return j == 0 ? 1 : 0;
  return std::exp(log_pmf(j, mu));
}

// The smaller tail is summed directly, starting at the term nearest the mode
// and walking away from it with the ratio recurrence.
template <std::floating_point T>
PoissonTails<T> poisson_tails(int k, T mu) {
  check_mu(mu);
  if (k <= 0) return {0, 1};
  if (mu == 0) return {1, 0};
  constexpr T eps = std::numeric_limits<T>::epsilon() / 4;

  if (static_cast<T>(k) > mu) {
    CompensatedSum<T> upper;
    T term = std::exp(log_pmf(k, mu));
    for (int i = k; term > 0; ++i) {
      upper.add(term);
      term *= mu / static_cast<T>(i + 1);
      if (term < eps * upper.value()) break;
    }
    const T u = upper.value();
    return {1 - u, u};
  }
  CompensatedSum<T> lower;
  T term = std::exp(log_pmf(k - 1, mu));
  for (int i = k - 1; i >= 0 && term > 0; --i) {
    lower.add(term);
    term *= static_cast<T>(i) / mu;
    if (term < eps * lower.value()) break;
  }
  const T l = lower.value();
  return {l, 1 - l};
}

// q = p_k(y) / f_{k+1}(y) = 1 / R with R = sum_{m>=1} prod_{i=1..m} y / (k+i).
// Below y = k+1 the series converges geometrically; above it f_{k+1} is
// bounded away from zero and the direct quotient is accurate.
template <std::floating_point T>
T tail_ratio(int k, T y) {
  if (k < 0) throw std::domain_error("tail_ratio needs k >= 0");
  if (!(y > 0)) throw std::domain_error("tail_ratio needs y > 0");
  constexpr T eps = std::numeric_limits<T>::epsilon() / 4;
  if (y <= static_cast<T>(k + 1)) {
    CompensatedSum<T> series;
    T term = 1;
    for (int m = 1;; ++m) {
      term *= y / static_cast<T>(k + m);
      series.add(term);
      if (term < eps * series.value()) break;
    }
    return 1 / series.value();
  }
  return poisson_pmf(k, y) / f_k(k + 1, y);
}

template <std::floating_point T>
T solve_lambda(T mu, int k) {
  if (k < 0) throw std::domain_error("solve_lambda needs k >= 0");
  if (!(mu > static_cast<T>(k + 1))) {
    throw NoSolution(fmt::format("lambda f_k = mu f_(k+1) has no root for mu={} <= k+1={}",
                                 static_cast<double>(mu), k + 1));
  }
  // G(y) = y f_k(y) / f_{k+1}(y) = y (1 + q) is increasing from k+1 (y -> 0)
  // and G(mu) >= mu, so the root lies in (0, mu].
  auto eval = [k](T y, T& slope) {
    const T q = tail_ratio(k, y);
    slope = 1 + q + q * static_cast<T>(k) - y * q - y * q * q;
    return y * (1 + q);
  };
  T lo = 0;
  T hi = mu;
  T y = mu;
  const T tol = std::numeric_limits<T>::epsilon() * 8 * mu;
  for (int iter = 0; iter < 200; ++iter) {
    T slope;
    const T g = eval(y, slope) - mu;
    if (g == 0) return y;
    if (g > 0) {
      hi = y;
    } else {
      lo = y;
    }
    T next = y - g / slope;
    if (!(slope > 0) || !(next > lo && next < hi)) next = (lo + hi) / 2;
    if (std::abs(next - y) <= tol || hi - lo <= tol) return next;
    y = next;
  }
  return y;
}

TruncatedPoisson::TruncatedPoisson(double lambda_, int k_) : lambda(lambda_), k(k_) {
  if (!(lambda > 0)) throw std::domain_error("truncated Poisson needs lambda > 0");
  if (k < 0) throw std::domain_error("truncated Poisson needs k >= 0");
}

// p_j / f_k = (p_j / p_k) * r / (1 + r) with r = p_k / f_{k+1}.
double TruncatedPoisson::pmf(int j) const {
  if (j < k) return 0.0;
  const long double l = lambda;
  const long double r = tail_ratio<long double>(k, l);
  const long double rel = std::exp(log_pmf<long double>(j, l) - log_pmf<long double>(k, l));
  return static_cast<double>(rel * r / (1 + r));
}

double TruncatedPoisson::mean() const {
  if (k == 0) return lambda;
  const long double l = lambda;
  return static_cast<double>(l * (1 + tail_ratio<long double>(k - 1, l)));
}

double TruncatedPoisson::variance() const {
  // E[Z(Z-1)] = lambda^2 f_{k-2}(lambda) / f_k(lambda).
  const long double l = lambda;
  const long double fk = f_k<long double>(k, l);
  const long double fk2 = f_k<long double>(k - 2, l);
  const long double m = mean();
  return static_cast<double>(l * l * fk2 / fk + m - m * m);
}

TruncatedPoissonSampler::TruncatedPoissonSampler(const TruncatedPoisson& dist) : dist_(dist) {
  double acc = 0.0;
  for (int j = dist_.k;; ++j) {
    const double p = dist_.pmf(j);
    acc += p;
    cdf_.push_back(acc);
    if (j > dist_.lambda && (1.0 - acc < 1e-17 || p < 1e-300)) break;
  }
  cdf_.back() = 1.0;
}

int TruncatedPoissonSampler::operator()(Rng& rng) const {
  const double u = rng.uniform01();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return dist_.k + static_cast<int>(it - cdf_.begin());
}

template <std::floating_point T>
InitialConditions<T> initial_conditions(T mu_bar, int k) {
  if (!(mu_bar > 0)) throw std::domain_error("initial conditions need mu_bar > 0");
  const auto tails = poisson_tails(k, mu_bar);
  return {mu_bar * tails.lower, mu_bar, f_k(k + 1, mu_bar), mu_bar};
}

#define HYPERORIENT_INSTANTIATE(T)                             \
  template T poisson_pmf<T>(int, T);                           \
  template PoissonTails<T> poisson_tails<T>(int, T);           \
  template T tail_ratio<T>(int, T);                            \
  template T solve_lambda<T>(T, int);                          \
  template InitialConditions<T> initial_conditions<T>(T, int);

HYPERORIENT_INSTANTIATE(double)
HYPERORIENT_INSTANTIATE(long double)

#undef HYPERORIENT_INSTANTIATE

}  // namespace hyperorient
