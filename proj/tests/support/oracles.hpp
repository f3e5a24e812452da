#pragma once

// Independent reference implementations used to check the library. They
// follow the textbook definitions literally and make no attempt at speed.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "kinexch/rng.hpp"

namespace oracle {

inline double at(std::span<const double> v, std::size_t n) { return n < v.size() ? v[n] : 0.0; }

/// sum_{i,j} |S_i - S_j| / (2 N^2 mu), double loop in exact integers.
inline double gini_pairs(std::span<const std::int64_t> s) {
  std::int64_t pairs = 0, total = 0;
  for (std::int64_t a : s) {
    total += a;
    for (std::int64_t b : s) pairs += a > b ? a - b : b - a;
  }
  const auto n = static_cast<double>(s.size());
  const double mu = static_cast<double>(total) / n;
  return static_cast<double>(pairs) / (2.0 * n * n * mu);
}

/// (1 / 2 mu) sum_{i,j} |i - j| p_i p_j.
inline double gini_pmf_pairs(std::span<const double> p) {
  long double mean = 0.0L, acc = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) mean += static_cast<long double>(i) * p[i];
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      const long double d = i > j ? static_cast<long double>(i - j) : static_cast<long double>(j - i);
      acc += d * p[i] * p[j];
    }
  }
  return static_cast<double>(acc / (2.0L * mean));
}

/// Collision operators written out term by term with p_{n_max+1} = 0.
inline std::vector<double> q_unbias(std::span<const double> p) {
  const double rbar = 1.0 - p[0];
  std::vector<double> q(p.size());
  q[0] = at(p, 1) - rbar * p[0];
  for (std::size_t n = 1; n < p.size(); ++n) q[n] = at(p, n + 1) + rbar * p[n - 1] - (1.0 + rbar) * p[n];
  return q;
}

inline std::vector<double> q_poor(std::span<const double> p, double mu) {
  std::vector<double> q(p.size());
  q[0] = at(p, 1) - mu * p[0];
  for (std::size_t n = 1; n < p.size(); ++n) {
    const auto nd = static_cast<double>(n);
    q[n] = (nd + 1.0) * at(p, n + 1) + mu * p[n - 1] - (nd + mu) * p[n];
  }
  return q;
}

inline std::vector<double> q_rich(std::span<const double> p) {
  double w = 0.0;
  for (std::size_t n = 1; n < p.size(); ++n) w += p[n] / static_cast<double>(n);
  std::vector<double> q(p.size());
  q[0] = at(p, 1) - w * p[0];
  for (std::size_t n = 1; n < p.size(); ++n) {
    const auto nd = static_cast<double>(n);
    q[n] = at(p, n + 1) / (nd + 1.0) + w * p[n - 1] - (1.0 / nd + w) * p[n];
  }
  return q;
}

/// mu^n e^{-mu} / n! by the recurrence p_{n} = p_{n-1} mu / n (no renormalization).
inline std::vector<double> poisson(double mu, std::size_t n_max) {
  std::vector<double> p(n_max + 1);
  p[0] = std::exp(-mu);
  for (std::size_t n = 1; n <= n_max; ++n) p[n] = p[n - 1] * mu / static_cast<double>(n);
  return p;
}

/// Random pmf on {0..n_max}, supported on {0..support} with i.i.d. U(0,1) weights.
inline std::vector<double> random_pmf(kinexch::Rng& rng, std::size_t n_max, std::size_t support) {
  std::vector<double> p(n_max + 1, 0.0);
  double sum = 0.0;
  for (std::size_t n = 0; n <= support; ++n) sum += (p[n] = rng.uniform() + 1e-3);
  for (double& v : p) v /= sum;
  return p;
}

/// Random pmf on {0..hi} with mean exactly `mean` (up to rounding): a random
/// pmf mixed with a point mass on the far side of the target mean.
inline std::vector<double> random_pmf_with_mean(kinexch::Rng& rng, std::size_t hi, double mean) {
  std::vector<double> p = random_pmf(rng, hi, hi);
  double m = 0.0;
  for (std::size_t n = 0; n <= hi; ++n) m += static_cast<double>(n) * p[n];
  const double h = static_cast<double>(hi);
  if (m > mean) {
    const double a = mean / m;
    for (double& v : p) v *= a;
    p[0] += 1.0 - a;
  } else {
    const double a = (h - mean) / (h - m);
    for (double& v : p) v *= a;
    p[hi] += 1.0 - a;
  }
  return p;
}

inline double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

inline double first_moment(std::span<const double> v) {
  double m = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) m += static_cast<double>(n) * v[n];
  return m;
}

}  // namespace oracle
