#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kinexch/types.hpp"

namespace kinexch::analysis {

/// G = sum_ij |S_i - S_j| / (2 N^2 mu), in O(N log N). Throws InvalidArgument
/// for fewer than two agents or zero total wealth.
double gini_samples(std::span<const Dollars> wealth);
double gini_samples(const WealthVector& state);

/// G = (1 / 2mu) sum_ij |i - j| p_i p_j with mu the pmf mean, in O(n_max).
/// Throws InvalidArgument when the mean is zero.
double gini_pmf(std::span<const double> p);
double gini_pmf(const Pmf& p);

/// H = sum p_n log p_n (no minus sign), 0 log 0 = 0.
double entropy(std::span<const double> p);

struct KlDivergence {
  double value = 0.0;          ///< +infinity when the support condition fails
  bool support_ok = true;      ///< false iff some p_n > 0 has q_n = 0
};

/// sum p_n log(p_n / q_n). Shorter vectors are zero-padded.
KlDivergence kl_divergence(std::span<const double> p, std::span<const double> q);

/// Weighted inner product sum p_n q_n / w_n. Entries with w_n = 0 are skipped
/// when p_n q_n is not a normal number; otherwise InvalidArgument.
double h0_inner(std::span<const double> p, std::span<const double> q, std::span<const double> pstar);

/// sqrt(sum (p_n - q_n)^2 / pstar_n). Entries with pstar_n = 0 are skipped
/// when p_n - q_n is zero or subnormal; otherwise InvalidArgument.
double h0_distance(std::span<const double> p, std::span<const double> q, std::span<const double> pstar);

/// sqrt(sum_n pstar_n (p_{n+1}/pstar_{n+1} - p_n/pstar_n)^2) over the
/// truncated range.
double h1_norm(std::span<const double> p, std::span<const double> pstar);

/// sum |p_n - q_n| with zero padding.
double l1_distance(std::span<const double> p, std::span<const double> q);

/// Two-component decomposition (1 - r) delta_0 + r Normal(c, sigma).
struct WaveFit {
  double r = 0.0;
  double c = 0.0;
  double sigma = 0.0;
  std::size_t n_cut = 1;
  double residual = 0.0;    ///< l1 distance between p and the reconstruction
  bool degenerate = false;  ///< no separable wave (vanished or not yet formed)
  std::string reason;
};

WaveFit wave_decompose(std::span<const double> p);

/// (1 - r) delta_0 + r phi((n - c)/sigma)/sigma sampled on {0..n_max}.
std::vector<double> wave_profile(const WaveFit& fit, std::size_t n_max);

struct PowerLawFit {
  double amplitude = 0.0;
  double exponent = 0.0;
  double r_squared = 0.0;
};

/// Least squares of log(values) on log(times): values ~ amplitude * t^exponent.
/// Requires >= 5 points, all strictly positive.
PowerLawFit fit_power_law(std::span<const double> times, std::span<const double> values);

struct ExponentialFit {
  double amplitude = 0.0;
  double rate = 0.0;  ///< values ~ amplitude * exp(-rate t)
  double r_squared = 0.0;
};

/// Least squares of log(values) on t. Requires >= 3 points, values > 0.
ExponentialFit fit_exponential_decay(std::span<const double> times, std::span<const double> values);

/// G ~ 1 - mu/c + mu sigma / (sqrt(pi) c^2). Requires c > 0.
double gini_wave_approx(double mu, double c, double sigma);

}  // namespace kinexch::analysis
