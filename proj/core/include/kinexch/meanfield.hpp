#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "kinexch/types.hpp"

namespace kinexch::meanfield {

/// Collision operators of the limit master equations, truncated at the
/// input length (p_{n_max + 1} = 0). These are the rates without the
/// lambda factor.
std::vector<double> q_unbias(std::span<const double> p);
std::vector<double> q_poor(std::span<const double> p, double mu);
std::vector<double> q_rich(std::span<const double> p);

/// lambda * Q_model as a linear-or-nonlinear map on truncated vectors.
///
/// The truncated operator equals the untruncated one restricted to
/// {0..n_max}; the only discrepancy is the flux from n_max to n_max + 1,
/// which `apply` returns so callers can account for it:
///   sum_n out_n = -flux,   sum_n n out_n = -(n_max + 1) flux.
class Generator {
 public:
  static Generator unbiased(double lambda = 1.0);
  /// `mu` is the conserved mean fixed by the initial condition.
  static Generator poor_biased(double mu, double lambda = 1.0);
  static Generator rich_biased(double lambda = 1.0);
  /// Poor-biased takes mu from `mean`; the others ignore it.
  static Generator for_model(Model model, double lambda, double mean);

  Model model() const noexcept { return model_; }
  double lambda() const noexcept { return lambda_; }
  double mu() const noexcept { return mu_; }

  /// out = lambda * Q[p]; returns the outflow rate past n_max.
  double apply(std::span<const double> p, std::span<double> out) const;
  std::vector<double> operator()(std::span<const double> p) const;

 private:
  Generator(Model model, double lambda, double mu) : model_(model), lambda_(lambda), mu_(mu) {}
  Model model_;
  double lambda_;
  double mu_;
};

struct OdeConfig {
  double dt = 0.01;
  double t_end = 1.0;
  /// Truncation bound; 0 keeps the length of the initial pmf.
  std::size_t n_max = 0;
  /// Abort once the accumulated outflow past n_max exceeds this.
  double mass_leak_tol = 1e-8;
  /// Abort once |mean(p) - mean(p0)| exceeds this (after leak accounting).
  double mean_drift_tol = 1e-6;
  /// After each step, entries beyond the last index with |p_n| >= tail_floor
  /// are set to zero and counted as leak. Explicit RK4 is unstable on the
  /// high-n modes of the poor-biased operator (spectral radius ~ n_max), and
  /// those modes are only ever excited through tail values of order 1e-250;
  /// cutting them keeps the active window inside the stability region.
  /// 0 disables the cut.
  double tail_floor = 1e-200;
  /// Times at which observers (and optionally pmfs) are recorded; each is
  /// snapped to the nearest step. Empty records t = 0 and t = t_end.
  std::vector<double> record_times;
  bool keep_pmfs = false;

  void validate() const;
};

/// max(1000, 20 mu)
std::size_t default_n_max(double mu);

struct Observer {
  std::string name;
  std::function<double(const Pmf&)> fn;
};

/// Classic fixed-step RK4 on dp/dt = lambda Q[p].
class Integrator {
 public:
  Integrator(Generator generator, const Pmf& p0, OdeConfig cfg);

  /// Advances one step, checking the leak and negativity invariants.
  void step();
  /// Steps until step index k = round(t / dt).
  void advance_to(double t);

  double time() const noexcept { return static_cast<double>(steps_) * cfg_.dt; }
  std::size_t steps() const noexcept { return steps_; }
  std::span<const double> state() const noexcept { return p_; }
  /// Accumulated mass that left through n_max.
  double leak() const noexcept { return leak_; }
  /// Pmf view of the current state (tolerates the tracked leak).
  Pmf pmf() const;

 private:
  void check() const;
  void cut_tail();

  Generator gen_;
  OdeConfig cfg_;
  std::vector<double> p_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
  double mean0_ = 0.0;
  double leak_ = 0.0;
  std::size_t steps_ = 0;
};

/// Integrates from p0 and records observers at cfg.record_times.
TrajectoryRecord integrate(const Generator& generator, const Pmf& p0, const OdeConfig& cfg,
                           const std::vector<Observer>& observers = {});

/// p*_n = p0 (1 - p0)^n, p0 = 1/(1 + mu), renormalized on {0..n_max}.
Pmf geometric_equilibrium(double mu, std::size_t n_max);

/// p*_n = mu^n e^{-mu} / n!, renormalized on {0..n_max}; mu = 0 gives delta_0.
Pmf poisson_equilibrium(double mu, std::size_t n_max);

/// Equilibrium of the unbiased or poor-biased limit equation.
Pmf equilibrium(Model model, double mu, std::size_t n_max);

struct Eigenpairs {
  std::vector<double> values;                ///< ascending
  std::vector<std::vector<double>> vectors;  ///< in pmf coordinates, H0-normalized
};

/// k smallest eigenvalues of -Q_poor on {0..n_max}, from the symmetric
/// similarity transform diag(p*)^{-1/2} (-Q_poor) diag(p*)^{1/2}.
/// Requires 1 <= k <= 50 <= n_max.
std::vector<double> poor_spectrum(double mu, std::size_t n_max, std::size_t k);
Eigenpairs poor_eigenpairs(double mu, std::size_t n_max, std::size_t k);

/// Closed-form eigenfunction of -Q_poor for eigenvalue k - 1:
/// p^(k)_n = sum_{j=0}^{min(n,k-1)} C(k-1, j) (-1)^j mu^{n-j} e^{-mu} / (n-j)!.
std::vector<double> poor_eigenfunction(std::size_t k, double mu, std::size_t n_max);

}  // namespace kinexch::meanfield
