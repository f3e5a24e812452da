#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kinexch/rng.hpp"
#include "kinexch/types.hpp"

namespace kinexch::chaos {

struct EmpiricalOptions {
  std::size_t replicas = 100;
  unsigned jobs = 0;  ///< 0: one worker per hardware thread
  /// Step of the reference ODE; its error must stay far below the
  /// Monte-Carlo error.
  double ode_dt = 1e-3;
  /// Truncation of the reference ODE; 0 picks the meanfield default.
  std::size_t n_max = 0;
};

/// E || p_emp(t) - p(t) ||_1 at one N.
struct ScalingEntry {
  std::int64_t n_agents = 0;
  double t = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;  ///< replica standard deviation / sqrt(replicas)
  std::size_t replicas = 0;
  std::size_t absorbed = 0;  ///< replicas that hit an absorbing state before t
};

struct ScalingReport {
  Model model = Model::RichBiased;
  double t = 0.0;
  std::vector<ScalingEntry> entries;  ///< increasing n_agents
  /// Least-squares slope of log(mean_error) on log(n_agents); NaN with
  /// fewer than two positive entries.
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Runs `replicas` ABM simulations from the all-equal state and compares
/// the empirical measure at time t with the limit equation started at the
/// Dirac mass at mu. Replica r uses seed derive_seed(params.seed, r).
ScalingEntry empirical_vs_ode(const ModelParams& params, double t, const EmpiricalOptions& options = {});

/// empirical_vs_ode over increasing N. The seed for each N is derived from
/// (params.seed, N) so entries are independent.
ScalingReport scaling_scan(const ModelParams& params, std::span<const std::int64_t> n_values, double t,
                           const EmpiricalOptions& options = {});

struct BernoulliPair {
  bool x = false;
  bool y = false;
};

/// Monotone coupling of Bernoulli(p) and Bernoulli(q) through one uniform:
/// x = 1[u < p], y = 1[u < q], so P(x != y) = |p - q|.
BernoulliPair bernoulli_couple(double p, double q, double u);

/// r_bar(t) = 1 - p_0(t) of the unbiased limit equation started at delta_mu,
/// tabulated on a uniform grid and interpolated linearly.
class RichFraction {
 public:
  RichFraction(double lambda, Dollars mu, double t_end, double dt = 1e-3);
  double operator()(double t) const;
  double t_end() const noexcept { return t_end_; }

 private:
  double dt_;
  double t_end_;
  std::vector<double> values_;
};

/// The N-agent unbiased economy driven by one master clock of rate lambda N,
/// together with k limit processes S_bar_1..S_bar_k coupled to agents 1..k.
///
/// Each master event draws U ~ U[0,1). The giver is a uniform rich agent if
/// U < r (rich fraction of the N system) and a uniform poor agent otherwise;
/// the receiver is uniform over all N. The limit process of a tagged giver
/// shares the give event when the receiver is untagged, and that of a tagged
/// receiver receives 1[U < r_bar(t)] when the giver is untagged. Pairs of
/// tagged agents are replaced by independent give and receive clocks of
/// rate lambda k / N per tagged agent, with fresh Bernoulli(r_bar) draws.
class CoupledUnbiased {
 public:
  CoupledUnbiased(const ModelParams& params, std::size_t k, const RichFraction& rbar);

  /// Executes every event with time <= t.
  void advance_to(double t);

  const WealthVector& particles() const noexcept { return state_; }
  std::span<const Dollars> limit() const noexcept { return limit_; }
  double time() const noexcept { return t_; }
  std::uint64_t events() const noexcept { return events_; }

  /// Mean over the k tagged agents of |S_i - S_bar_i|.
  double mean_abs_diff() const;

 private:
  void master_event(double t);
  void extra_event(double t);
  void set_rich(std::size_t agent, bool rich);

  ModelParams params_;
  std::size_t k_;
  const RichFraction* rbar_;
  WealthVector state_;
  std::vector<Dollars> limit_;
  // agents split into rich (S >= 1) and poor lists with positions for O(1) moves
  std::vector<std::size_t> rich_, poor_, pos_;
  std::vector<bool> is_rich_;
  Rng rng_;
  double master_rate_;
  double extra_rate_;
  double next_master_;
  double next_extra_;
  double t_ = 0.0;
  std::uint64_t events_ = 0;
};

struct CouplingOptions {
  std::size_t replicas = 100;
  unsigned jobs = 0;
  /// Observation times in [0, t_end]; empty gives 11 evenly spaced times.
  std::vector<double> times;
  double ode_dt = 1e-3;
};

struct CouplingTrace {
  std::int64_t n_agents = 0;
  std::size_t k = 0;
  std::vector<double> t;
  std::vector<double> mean_abs_diff;  ///< replica mean of the per-agent mean |S_i - S_bar_i|
  std::vector<double> std_error;
  std::vector<double> bound;
  /// Terminal Gini of the N-agent component of each replica.
  std::vector<double> terminal_gini;

  /// The bound holds for the expectation, so it is compared with the lower
  /// end of the 95% interval: mean - 1.96 se <= bound at every time.
  bool within_bound() const;
};

/// Replica r uses seed derive_seed(params.seed, r). Requires 1 <= k <= N.
CouplingTrace coupled_unbiased_run(const ModelParams& params, std::size_t k, double t_end,
                                   const CouplingOptions& options = {});

/// C(t)/sqrt(N) (e^{lambda t} - 1)/lambda + 4 lambda (k - 1) t / N with
/// C(t) = sqrt(1/4 + 4 lambda t) + 2 lambda / sqrt(N).
double poc_bound(double lambda, std::int64_t n_agents, std::size_t k, double t);

}  // namespace kinexch::chaos
