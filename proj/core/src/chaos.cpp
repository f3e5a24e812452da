#include "kinexch/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kinexch/abm.hpp"
#include "kinexch/analysis.hpp"
#include "kinexch/errors.hpp"
#include "kinexch/meanfield.hpp"
#include "kinexch/parallel.hpp"

namespace kinexch::chaos {
namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> xs) {
  MeanSe out;
  const auto n = static_cast<double>(xs.size());
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

Pmf reference_pmf(const ModelParams& params, double t, const EmpiricalOptions& options) {
  const auto mu = static_cast<std::size_t>(params.mu);
  meanfield::OdeConfig cfg;
  cfg.dt = options.ode_dt;
  cfg.t_end = t;
  cfg.n_max = options.n_max ? options.n_max : meanfield::default_n_max(static_cast<double>(params.mu));
  const auto gen = meanfield::Generator::for_model(params.model, params.lambda, static_cast<double>(params.mu));
  meanfield::Integrator integrator(gen, dirac_pmf(mu, cfg.n_max), cfg);
  integrator.advance_to(t);
  return integrator.pmf();
}

}  // namespace

ScalingEntry empirical_vs_ode(const ModelParams& params, double t, const EmpiricalOptions& options) {
  params.validate();
  if (!(t >= 0.0)) throw InvalidArgument("empirical_vs_ode: t must be >= 0");
  if (options.replicas < 1) throw InvalidArgument("empirical_vs_ode: need at least one replica");
  const Pmf reference = reference_pmf(params, t, options);

  std::vector<double> errors(options.replicas);
  std::vector<char> absorbed(options.replicas, 0);
  parallel_for(options.replicas, options.jobs, [&](std::size_t r) {
    ModelParams p = params;
    p.seed = derive_seed(params.seed, r);
    abm::Engine engine(p);
    absorbed[r] = engine.advance_to(t) ? 0 : 1;
    const WealthVector& s = engine.state();
    const std::size_t n_max = std::max(reference.n_max(), static_cast<std::size_t>(s.max()));
    errors[r] = analysis::l1_distance(empirical_pmf(s, n_max).probs(), reference.probs());
  });

  ScalingEntry entry;
  entry.n_agents = params.n_agents;
  entry.t = t;
  entry.replicas = options.replicas;
  entry.absorbed = static_cast<std::size_t>(std::count(absorbed.begin(), absorbed.end(), 1));
  const MeanSe stats = mean_and_se(errors);
  entry.mean_error = stats.mean;
  entry.std_error = stats.se;
  return entry;
}

ScalingReport scaling_scan(const ModelParams& params, std::span<const std::int64_t> n_values, double t,
                           const EmpiricalOptions& options) {
  if (!std::is_sorted(n_values.begin(), n_values.end()) ||
      std::adjacent_find(n_values.begin(), n_values.end()) != n_values.end()) {
    throw InvalidArgument("scaling_scan: N values must be strictly increasing");
  }
  ScalingReport report;
  report.model = params.model;
  report.t = t;
  for (std::int64_t n : n_values) {
    ModelParams p = params;
    p.n_agents = n;
    p.seed = derive_seed(params.seed, static_cast<std::uint64_t>(n));
    report.entries.push_back(empirical_vs_ode(p, t, options));
  }

  std::vector<double> lx, ly;
  for (const auto& e : report.entries) {
    if (e.mean_error > 0.0) {
      lx.push_back(std::log(static_cast<double>(e.n_agents)));
      ly.push_back(std::log(e.mean_error));
    }
  }
  if (lx.size() < 2) {
    report.slope = std::numeric_limits<double>::quiet_NaN();
    return report;
  }
  const auto m = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / m;
    my += ly[i] / m;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  report.slope = sxy / sxx;
  report.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return report;
}

BernoulliPair bernoulli_couple(double p, double q, double u) {
  if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0 && u >= 0.0 && u <= 1.0)) {
    throw InvalidArgument("bernoulli_couple: p, q, u must lie in [0, 1]");
  }
  return {u < p, u < q};
}

RichFraction::RichFraction(double lambda, Dollars mu, double t_end, double dt) : dt_(dt), t_end_(t_end) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw InvalidArgument("RichFraction: need dt > 0 and t_end >= 0");
  if (mu < 1) throw InvalidArgument("RichFraction: mu must be >= 1");
  meanfield::OdeConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.n_max = meanfield::default_n_max(static_cast<double>(mu));
  meanfield::Integrator integrator(meanfield::Generator::unbiased(lambda),
                                   dirac_pmf(static_cast<std::size_t>(mu), cfg.n_max), cfg);
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt));
  values_.reserve(steps + 1);
  values_.push_back(1.0 - integrator.state()[0]);
  for (std::size_t s = 0; s < steps; ++s) {
    integrator.step();
    values_.push_back(1.0 - integrator.state()[0]);
  }
}

double RichFraction::operator()(double t) const {
  if (t <= 0.0) return values_.front();
  const double x = t / dt_;
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= values_.size()) {
    if (t > t_end_ + dt_) throw RangeError("RichFraction: t beyond the tabulated horizon");
    return values_.back();
  }
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

CoupledUnbiased::CoupledUnbiased(const ModelParams& params, std::size_t k, const RichFraction& rbar)
    : params_(params),
      k_(k),
      rbar_(&rbar),
      state_(WealthVector::uniform(static_cast<std::size_t>(params.n_agents), params.mu)),
      limit_(k, params.mu),
      rng_(params.seed) {
  params_.validate();
  if (params_.model != Model::Unbiased) throw InvalidArgument("CoupledUnbiased: model must be unbiased");
  const auto n = static_cast<std::size_t>(params_.n_agents);
  if (k < 1 || k > n) throw InvalidArgument("CoupledUnbiased: need 1 <= k <= N");
  pos_.assign(n, 0);
  is_rich_.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    pos_[i] = poor_.size();
    poor_.push_back(i);
    set_rich(i, state_[i] >= 1);
  }
  const auto nd = static_cast<double>(n);
  const auto kd = static_cast<double>(k);
  master_rate_ = params_.lambda * nd;
  extra_rate_ = 2.0 * params_.lambda * kd * kd / nd;
  next_master_ = rng_.exponential(master_rate_);
  next_extra_ = rng_.exponential(extra_rate_);
}

void CoupledUnbiased::set_rich(std::size_t agent, bool rich) {
  if (is_rich_[agent] == rich) return;
  auto& from = rich ? poor_ : rich_;
  auto& to = rich ? rich_ : poor_;
  const std::size_t p = pos_[agent];
  const std::size_t last = from.back();
  from[p] = last;
  pos_[last] = p;
  from.pop_back();
  pos_[agent] = to.size();
  to.push_back(agent);
  is_rich_[agent] = rich;
}

void CoupledUnbiased::master_event(double t) {
  const auto n = state_.size();
  const double u = rng_.uniform();
  const double r = static_cast<double>(rich_.size()) / static_cast<double>(n);
  const std::size_t giver = u < r ? rich_[rng_.index(rich_.size())] : poor_[rng_.index(poor_.size())];
  const auto receiver = static_cast<std::size_t>(rng_.index(n));

  if (giver != receiver && state_[giver] >= 1) {
    state_.transfer(giver, receiver);
    set_rich(giver, state_[giver] >= 1);
    set_rich(receiver, true);
  }

  const bool giver_tagged = giver < k_;
  const bool receiver_tagged = receiver < k_;
  if (giver_tagged && !receiver_tagged) {
    if (limit_[giver] >= 1) --limit_[giver];
  } else if (receiver_tagged && !giver_tagged) {
    if (u < (*rbar_)(t)) ++limit_[receiver];
  }
}

void CoupledUnbiased::extra_event(double t) {
  const std::size_t clock = rng_.index(2 * k_);
  const std::size_t agent = clock / 2;
  if (clock % 2 == 0) {
    if (limit_[agent] >= 1) --limit_[agent];
  } else if (rng_.uniform() < (*rbar_)(t)) {
    ++limit_[agent];
  }
}

void CoupledUnbiased::advance_to(double t) {
  for (;;) {
    const double next = std::min(next_master_, next_extra_);
    if (next > t) break;
    if (next_master_ <= next_extra_) {
      master_event(next);
      next_master_ += rng_.exponential(master_rate_);
    } else {
      extra_event(next);
      next_extra_ += rng_.exponential(extra_rate_);
    }
    ++events_;
  }
  t_ = std::max(t_, t);
}

double CoupledUnbiased::mean_abs_diff() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < k_; ++i) acc += static_cast<double>(std::llabs(state_[i] - limit_[i]));
  return acc / static_cast<double>(k_);
}

bool CouplingTrace::within_bound() const {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (mean_abs_diff[i] - 1.96 * std_error[i] > bound[i]) return false;
  }
  return true;
}

CouplingTrace coupled_unbiased_run(const ModelParams& params, std::size_t k, double t_end,
                                   const CouplingOptions& options) {
  params.validate();
  if (!(t_end >= 0.0)) throw InvalidArgument("coupled_unbiased_run: t_end must be >= 0");
  if (options.replicas < 1) throw InvalidArgument("coupled_unbiased_run: need at least one replica");
  std::vector<double> times = options.times;
  if (times.empty()) {
    for (int i = 0; i <= 10; ++i) times.push_back(t_end * i / 10.0);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.front() < 0.0 || times.back() > t_end) {
    throw InvalidArgument("coupled_unbiased_run: observation time outside [0, t_end]");
  }

  const RichFraction rbar(params.lambda, params.mu, t_end, options.ode_dt);
  std::vector<std::vector<double>> diffs(options.replicas, std::vector<double>(times.size()));
  std::vector<double> gini(options.replicas);
  parallel_for(options.replicas, options.jobs, [&](std::size_t r) {
    ModelParams p = params;
    p.seed = derive_seed(params.seed, r);
    CoupledUnbiased sim(p, k, rbar);
    for (std::size_t i = 0; i < times.size(); ++i) {
      sim.advance_to(times[i]);
      diffs[r][i] = sim.mean_abs_diff();
    }
    sim.advance_to(t_end);
    gini[r] = analysis::gini_samples(sim.particles());
  });

  CouplingTrace trace;
  trace.n_agents = params.n_agents;
  trace.k = k;
  trace.t = times;
  trace.terminal_gini = std::move(gini);
  std::vector<double> column(options.replicas);
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t r = 0; r < options.replicas; ++r) column[r] = diffs[r][i];
    const MeanSe stats = mean_and_se(column);
    trace.mean_abs_diff.push_back(stats.mean);
    trace.std_error.push_back(stats.se);
    trace.bound.push_back(poc_bound(params.lambda, params.n_agents, k, times[i]));
  }
  return trace;
}

double poc_bound(double lambda, std::int64_t n_agents, std::size_t k, double t) {
  const auto n = static_cast<double>(n_agents);
  const double c = std::sqrt(0.25 + 4.0 * lambda * t) + 2.0 * lambda / std::sqrt(n);
  return c / std::sqrt(n) * std::expm1(lambda * t) / lambda +
         4.0 * lambda * (static_cast<double>(k) - 1.0) * t / n;
}

}  // namespace kinexch::chaos
