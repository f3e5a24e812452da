#include "kinexch/meanfield.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "kinexch/errors.hpp"

namespace kinexch::meanfield {
namespace {

double at(std::span<const double> v, std::size_t n) { return n < v.size() ? v[n] : 0.0; }

// Shared three-term recurrence: out_n = down_{n+1} p_{n+1} + up p_{n-1} - (down_n + up) p_n,
// where down_n is the per-unit rate of leaving n downwards and `up` the
// receiving rate. Returns the flux up * p_{n_max} leaving the range.
template <typename Down>
double birth_death(std::span<const double> p, std::span<double> out, double up, Down down, double scale) {
  const std::size_t size = p.size();
  for (std::size_t n = 0; n < size; ++n) {
    const double gain_from_above = n + 1 < size ? down(n + 1) * p[n + 1] : 0.0;
    const double gain_from_below = n > 0 ? up * p[n - 1] : 0.0;
    out[n] = scale * (gain_from_above + gain_from_below - (down(n) + up) * p[n]);
  }
  return scale * up * p[size - 1];
}

double unbias_rate(std::span<const double> p) { return 1.0 - at(p, 0); }

double harmonic_weight(std::span<const double> p) {
  double w = 0.0;
  for (std::size_t n = 1; n < p.size(); ++n) w += p[n] / static_cast<double>(n);
  return w;
}

double log_poisson(double mu, std::size_t n) {
  const auto nd = static_cast<double>(n);
  return nd * std::log(mu) - std::lgamma(nd + 1.0) - mu;
}

void require_nonempty(std::span<const double> p, const char* what) {
  if (p.empty()) throw InvalidArgument(std::string(what) + ": empty input");
}

}  // namespace

std::vector<double> q_unbias(std::span<const double> p) {
  require_nonempty(p, "q_unbias");
  return Generator::unbiased(1.0)(p);
}

std::vector<double> q_poor(std::span<const double> p, double mu) {
  require_nonempty(p, "q_poor");
  return Generator::poor_biased(mu, 1.0)(p);
}

std::vector<double> q_rich(std::span<const double> p) {
  require_nonempty(p, "q_rich");
  return Generator::rich_biased(1.0)(p);
}

Generator Generator::unbiased(double lambda) { return Generator(Model::Unbiased, lambda, 0.0); }

Generator Generator::poor_biased(double mu, double lambda) {
  if (!(mu >= 0.0)) throw InvalidArgument("poor-biased generator: mu must be >= 0");
  return Generator(Model::PoorBiased, lambda, mu);
}

Generator Generator::rich_biased(double lambda) { return Generator(Model::RichBiased, lambda, 0.0); }

Generator Generator::for_model(Model model, double lambda, double mean) {
  switch (model) {
    case Model::Unbiased:
      return unbiased(lambda);
    case Model::PoorBiased:
      return poor_biased(mean, lambda);
    case Model::RichBiased:
      return rich_biased(lambda);
  }
  throw InvalidArgument("unknown model");
}

double Generator::apply(std::span<const double> p, std::span<double> out) const {
  if (p.empty() || out.size() != p.size()) throw InvalidArgument("Generator::apply: size mismatch");
  switch (model_) {
    case Model::Unbiased:
      return birth_death(p, out, unbias_rate(p), [](std::size_t n) { return n > 0 ? 1.0 : 0.0; }, lambda_);
    case Model::PoorBiased:
      return birth_death(p, out, mu_, [](std::size_t n) { return static_cast<double>(n); }, lambda_);
    case Model::RichBiased:
      return birth_death(
          p, out, harmonic_weight(p),
          [](std::size_t n) { return n > 0 ? 1.0 / static_cast<double>(n) : 0.0; }, lambda_);
  }
  return 0.0;
}

std::vector<double> Generator::operator()(std::span<const double> p) const {
  std::vector<double> out(p.size());
  apply(p, out);
  return out;
}

void OdeConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("OdeConfig: dt must be > 0");
  if (!(t_end >= 0.0)) throw InvalidArgument("OdeConfig: t_end must be >= 0");
  if (!(mass_leak_tol >= 0.0)) throw InvalidArgument("OdeConfig: mass_leak_tol must be >= 0");
  if (!(tail_floor >= 0.0 && tail_floor < 1e-100)) {
    throw InvalidArgument("OdeConfig: tail_floor must lie in [0, 1e-100)");
  }
  for (double t : record_times) {
    if (t < 0.0 || t > t_end + 0.5 * dt) throw InvalidArgument("OdeConfig: record time outside [0, t_end]");
  }
}

std::size_t default_n_max(double mu) {
  return std::max<std::size_t>(1000, static_cast<std::size_t>(std::ceil(20.0 * mu)));
}

Integrator::Integrator(Generator generator, const Pmf& p0, OdeConfig cfg)
    : gen_(generator), cfg_(std::move(cfg)) {
  cfg_.validate();
  const std::size_t n_max = cfg_.n_max ? cfg_.n_max : p0.n_max();
  if (n_max < p0.n_max()) {
    throw TruncationError("Integrator: n_max is smaller than the support of the initial pmf");
  }
  p_.assign(p0.probs().begin(), p0.probs().end());
  p_.resize(n_max + 1, 0.0);
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->assign(p_.size(), 0.0);
  mean0_ = p0.mean();
}

void Integrator::step() {
  const double h = cfg_.dt;
  const std::size_t size = p_.size();
  const double f1 = gen_.apply(p_, k1_);
  for (std::size_t n = 0; n < size; ++n) tmp_[n] = p_[n] + 0.5 * h * k1_[n];
  const double f2 = gen_.apply(tmp_, k2_);
  for (std::size_t n = 0; n < size; ++n) tmp_[n] = p_[n] + 0.5 * h * k2_[n];
  const double f3 = gen_.apply(tmp_, k3_);
  for (std::size_t n = 0; n < size; ++n) tmp_[n] = p_[n] + h * k3_[n];
  const double f4 = gen_.apply(tmp_, k4_);
  for (std::size_t n = 0; n < size; ++n) {
    p_[n] += h / 6.0 * (k1_[n] + 2.0 * k2_[n] + 2.0 * k3_[n] + k4_[n]);
  }
  leak_ += h / 6.0 * (f1 + 2.0 * f2 + 2.0 * f3 + f4);
  cut_tail();
  ++steps_;
  check();
}

void Integrator::cut_tail() {
  if (!(cfg_.tail_floor > 0.0)) return;
  std::size_t n = p_.size();
  while (n > 0 && std::abs(p_[n - 1]) < cfg_.tail_floor) --n;
  for (std::size_t m = n; m < p_.size(); ++m) {
    leak_ += std::max(0.0, p_[m]);
    p_[m] = 0.0;
  }
}

void Integrator::check() const {
  if (leak_ > cfg_.mass_leak_tol) {
    throw IntegrationError("mass leaked past n_max = " + std::to_string(p_.size() - 1) + " reached " +
                           std::to_string(leak_) + " at t = " + std::to_string(time()) +
                           "; enlarge n_max");
  }
  double mean = 0.0;
  for (std::size_t n = 0; n < p_.size(); ++n) {
    if (!(p_[n] >= -Pmf::kNegativeTolerance)) {
      throw IntegrationError("negative probability p_" + std::to_string(n) + " = " +
                             std::to_string(p_[n]) + " at t = " + std::to_string(time()) +
                             "; reduce dt");
    }
    mean += static_cast<double>(n) * p_[n];
  }
  mean += static_cast<double>(p_.size()) * leak_;
  if (std::abs(mean - mean0_) > cfg_.mean_drift_tol) {
    throw IntegrationError("mean drifted from " + std::to_string(mean0_) + " to " + std::to_string(mean) +
                           " at t = " + std::to_string(time()));
  }
}

void Integrator::advance_to(double t) {
  const auto target = static_cast<std::size_t>(std::llround(t / cfg_.dt));
  while (steps_ < target) step();
}

Pmf Integrator::pmf() const { return Pmf(p_, leak_ + Pmf::kSumTolerance); }

TrajectoryRecord integrate(const Generator& generator, const Pmf& p0, const OdeConfig& cfg,
                           const std::vector<Observer>& observers) {
  cfg.validate();
  std::vector<std::size_t> record_steps;
  auto to_step = [&](double t) { return static_cast<std::size_t>(std::llround(t / cfg.dt)); };
  if (cfg.record_times.empty()) {
    record_steps = {0, to_step(cfg.t_end)};
  } else {
    for (double t : cfg.record_times) record_steps.push_back(to_step(t));
  }
  std::sort(record_steps.begin(), record_steps.end());
  record_steps.erase(std::unique(record_steps.begin(), record_steps.end()), record_steps.end());

  std::vector<std::string> names = {"mass", "mean", "leak"};
  for (const auto& obs : observers) names.push_back(obs.name);
  TrajectoryRecord record(std::move(names));

  Integrator integrator(generator, p0, cfg);
  for (std::size_t s : record_steps) {
    while (integrator.steps() < s) integrator.step();
    const Pmf p = integrator.pmf();
    std::vector<double> row = {p.sum(), p.mean(), integrator.leak()};
    for (const auto& obs : observers) row.push_back(obs.fn(p));
    record.append(integrator.time(), std::move(row),
                  cfg.keep_pmfs ? std::optional<Pmf>(p) : std::nullopt);
  }
  return record;
}

Pmf geometric_equilibrium(double mu, std::size_t n_max) {
  if (!(mu >= 0.0)) throw InvalidArgument("geometric_equilibrium: mu must be >= 0");
  const double p0 = 1.0 / (1.0 + mu);
  const double q = 1.0 - p0;
  std::vector<double> p(n_max + 1);
  double term = p0, sum = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    p[n] = term;
    sum += term;
    term *= q;
  }
  for (double& v : p) v /= sum;
  return Pmf(std::move(p));
}

Pmf poisson_equilibrium(double mu, std::size_t n_max) {
  if (!(mu >= 0.0)) throw InvalidArgument("poisson_equilibrium: mu must be >= 0");
  if (mu == 0.0) return dirac_pmf(0, n_max);
  std::vector<double> p(n_max + 1);
  double sum = 0.0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    p[n] = std::exp(log_poisson(mu, n));
    sum += p[n];
  }
  for (double& v : p) v /= sum;
  return Pmf(std::move(p));
}

Pmf equilibrium(Model model, double mu, std::size_t n_max) {
  switch (model) {
    case Model::Unbiased:
      return geometric_equilibrium(mu, n_max);
    case Model::PoorBiased:
      return poisson_equilibrium(mu, n_max);
    case Model::RichBiased:
      break;
  }
  throw InvalidArgument("the rich-biased limit equation has no equilibrium with positive mean");
}

Eigenpairs poor_eigenpairs(double mu, std::size_t n_max, std::size_t k) {
  if (!(mu > 0.0)) throw InvalidArgument("poor_spectrum: mu must be > 0");
  if (k < 1 || k > 50 || n_max < 50) {
    throw InvalidArgument("poor_spectrum: requires 1 <= k <= 50 <= n_max");
  }
  const std::size_t size = n_max + 1;
  const Generator gen = Generator::poor_biased(mu, 1.0);

  // Dense -Q_poor, column by column.
  Eigen::MatrixXd minus_q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
  std::vector<double> unit(size, 0.0), column(size);
  for (std::size_t m = 0; m < size; ++m) {
    unit[m] = 1.0;
    gen.apply(unit, column);
    unit[m] = 0.0;
    for (std::size_t n = 0; n < size; ++n) {
      minus_q(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)) = -column[n];
    }
  }

  // Similarity by diag(p*)^{1/2}, with the ratios taken in log space since
  // p*_n underflows long before n_max.
  std::vector<double> half_log(size);
  for (std::size_t n = 0; n < size; ++n) half_log[n] = 0.5 * log_poisson(mu, n);
  Eigen::MatrixXd sym = minus_q;
  for (Eigen::Index n = 0; n < sym.rows(); ++n) {
    for (Eigen::Index m = 0; m < sym.cols(); ++m) {
      const double v = minus_q(n, m);
      if (v != 0.0) {
        sym(n, m) = v * std::exp(half_log[static_cast<std::size_t>(m)] - half_log[static_cast<std::size_t>(n)]);
      }
    }
  }
  const Eigen::MatrixXd symmetric = 0.5 * (sym + sym.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
  if (solver.info() != Eigen::Success) throw SolverError("poor_spectrum: eigensolver did not converge");

  Eigenpairs out;
  for (std::size_t i = 0; i < k; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    out.values.push_back(solver.eigenvalues()(col));
    std::vector<double> vec(size);
    for (std::size_t n = 0; n < size; ++n) {
      vec[n] = std::exp(half_log[n]) * solver.eigenvectors()(static_cast<Eigen::Index>(n), col);
    }
    const auto lead = std::find_if(vec.begin(), vec.end(), [](double v) { return std::abs(v) > 1e-12; });
    if (lead != vec.end() && *lead < 0.0) {
      for (double& v : vec) v = -v;
    }
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

std::vector<double> poor_spectrum(double mu, std::size_t n_max, std::size_t k) {
  return poor_eigenpairs(mu, n_max, k).values;
}

std::vector<double> poor_eigenfunction(std::size_t k, double mu, std::size_t n_max) {
  if (k < 1) throw InvalidArgument("poor_eigenfunction: k must be >= 1");
  if (!(mu >= 0.0)) throw InvalidArgument("poor_eigenfunction: mu must be >= 0");
  auto pstar = [mu](std::size_t m) {
    if (mu == 0.0) return m == 0 ? 1.0 : 0.0;
    return std::exp(log_poisson(mu, m));
  };
  std::vector<double> out(n_max + 1, 0.0);
  for (std::size_t n = 0; n <= n_max; ++n) {
    double binom = 1.0;  // C(k-1, j)
    double acc = 0.0;
    for (std::size_t j = 0; j <= std::min(n, k - 1); ++j) {
      if (j > 0) binom *= static_cast<double>(k - j) / static_cast<double>(j);
      acc += (j % 2 == 0 ? 1.0 : -1.0) * binom * pstar(n - j);
    }
    out[n] = acc;
  }
  return out;
}

}  // namespace kinexch::meanfield
