#include "kinexch/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kinexch/errors.hpp"

namespace kinexch {

std::string_view to_string(Model model) noexcept {
  switch (model) {
    case Model::Unbiased:
      return "unbiased";
    case Model::PoorBiased:
      return "poor-biased";
    case Model::RichBiased:
      return "rich-biased";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  if (name == "unbiased") return Model::Unbiased;
  if (name == "poor-biased" || name == "poor" || name == "poor_biased") return Model::PoorBiased;
  if (name == "rich-biased" || name == "rich" || name == "rich_biased") return Model::RichBiased;
  throw InvalidArgument("unknown model '" + std::string(name) +
                        "' (expected unbiased, poor-biased or rich-biased)");
}

WealthVector::WealthVector(std::vector<Dollars> dollars) : dollars_(std::move(dollars)) {
  for (std::size_t i = 0; i < dollars_.size(); ++i) {
    if (dollars_[i] < 0) {
      throw InvalidArgument("negative wealth at agent " + std::to_string(i));
    }
  }
  total_ = recount();
}

WealthVector WealthVector::uniform(std::size_t n_agents, Dollars mu) {
  return WealthVector(std::vector<Dollars>(n_agents, mu));
}

double WealthVector::mean() const noexcept {
  return dollars_.empty() ? 0.0 : static_cast<double>(total_) / static_cast<double>(dollars_.size());
}

Dollars WealthVector::max() const noexcept {
  return dollars_.empty() ? 0 : *std::max_element(dollars_.begin(), dollars_.end());
}

void WealthVector::transfer(std::size_t giver, std::size_t receiver) {
  if (dollars_.at(giver) < 1) {
    throw InvalidArgument("agent " + std::to_string(giver) + " has no dollar to give");
  }
  --dollars_[giver];
  ++dollars_.at(receiver);
}

Dollars WealthVector::recount() const noexcept {
  return std::accumulate(dollars_.begin(), dollars_.end(), Dollars{0});
}

Pmf::Pmf(std::vector<double> probs, double sum_tolerance) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidArgument("pmf must have at least one entry");
  for (std::size_t n = 0; n < probs_.size(); ++n) {
    if (!(probs_[n] >= -kNegativeTolerance)) {
      throw InvalidArgument("pmf entry " + std::to_string(n) + " is negative or NaN");
    }
  }
  const double s = sum();
  if (!(std::abs(s - 1.0) <= sum_tolerance)) {
    throw InvalidArgument("pmf does not sum to one (sum = " + std::to_string(s) + ")");
  }
}

double Pmf::sum() const noexcept {
  return std::accumulate(probs_.begin(), probs_.end(), 0.0);
}

double Pmf::mean() const noexcept {
  double m = 0.0;
  for (std::size_t n = 0; n < probs_.size(); ++n) m += static_cast<double>(n) * probs_[n];
  return m;
}

double Pmf::variance() const noexcept {
  const double m = mean();
  double v = 0.0;
  for (std::size_t n = 0; n < probs_.size(); ++n) {
    const double d = static_cast<double>(n) - m;
    v += d * d * probs_[n];
  }
  return v;
}

Pmf Pmf::extended(std::size_t n_max) const {
  if (n_max < this->n_max()) throw TruncationError("extended() cannot shrink a pmf");
  std::vector<double> p = probs_;
  p.resize(n_max + 1, 0.0);
  return Pmf(std::move(p), std::abs(sum() - 1.0) + kSumTolerance);
}

Pmf empirical_pmf(const WealthVector& state, std::size_t n_max) {
  if (state.size() == 0) throw InvalidArgument("empirical_pmf of an empty population");
  if (static_cast<std::uint64_t>(state.max()) > n_max) {
    throw TruncationError("empirical_pmf: n_max = " + std::to_string(n_max) +
                          " is below the largest wealth " + std::to_string(state.max()));
  }
  std::vector<std::size_t> counts(n_max + 1, 0);
  for (Dollars s : state.values()) ++counts[static_cast<std::size_t>(s)];
  const double inv_n = 1.0 / static_cast<double>(state.size());
  std::vector<double> p(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) p[n] = static_cast<double>(counts[n]) * inv_n;
  return Pmf(std::move(p), 1e-12 * static_cast<double>(n_max + 1) + 1e-12);
}

Pmf dirac_pmf(std::size_t m, std::size_t n_max) {
  if (m > n_max) {
    throw RangeError("dirac_pmf: atom " + std::to_string(m) + " exceeds n_max " +
                     std::to_string(n_max));
  }
  std::vector<double> p(n_max + 1, 0.0);
  p[m] = 1.0;
  return Pmf(std::move(p));
}

void ModelParams::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be > 0");
  if (n_agents < 2) throw InvalidArgument("n_agents must be >= 2");
  if (mu < 1) throw InvalidArgument("mu must be >= 1");
}

TrajectoryRecord::TrajectoryRecord(std::vector<std::string> stat_names)
    : stat_names_(std::move(stat_names)) {}

void TrajectoryRecord::append(double t, std::vector<double> stats, std::optional<Pmf> pmf) {
  if (!times_.empty() && !(t > times_.back())) {
    throw InvalidArgument("trajectory times must be strictly increasing");
  }
  if (stats.size() != stat_names_.size()) {
    throw InvalidArgument("trajectory row has " + std::to_string(stats.size()) +
                          " statistics, expected " + std::to_string(stat_names_.size()));
  }
  times_.push_back(t);
  stats_.push_back(std::move(stats));
  pmfs_.push_back(std::move(pmf));
}

std::vector<double> TrajectoryRecord::column(std::string_view name) const {
  const auto it = std::find(stat_names_.begin(), stat_names_.end(), name);
  if (it == stat_names_.end()) {
    throw InvalidArgument("no statistic named '" + std::string(name) + "'");
  }
  const auto col = static_cast<std::size_t>(it - stat_names_.begin());
  std::vector<double> out;
  out.reserve(stats_.size());
  for (const auto& row : stats_) out.push_back(row[col]);
  return out;
}

}  // namespace kinexch
