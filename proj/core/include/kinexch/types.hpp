#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kinexch {

using Dollars = std::int64_t;

enum class Model { Unbiased, PoorBiased, RichBiased };

std::string_view to_string(Model model) noexcept;

/// Accepts "unbiased", "poor-biased"/"poor", "rich-biased"/"rich".
Model parse_model(std::string_view name);

/// Wealth of the N agents. Entries are non-negative and the total is fixed
/// at construction; `transfer` is the only mutation and preserves it.
class WealthVector {
 public:
  explicit WealthVector(std::vector<Dollars> dollars);

  /// Every agent starts with `mu` dollars.
  static WealthVector uniform(std::size_t n_agents, Dollars mu);

  std::size_t size() const noexcept { return dollars_.size(); }
  Dollars operator[](std::size_t i) const { return dollars_[i]; }
  std::span<const Dollars> values() const noexcept { return dollars_; }
  Dollars total() const noexcept { return total_; }
  double mean() const noexcept;
  Dollars max() const noexcept;

  /// Moves one dollar from `giver` to `receiver`. Requires dollars[giver] >= 1.
  void transfer(std::size_t giver, std::size_t receiver);

  /// Recounts the total; used by tests to check conservation independently.
  Dollars recount() const noexcept;

  friend bool operator==(const WealthVector&, const WealthVector&) = default;

 private:
  std::vector<Dollars> dollars_;
  Dollars total_ = 0;
};

/// Dense probability mass function over {0, ..., n_max}.
class Pmf {
 public:
  static constexpr double kNegativeTolerance = 1e-12;
  static constexpr double kSumTolerance = 1e-9;

  /// Validates entries >= -1e-12 and |sum - 1| <= sum_tolerance.
  explicit Pmf(std::vector<double> probs, double sum_tolerance = kSumTolerance);

  std::size_t size() const noexcept { return probs_.size(); }
  std::size_t n_max() const noexcept { return probs_.size() - 1; }
  double operator[](std::size_t n) const { return probs_[n]; }
  std::span<const double> probs() const noexcept { return probs_; }

  double sum() const noexcept;
  double mean() const noexcept;
  double variance() const noexcept;

  /// Zero-padded copy with a larger truncation bound.
  Pmf extended(std::size_t n_max) const;

 private:
  std::vector<double> probs_;
};

/// probs[n] = #{i : S_i = n} / N. Throws TruncationError if n_max < max S_i.
Pmf empirical_pmf(const WealthVector& state, std::size_t n_max);

/// Point mass at m. Throws RangeError if m > n_max.
Pmf dirac_pmf(std::size_t m, std::size_t n_max);

struct ModelParams {
  Model model = Model::Unbiased;
  double lambda = 1.0;
  std::int64_t n_agents = 500;
  Dollars mu = 10;
  std::uint64_t seed = 42;

  /// Throws InvalidArgument unless lambda > 0, n_agents >= 2, mu >= 1.
  void validate() const;
};

/// Time-stamped series of optional pmf snapshots and named statistics.
class TrajectoryRecord {
 public:
  TrajectoryRecord() = default;
  explicit TrajectoryRecord(std::vector<std::string> stat_names);

  /// Appends a row. `t` must exceed the previous time; `stats` must match
  /// the declared names in length.
  void append(double t, std::vector<double> stats, std::optional<Pmf> pmf = std::nullopt);

  std::size_t size() const noexcept { return times_.size(); }
  bool empty() const noexcept { return times_.empty(); }
  std::span<const double> times() const noexcept { return times_; }
  const std::vector<std::string>& stat_names() const noexcept { return stat_names_; }
  const std::vector<double>& stats(std::size_t row) const { return stats_.at(row); }
  const std::optional<Pmf>& pmf(std::size_t row) const { return pmfs_.at(row); }

  /// Column of a named statistic over all rows. Throws InvalidArgument if unknown.
  std::vector<double> column(std::string_view name) const;

  /// Set when a simulation stopped early (absorbing state) before its horizon.
  bool truncated = false;
  std::string note;

 private:
  std::vector<std::string> stat_names_;
  std::vector<double> times_;
  std::vector<std::vector<double>> stats_;
  std::vector<std::optional<Pmf>> pmfs_;
};

}  // namespace kinexch
