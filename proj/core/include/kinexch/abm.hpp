#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "kinexch/fenwick.hpp"
#include "kinexch/rng.hpp"
#include "kinexch/types.hpp"

namespace kinexch::abm {

/// One executed exchange attempt. `giver == receiver` is a self-exchange and
/// leaves wealth unchanged.
struct Event {
  std::size_t giver = 0;
  std::size_t receiver = 0;
  double dt = 0.0;
};

struct EventLog {
  std::uint64_t count = 0;
  double t = 0.0;
};

/// Per-agent giving rates with O(log N) sampling of the giver.
///
/// The N receiver clocks of an agent (each of intensity rate/N) are merged,
/// so an agent gives at:
///   unbiased     lambda * 1[S_i >= 1]
///   poor-biased  lambda * S_i
///   rich-biased  lambda / S_i   (0 when S_i = 0)
class RateTable {
 public:
  /// Events between full rebuilds of the floating-point rich-biased tree.
  static constexpr std::uint64_t kRebuildInterval = std::uint64_t{1} << 20;

  RateTable(Model model, double lambda, const WealthVector& state);

  Model model() const noexcept { return model_; }
  double rate(std::size_t agent) const;
  double total_rate() const;

  /// Draws a giver with probability rate_i / total_rate. Requires total_rate() > 0.
  std::size_t sample_giver(Rng& rng) const;

  /// Incremental update after `giver` passed a dollar to `receiver`;
  /// `state` is the wealth after the transfer.
  void on_transfer(std::size_t giver, std::size_t receiver, const WealthVector& state);

  void rebuild(const WealthVector& state);

 private:
  void set_rich(std::size_t agent, bool rich);
  static double rich_weight(Dollars s) noexcept { return s > 0 ? 1.0 / static_cast<double>(s) : 0.0; }

  Model model_;
  double lambda_;
  std::size_t n_ = 0;
  std::vector<Dollars> wealth_;  // mirror of the state the table was built for
  // unbiased: dense set of agents with S_i >= 1
  std::vector<std::size_t> rich_;
  std::vector<std::size_t> rich_pos_;
  // poor-biased: exact integer weights S_i
  FenwickTree<Dollars> dollars_;
  // rich-biased: weights 1/S_i
  FenwickTree<double> inverse_;
  std::uint64_t updates_since_rebuild_ = 0;
};

/// Exact Gillespie simulation of one N-agent economy.
///
/// The next event time is drawn eagerly, so observing the process at
/// arbitrary times (advance_to) does not perturb the random stream: the
/// event sequence depends only on (params, seed, initial state).
class Engine {
 public:
  explicit Engine(const ModelParams& params);
  Engine(const ModelParams& params, WealthVector initial);

  /// Executes the next event. Returns nullopt in an absorbing state
  /// (total rate zero), in which case nothing changes.
  std::optional<Event> step();

  /// Runs every event with time <= t, then sets the clock to t.
  /// Returns false if the process is absorbed before reaching t.
  bool advance_to(double t);

  /// Executes up to `count` further events; returns how many ran.
  std::uint64_t advance_events(std::uint64_t count);

  const WealthVector& state() const noexcept { return state_; }
  const RateTable& rates() const noexcept { return rates_; }
  const EventLog& log() const noexcept { return log_; }
  double time() const noexcept { return log_.t; }
  double next_event_time() const noexcept { return next_time_; }
  bool absorbed() const noexcept { return !(next_time_ < kNever); }
  const ModelParams& params() const noexcept { return params_; }

  /// Called after every executed event with the event and its absolute time.
  void set_event_sink(std::function<void(const Event&, double)> sink) { sink_ = std::move(sink); }

 private:
  static constexpr double kNever = std::numeric_limits<double>::infinity();
  void schedule();

  ModelParams params_;
  WealthVector state_;
  RateTable rates_;
  Rng rng_;
  EventLog log_;
  double next_time_ = kNever;
  double last_event_time_ = 0.0;
  std::function<void(const Event&, double)> sink_;
};

struct RunOptions {
  /// Defaults to every agent holding mu dollars.
  std::optional<WealthVector> initial;
  /// Store the empirical pmf at each snapshot. n_max = 0 sizes each pmf to
  /// the largest wealth present.
  bool keep_pmfs = true;
  std::size_t n_max = 0;
  std::function<void(const Event&, double)> event_sink;
};

/// Simulates to t_end and records the state at each snapshot time (sorted,
/// within [0, t_end]). Statistics per row: events, gini, max_wealth, total.
/// If the process is absorbed first, the remaining snapshots are still
/// recorded (the state is frozen) and `truncated` is set.
TrajectoryRecord run(const ModelParams& params, double t_end, std::span<const double> snapshot_times,
                     const RunOptions& options = {});

}  // namespace kinexch::abm
