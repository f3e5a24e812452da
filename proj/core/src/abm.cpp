#include "kinexch/abm.hpp"

#include <algorithm>
#include <cmath>

#include "kinexch/analysis.hpp"
#include "kinexch/errors.hpp"

namespace kinexch::abm {

RateTable::RateTable(Model model, double lambda, const WealthVector& state)
    : model_(model), lambda_(lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("RateTable: lambda must be > 0");
  rebuild(state);
}

void RateTable::rebuild(const WealthVector& state) {
  n_ = state.size();
  wealth_.assign(state.values().begin(), state.values().end());
  updates_since_rebuild_ = 0;
  switch (model_) {
    case Model::Unbiased:
      rich_.clear();
      rich_pos_.assign(n_, n_);
      for (std::size_t i = 0; i < n_; ++i) {
        if (wealth_[i] >= 1) set_rich(i, true);
      }
      break;
    case Model::PoorBiased:
      dollars_.assign(wealth_);
      break;
    case Model::RichBiased: {
      std::vector<double> w(n_);
      std::transform(wealth_.begin(), wealth_.end(), w.begin(), rich_weight);
      inverse_.assign(w);
      break;
    }
  }
}

void RateTable::set_rich(std::size_t agent, bool rich) {
  const bool member = rich_pos_[agent] < n_;
  if (rich == member) return;
  if (rich) {
    rich_pos_[agent] = rich_.size();
    rich_.push_back(agent);
  } else {
    const std::size_t pos = rich_pos_[agent];
    const std::size_t last = rich_.back();
    rich_[pos] = last;
    rich_pos_[last] = pos;
    rich_.pop_back();
    rich_pos_[agent] = n_;
  }
}

double RateTable::rate(std::size_t agent) const {
  const Dollars s = wealth_.at(agent);
  switch (model_) {
    case Model::Unbiased:
      return s >= 1 ? lambda_ : 0.0;
    case Model::PoorBiased:
      return lambda_ * static_cast<double>(s);
    case Model::RichBiased:
      return lambda_ * rich_weight(s);
  }
  return 0.0;
}

double RateTable::total_rate() const {
  switch (model_) {
    case Model::Unbiased:
      return lambda_ * static_cast<double>(rich_.size());
    case Model::PoorBiased:
      return lambda_ * static_cast<double>(dollars_.total());
    case Model::RichBiased:
      return lambda_ * std::max(0.0, inverse_.total());
  }
  return 0.0;
}

std::size_t RateTable::sample_giver(Rng& rng) const {
  switch (model_) {
    case Model::Unbiased:
      return rich_[rng.index(rich_.size())];
    case Model::PoorBiased:
      return dollars_.find(static_cast<Dollars>(rng.index(static_cast<std::uint64_t>(dollars_.total()))));
    case Model::RichBiased: {
      const double total = inverse_.total();
      // Accumulated rounding can leave a vanishing weight on a broke agent
      // or push the draw past the end; redraw in both cases.
      for (;;) {
        const std::size_t i = inverse_.find(rng.uniform() * total);
        if (i < n_ && wealth_[i] > 0) return i;
      }
    }
  }
  return 0;
}

void RateTable::on_transfer(std::size_t giver, std::size_t receiver, const WealthVector& state) {
  const Dollars g_old = wealth_[giver];
  const Dollars r_old = wealth_[receiver];
  wealth_[giver] = state[giver];
  wealth_[receiver] = state[receiver];
  switch (model_) {
    case Model::Unbiased:
      set_rich(giver, wealth_[giver] >= 1);
      set_rich(receiver, wealth_[receiver] >= 1);
      break;
    case Model::PoorBiased:
      dollars_.add(giver, wealth_[giver] - g_old);
      dollars_.add(receiver, wealth_[receiver] - r_old);
      break;
    case Model::RichBiased:
      if (++updates_since_rebuild_ >= kRebuildInterval) {
        rebuild(state);
      } else {
        inverse_.add(giver, rich_weight(wealth_[giver]) - rich_weight(g_old));
        inverse_.add(receiver, rich_weight(wealth_[receiver]) - rich_weight(r_old));
      }
      break;
  }
}

Engine::Engine(const ModelParams& params)
    : Engine(params, WealthVector::uniform(static_cast<std::size_t>(params.n_agents), params.mu)) {}

Engine::Engine(const ModelParams& params, WealthVector initial)
    : params_(params),
      state_(std::move(initial)),
      rates_(params.model, params.lambda, state_),
      rng_(params.seed) {
  params_.validate();
  if (state_.size() != static_cast<std::size_t>(params_.n_agents)) {
    throw InvalidArgument("initial state has " + std::to_string(state_.size()) +
                          " agents but n_agents = " + std::to_string(params_.n_agents));
  }
  schedule();
}

void Engine::schedule() {
  const double total = rates_.total_rate();
  next_time_ = total > 0.0 ? last_event_time_ + rng_.exponential(total) : kNever;
}

std::optional<Event> Engine::step() {
  if (absorbed()) return std::nullopt;
  Event ev;
  ev.giver = rates_.sample_giver(rng_);
  ev.receiver = static_cast<std::size_t>(rng_.index(state_.size()));
  ev.dt = next_time_ - last_event_time_;
  if (ev.giver != ev.receiver) {
    state_.transfer(ev.giver, ev.receiver);
    rates_.on_transfer(ev.giver, ev.receiver, state_);
  }
  last_event_time_ = next_time_;
  log_.t = next_time_;
  ++log_.count;
  if (sink_) sink_(ev, log_.t);
  schedule();
  return ev;
}

bool Engine::advance_to(double t) {
  while (next_time_ <= t) step();
  if (t > log_.t) log_.t = t;
  return !absorbed();
}

std::uint64_t Engine::advance_events(std::uint64_t count) {
  std::uint64_t done = 0;
  while (done < count && step()) ++done;
  return done;
}

TrajectoryRecord run(const ModelParams& params, double t_end, std::span<const double> snapshot_times,
                     const RunOptions& options) {
  params.validate();
  if (!(t_end > 0.0)) throw InvalidArgument("run: t_end must be > 0");
  std::vector<double> times(snapshot_times.begin(), snapshot_times.end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double t : times) {
    if (t < 0.0 || t > t_end) throw InvalidArgument("run: snapshot time outside [0, t_end]");
  }

  Engine engine = options.initial ? Engine(params, *options.initial) : Engine(params);
  if (options.event_sink) engine.set_event_sink(options.event_sink);

  TrajectoryRecord record({"events", "gini", "max_wealth", "total"});
  auto snapshot = [&](double t) {
    const WealthVector& s = engine.state();
    std::optional<Pmf> pmf;
    if (options.keep_pmfs) {
      const std::size_t n_max = options.n_max ? options.n_max : static_cast<std::size_t>(s.max());
      pmf = empirical_pmf(s, n_max);
    }
    const double gini = s.total() > 0 ? analysis::gini_samples(s) : 0.0;
    record.append(t,
                  {static_cast<double>(engine.log().count), gini, static_cast<double>(s.max()),
                   static_cast<double>(s.total())},
                  std::move(pmf));
  };

  for (double t : times) {
    if (!engine.advance_to(t) && !record.truncated) {
      record.truncated = true;
      record.note = "absorbing state reached at t = " + std::to_string(engine.log().t);
    }
    snapshot(t);
  }
  if (!engine.advance_to(t_end) && !record.truncated) {
    record.truncated = true;
    record.note = "absorbing state reached before t_end";
  }
  return record;
}

}  // namespace kinexch::abm
