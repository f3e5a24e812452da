#include <benchmark/benchmark.h>

#include <vector>

#include "kinexch/abm.hpp"
#include "kinexch/analysis.hpp"
#include "kinexch/meanfield.hpp"

using namespace kinexch;

namespace {

ModelParams params(Model m, std::int64_t n) {
  ModelParams p;
  p.model = m;
  p.n_agents = n;
  p.mu = 10;
  p.seed = 5;
  return p;
}

// Cost per exchange after a burn-in, as a function of N.
void BM_EngineStep(benchmark::State& state, Model m) {
  abm::Engine e(params(m, state.range(0)));
  e.advance_events(static_cast<std::uint64_t>(state.range(0)) * 20);
  for (auto _ : state) {
    // the rich-biased model eventually absorbs; restart when it does
    if (!e.step()) {
      state.PauseTiming();
      e = abm::Engine(params(m, state.range(0)));
      state.ResumeTiming();
    }
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(BM_EngineStep, unbiased, Model::Unbiased)->RangeMultiplier(10)->Range(100, 100000);
BENCHMARK_CAPTURE(BM_EngineStep, poor_biased, Model::PoorBiased)->RangeMultiplier(10)->Range(100, 100000);
BENCHMARK_CAPTURE(BM_EngineStep, rich_biased, Model::RichBiased)->RangeMultiplier(10)->Range(100, 100000);

// mu scales with n_max as in the automatic truncation; a fixed small mu would
// fill the tail with subnormals and time those instead
Pmf smooth_pmf(std::size_t n_max) { return meanfield::geometric_equilibrium(static_cast<double>(n_max) / 20.0, n_max); }

void BM_GeneratorApply(benchmark::State& state, Model m) {
  const auto n_max = static_cast<std::size_t>(state.range(0));
  const Pmf p = smooth_pmf(n_max);
  const auto gen = meanfield::Generator::for_model(m, 1.0, p.mean());
  std::vector<double> out(p.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(gen.apply(p.probs(), out));
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK_CAPTURE(BM_GeneratorApply, unbiased, Model::Unbiased)->Arg(200)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_GeneratorApply, poor_biased, Model::PoorBiased)->Arg(200)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(BM_GeneratorApply, rich_biased, Model::RichBiased)->Arg(200)->Arg(1000)->Arg(10000);

void BM_GiniSamples(benchmark::State& state) {
  abm::Engine e(params(Model::Unbiased, state.range(0)));
  e.advance_events(static_cast<std::uint64_t>(state.range(0)) * 20);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::gini_samples(e.state()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GiniSamples)->RangeMultiplier(10)->Range(100, 100000);

void BM_GiniPmf(benchmark::State& state) {
  const Pmf p = smooth_pmf(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(analysis::gini_pmf(p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GiniPmf)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
