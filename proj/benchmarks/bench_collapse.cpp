#include <benchmark/benchmark.h>

#include <vector>

#include "qrdm/collapse.hpp"
#include "qrdm/random.hpp"

using namespace qrdm;

namespace {

EnergySuperposition spread_state(std::size_t m) {
  std::vector<double> e(m), p(m, 1.0 / static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) e[i] = static_cast<double>(i);
  return EnergySuperposition::from_probabilities(e, p);
}

}  // namespace

static void BM_CollapseStep(benchmark::State& state) {
  const auto s = spread_state(static_cast<std::size_t>(state.range(0)));
  auto cfg = CollapseConfig::frozen(0.01);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(collapse_step(s, cfg, rng));
}
BENCHMARK(BM_CollapseStep)->Arg(2)->Arg(16)->Arg(128);

static void BM_TrajectoryToOutcome(benchmark::State& state) {
  const auto s = spread_state(2);
  const auto cfg = CollapseConfig::frozen(0.05);
  std::uint64_t i = 0;
  for (auto _ : state) {
    Rng rng(derive_seed(3, i++));
    benchmark::DoNotOptimize(run_trajectory(s, cfg, 10000000, rng, false));
  }
}
BENCHMARK(BM_TrajectoryToOutcome);

static void BM_Ensemble(benchmark::State& state) {
  const auto s = spread_state(4);
  auto cfg = CollapseConfig::frozen(0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(ensemble_statistics(s, cfg, 1000, 100, 10, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_Ensemble)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
