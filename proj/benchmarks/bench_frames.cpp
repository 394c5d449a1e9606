#include <benchmark/benchmark.h>

#include <vector>

#include "qrdm/frames.hpp"

using namespace qrdm;

static void BM_BoostedCorrelation(benchmark::State& state) {
  const std::vector<BranchRegions> b{{0.5, {0, 2000}, {18000, 20000}}, {0.5, {2000, 4000}, {20000, 22000}}};
  const auto t = sample_entangled_stays(b, static_cast<std::size_t>(state.range(0)), 8);
  const SiteGeometry g{-2200.0, 0.2};
  for (auto _ : state) benchmark::DoNotOptimize(boosted_correlation_stats(t, g, 0.5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BoostedCorrelation)->RangeMultiplier(4)->Range(100000, 1600000)->Complexity(benchmark::oNLogN)->Unit(benchmark::kMillisecond);

static void BM_LorentzBatch(benchmark::State& state) {
  std::vector<Event> events(1024);
  for (std::size_t i = 0; i < events.size(); ++i) events[i] = {0.001 * static_cast<double>(i), 1.0 - 0.002 * static_cast<double>(i)};
  for (auto _ : state)
    for (const auto& e : events) benchmark::DoNotOptimize(lorentz_transform(e, 0.6));
}
BENCHMARK(BM_LorentzBatch);
