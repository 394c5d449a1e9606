#include <benchmark/benchmark.h>

#include <complex>
#include <vector>

#include "qrdm/beable.hpp"
#include "qrdm/protective.hpp"
#include "qrdm/rdm.hpp"
#include "qrdm/schrodinger.hpp"

using namespace qrdm;

static void BM_EvolveGrid(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GridSpec spec{-20.0, 40.0 / static_cast<double>(n)};
  const auto psi = gaussian_packet(spec, n, 0.0, 1.0, 1.0);
  const std::vector<double> v(n, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_grid(psi, v, 1e-3, 100));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvolveGrid)->RangeMultiplier(4)->Range(256, 16384)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_Reconstruct(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const GridSpec spec{-8.0, 16.0 / static_cast<double>(n)};
  const auto d = densities(gaussian_packet(spec, n, 0.3, 1.0, 0.7));
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct_wavefunction(d, 1.0, 1.0));
}
BENCHMARK(BM_Reconstruct)->Arg(1024)->Arg(4096);

static void BM_SampleStays(benchmark::State& state) {
  std::vector<double> p(200, 1.0 / 200);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_stays(p, 100000, seed++));
}
BENCHMARK(BM_SampleStays)->Unit(benchmark::kMillisecond);

static void BM_JumpEnsemble(benchmark::State& state) {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.3, 0.3, -1.0;
  const HermitianOperator h(m);
  ComplexVector a(2);
  a << 0.8, std::complex<double>(0.0, 0.6);
  const auto psi = ComplexVectorState::normalized(a);
  EnsembleOptions opt;
  opt.trajectories = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(run_equivariance(h, psi, 1e-3, 1000, opt));
}
BENCHMARK(BM_JumpEnsemble)->Unit(benchmark::kMillisecond);

static void BM_ZenoRun(benchmark::State& state) {
  const auto pointer = PointerState::gaussian(0.0, 4.0, 1024, 128.0);
  const std::vector<double> a{1.0, 0.0};
  ProtectiveSetup s{ComplexVectorState::normalized(ComplexVector::Ones(2)), HermitianOperator::diagonal(a),
                    static_cast<std::size_t>(state.range(0)), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(zeno_protective_run(s, pointer));
}
BENCHMARK(BM_ZenoRun)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_Tomography(benchmark::State& state) {
  const GridSpec spec{-8.0, 16.0 / 4096};
  const auto psi = gaussian_packet(spec, 4096, 0.3, 1.0, 0.7);
  const auto part = uniform_partition(4096, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(tomography(psi, part));
}
BENCHMARK(BM_Tomography)->Arg(64)->Arg(1024)->Unit(benchmark::kMillisecond);
