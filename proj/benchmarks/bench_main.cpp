// Micro benchmarks for the hot paths: quadrature, phase classification and
// the per-step cost of both integrators as N grows.

#include <benchmark/benchmark.h>

#include "selforg/equilibrium.hpp"
#include "selforg/langevin.hpp"
#include "selforg/microcanonical.hpp"

using namespace selforg;

static void BM_PartitionMoments(benchmark::State& state) {
  const auto& rule = PeriodicRule::power_of_two(static_cast<int>(state.range(0)));
  const Point2 y{0.3, 0.6};
  const Couplings alpha{1.2, 1.8};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_moments(rule, y, alpha));
  state.SetItemsProcessed(state.iterations() * (1 << state.range(0)));
}
BENCHMARK(BM_PartitionMoments)->DenseRange(6, 10, 2);

static void BM_ClassifyPhase(benchmark::State& state) {
  const Thermo thermo;
  const Couplings alpha{0.6, 1.6};
  for (auto _ : state) benchmark::DoNotOptimize(classify_phase(alpha, thermo));
}
BENCHMARK(BM_ClassifyPhase)->Unit(benchmark::kMillisecond);

static void BM_LangevinStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  LangevinConfig c;
  c.model = map_cavity_to_effective(EffectiveModel::cavity_for(0.5, 1.5, 1.0, n));
  c.n_atoms = n;
  EnsembleState s = initial_state(c);
  const CounterRng rng(1);
  std::int64_t k = 0;
  for (auto _ : state) step_langevin(s, c, rng, k++);
  state.SetItemsProcessed(state.iterations() * n);
  state.SetComplexityN(n);
}
BENCHMARK(BM_LangevinStep)->RangeMultiplier(4)->Range(256, 65536)->Unit(benchmark::kMicrosecond)->Complexity();

static void BM_MdStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  MDConfig c;
  c.alpha = {0.5, 1.5};
  c.n_atoms = n;
  EnsembleState s = sample_microcanonical_init(c);
  const EffectiveModel m = c.model();
  std::int64_t k = 0;
  for (auto _ : state) step_md(s, m, c.dt, c.integrator, c.momentum_bound, k++);
  state.SetItemsProcessed(state.iterations() * n);
  state.SetComplexityN(n);
}
BENCHMARK(BM_MdStep)->RangeMultiplier(4)->Range(256, 65536)->Unit(benchmark::kMicrosecond)->Complexity();

BENCHMARK_MAIN();
