#include <benchmark/benchmark.h>

#include "opinionflow/density.hpp"
#include "opinionflow/particles.hpp"
#include "opinionflow/scenario.hpp"

using namespace opinionflow;

static void BM_Wasserstein(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = reconstruct(initial_state(preset("single-ini1").model, n).species[0]);
  const auto b = reconstruct(initial_state(preset("single-ini3").model, 2 * n).species[0]);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein1(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Wasserstein)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_StationaryDiscretize(benchmark::State& state) {
  const auto target = *stationary_target(preset("single-ini1").model);
  for (auto _ : state) benchmark::DoNotOptimize(target.discretize(static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_StationaryDiscretize)->Arg(4000);
