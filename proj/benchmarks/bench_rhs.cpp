#include <benchmark/benchmark.h>

#include "opinionflow/integrator.hpp"
#include "opinionflow/particles.hpp"
#include "opinionflow/scenario.hpp"

using namespace opinionflow;

static void BM_RhsSingle(benchmark::State& state) {
  const auto spec = preset("single-ini2").model;
  const auto st = initial_state(spec, static_cast<std::size_t>(state.range(0)));
  Velocities v;
  for (auto _ : state) {
    rhs(st, spec, v);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RhsSingle)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BM_RhsTrolls(benchmark::State& state) {
  const auto spec = preset("flt-asymmetric").model;
  const auto st = initial_state(spec, static_cast<std::size_t>(state.range(0)));
  Velocities v;
  for (auto _ : state) {
    rhs(st, spec, v);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RhsTrolls)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BM_Rk4Step(benchmark::State& state) {
  const auto spec = preset("fl-symmetric").model;
  const auto st = initial_state(spec, static_cast<std::size_t>(state.range(0)));
  const double dt = policy_dt(st, spec, AdaptiveSpacing{});
  for (auto _ : state) benchmark::DoNotOptimize(step(st, spec, dt, Scheme::RK4));
}
BENCHMARK(BM_Rk4Step)->Arg(200)->Arg(800);

BENCHMARK_MAIN();
