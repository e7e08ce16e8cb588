#include <benchmark/benchmark.h>

#include "lab/reach.hpp"
#include "lab/timesep.hpp"

using namespace lab;

static void BM_ForwardReachFlat(benchmark::State& state) {
  const MetricField m = make_preset(PresetSpec::make("flat"));
  const int res = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        forward_reach(m, Vec::Zero(2), veci2(-2, -2), veci2(2, 2), res));
  }
  state.SetComplexityN(res);
}
BENCHMARK(BM_ForwardReachFlat)->Arg(32)->Arg(64)->Arg(96)->Complexity();

static void BM_ViciousFlat(benchmark::State& state) {
  const MetricField m = make_preset(PresetSpec::make("flat"));
  for (auto _ : state) {
    benchmark::DoNotOptimize(is_vicious(m, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_ViciousFlat)->Arg(32)->Arg(64);

static void BM_TimeSeparationFlat(benchmark::State& state) {
  const MetricField m = make_preset(PresetSpec::make("flat"));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(time_separation(m, Vec::Zero(2), vec2(2, 1), 8, 8, seed++));
  }
}
BENCHMARK(BM_TimeSeparationFlat);

static void BM_TimeSeparationConformal(benchmark::State& state) {
  const MetricField m = make_preset(PresetSpec::make("conformal_flat"));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(time_separation(m, Vec::Zero(2), vec2(2, 1), 8, 8, seed++));
  }
}
BENCHMARK(BM_TimeSeparationConformal);
