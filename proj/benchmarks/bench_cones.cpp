#include <benchmark/benchmark.h>

#include "lab/cones.hpp"

#include <random>

using namespace lab;

namespace {

PolyCone ring_cone(int rays) {
  std::vector<Vec> r;
  for (int k = 0; k < rays; ++k) {
    const double a = 2.0 * M_PI * k / rays;
    r.push_back(vec3(1.0, std::cos(a), std::sin(a)).normalized());
  }
  return conic_hull(r);
}

}  // namespace

static void BM_ConicHull2D(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::vector<Vec> rays;
  for (int i = 0; i < state.range(0); ++i) {
    const double a = uniform(rng, -0.7, 0.7);
    rays.push_back(vec2(std::cos(a), std::sin(a)));
  }
  const NormModel eu = NormModel::euclidean(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(conic_hull(rays, eu));
  }
}
BENCHMARK(BM_ConicHull2D)->Range(8, 4096);

static void BM_SampledMembership3D(benchmark::State& state) {
  const PolyCone c = ring_cone(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(2);
  for (auto _ : state) {
    const Vec v = vec3(1.0, uniform(rng, -1, 1), uniform(rng, -1, 1));
    benchmark::DoNotOptimize(contains(c, v, 1e-6));
  }
}
BENCHMARK(BM_SampledMembership3D)->Range(32, 1024);

static void BM_BoundaryDistance2D(benchmark::State& state) {
  const PolyCone c = conic_hull({vec2(1, 1), vec2(1, -1)});
  const NormModel eu = NormModel::euclidean(2);
  std::mt19937_64 rng(3);
  for (auto _ : state) {
    const double a = uniform(rng, 0.1, 10.0);
    benchmark::DoNotOptimize(boundary_distance(c, vec2(a, a * uniform(rng, -1, 1)), eu));
  }
}
BENCHMARK(BM_BoundaryDistance2D);
