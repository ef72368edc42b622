#include <benchmark/benchmark.h>

#include <cmath>

#include "rsl/curvature.hpp"
#include "rsl/operators.hpp"
#include "rsl/presets.hpp"
#include "rsl/rand_field.hpp"

using namespace rsl;

static void BM_CurvatureOf_T2(benchmark::State& state) {
  auto g = GridSpec::torus(2, static_cast<int>(state.range(0)), 2.0 * M_PI,
                           DiffScheme::Spectral);
  MetricField metric = conformal_metric(g, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(curvature_of(metric));
  }
}
BENCHMARK(BM_CurvatureOf_T2)->Arg(32)->Arg(64);

static void BM_RicciOf_T3(benchmark::State& state) {
  auto g = GridSpec::torus(3, static_cast<int>(state.range(0)), 2.0 * M_PI,
                           DiffScheme::Spectral);
  MetricField metric = product_conformal_metric(g, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ricci_of(metric));
  }
}
BENCHMARK(BM_RicciOf_T3)->Arg(16);

static void BM_LichnerowiczApply_Flat(benchmark::State& state) {
  auto g = GridSpec::torus(3, static_cast<int>(state.range(0)), 2.0 * M_PI,
                           DiffScheme::Spectral);
  MetricField id = MetricField::identity(g);
  SymTensorField h = band_limited_perturbation(g, 5, 2, 1e-2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lichnerowicz_apply(h, id));
  }
}
BENCHMARK(BM_LichnerowiczApply_Flat)->Arg(16);

BENCHMARK_MAIN();
