#include <benchmark/benchmark.h>

#include "sdstein/catalog.hpp"
#include "sdstein/charfn.hpp"

namespace {

void LogCfQuadratureStable(benchmark::State& state) {
  const auto law = sdstein::catalog::rot_inv_stable(1, 1.5);
  sdstein::Vec xi(1);
  xi << 1.7;
  for (auto _ : state) {
    auto v = sdstein::log_cf_quadrature(law, xi);
    benchmark::DoNotOptimize(v);
  }
}

void LogCfQuadratureGamma(benchmark::State& state) {
  const auto law = sdstein::catalog::gamma1d(2.0, 1.0);
  sdstein::Vec xi(1);
  xi << 1.7;
  for (auto _ : state) {
    auto v = sdstein::log_cf_quadrature(law, xi);
    benchmark::DoNotOptimize(v);
  }
}

void DensityInversionStable(benchmark::State& state) {
  const auto law = sdstein::catalog::rot_inv_stable(1, 1.5);
  for (auto _ : state) {
    auto grid = sdstein::density_by_inversion(law, 1.0);
    benchmark::DoNotOptimize(grid.values().data());
  }
}

}  // namespace

BENCHMARK(LogCfQuadratureStable);
BENCHMARK(LogCfQuadratureGamma);
BENCHMARK(DensityInversionStable);

BENCHMARK_MAIN();
