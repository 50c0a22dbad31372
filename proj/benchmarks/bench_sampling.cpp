#include <benchmark/benchmark.h>

#include "sdstein/catalog.hpp"
#include "sdstein/sampling.hpp"

namespace {

void SampleGammaTarget(benchmark::State& state) {
  const auto law = sdstein::catalog::gamma1d(2.0, 1.0);
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto batch = sdstein::sample_target(law, n, seed++);
    benchmark::DoNotOptimize(batch.points.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void SampleStableTarget(benchmark::State& state) {
  const auto law = sdstein::catalog::rot_inv_stable(2, 1.5);
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto batch = sdstein::sample_target(law, n, seed++);
    benchmark::DoNotOptimize(batch.points.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void SampleGammaMuT(benchmark::State& state) {
  const auto law = sdstein::catalog::gamma1d(2.0, 1.0);
  const int n = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto batch = sdstein::sample_mu_t(law, 1.0, n, seed++);
    benchmark::DoNotOptimize(batch.points.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK(SampleGammaTarget)->Arg(10000)->Arg(100000);
BENCHMARK(SampleStableTarget)->Arg(10000)->Arg(100000);
BENCHMARK(SampleGammaMuT)->Arg(10000)->Arg(100000);
