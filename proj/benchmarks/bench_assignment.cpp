#include <benchmark/benchmark.h>

#include "sdstein/assignment.hpp"
#include "sdstein/rng.hpp"

namespace {

sdstein::Mat random_cost(int n, std::uint64_t seed) {
  sdstein::RngStream rng(seed, "bench_cost");
  sdstein::Mat cost(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) cost(i, j) = rng.uniform();
  }
  return cost;
}

void AssignmentRandom(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const sdstein::Mat cost = random_cost(n, 42);
  for (auto _ : state) {
    auto result = sdstein::solve_assignment(cost);
    benchmark::DoNotOptimize(result.cost);
  }
  state.SetComplexityN(n);
}

}  // namespace

BENCHMARK(AssignmentRandom)->RangeMultiplier(2)->Range(128, 2048)->Complexity();
