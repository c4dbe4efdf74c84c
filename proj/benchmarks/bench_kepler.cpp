#include <benchmark/benchmark.h>

#include "astrack/kepler.hpp"

using namespace astrack;

static void BM_SolveKepler(benchmark::State& state) {
  const kepler::Eccentricity e(static_cast<double>(state.range(0)) / 100.0);
  double M = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kepler::solve_kepler(M, e));
    M += 1e-3;
    if (M > 3.0) M = -3.0;
  }
}
BENCHMARK(BM_SolveKepler)->Arg(0)->Arg(30)->Arg(70)->Arg(95);

static void BM_TrueToMean(benchmark::State& state) {
  const kepler::Eccentricity e(0.7);
  double T = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kepler::true_to_mean(T, e));
    T += 1e-3;
  }
}
BENCHMARK(BM_TrueToMean);
