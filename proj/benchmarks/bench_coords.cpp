#include <benchmark/benchmark.h>

#include "astrack/coords.hpp"
#include "astrack/harness.hpp"

using namespace astrack;

namespace {

CentralState central() { return CentralState(central_state_for(0.7, deg2rad(45.0), 0.3, 1.0, 1.0), 1.0); }

}  // namespace

static void BM_EciToAst(benchmark::State& state) {
  const CentralState c = central();
  const StateVector s{c.state().position * 1.01, c.state().velocity * 0.98, c.epoch()};
  for (auto _ : state) benchmark::DoNotOptimize(eci_to_ast(s, c));
}
BENCHMARK(BM_EciToAst);

static void BM_AstToEci(benchmark::State& state) {
  const CentralState c = central();
  const AstCoordinates a = eci_to_ast(StateVector{c.state().position * 1.01, c.state().velocity * 0.98, c.epoch()}, c);
  for (auto _ : state) benchmark::DoNotOptimize(ast_to_eci(a, c));
}
BENCHMARK(BM_AstToEci);

static void BM_AstJacobian(benchmark::State& state) {
  const CentralState c = central();
  for (auto _ : state) benchmark::DoNotOptimize(ast_jacobian(c));
}
BENCHMARK(BM_AstJacobian);
