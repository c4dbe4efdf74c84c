#include <benchmark/benchmark.h>

#include "astrack/filters.hpp"
#include "astrack/harness.hpp"

using namespace astrack;

namespace {

/// Example 3 prior with only a3 uncertain, observed where the filters disagree most.
struct OneStep {
  GaussianState prior;
  AnglesOnlyMeasurement m;

  OneStep() {
    const CentralState c = make_setup(example3()).central;
    prior.mean = eci_to_ast(c.state(), c).values;
    prior.mean[2] = deg2rad(260.0);
    prior.covariance = Matrix6::Identity() * 1e-16;
    prior.covariance(2, 2) = deg2rad(25.0) * deg2rad(25.0);
    m.longitude = wrap_pi(deg2rad(225.5));
    m.latitude = 0.0;
    m.sigma_long = deg2rad(5.5e-4);
    m.sigma_lat = deg2rad(5.5e-4);
  }
};

}  // namespace

static void BM_Update(benchmark::State& state) {
  const OneStep s;
  UpdateConfig cfg;
  cfg.kind = all_filter_kinds()[static_cast<std::size_t>(state.range(0))];
  state.SetLabel(std::string(to_string(cfg.kind)));
  for (auto _ : state) benchmark::DoNotOptimize(update(s.prior, s.m, cfg));
}
BENCHMARK(BM_Update)->DenseRange(0, 5);

static void BM_ParticleUpdate(benchmark::State& state) {
  OneStep s;
  s.m.sigma_long = deg2rad(1.0);
  s.m.sigma_lat = deg2rad(1.0);
  UpdateConfig cfg;
  cfg.kind = FilterKind::PF;
  cfg.pf_particles = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(update_pf(s.prior, s.m, cfg));
}
BENCHMARK(BM_ParticleUpdate)->Arg(10000)->Unit(benchmark::kMillisecond);
