#include <benchmark/benchmark.h>

#include <cstdint>

#include "fuzzy/dmc.hpp"
#include "fuzzy/ellipse.hpp"
#include "fuzzy/observables.hpp"
#include "fuzzy/special.hpp"
#include "fuzzy/variational.hpp"

namespace {

using namespace fuzzy;

void BM_Invariants(benchmark::State& state) {
  num::RngStream rng(1, 0);
  MembraneConfig c;
  for (double& v : c.x) v = rng.normal();
  for (double& v : c.y) v = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(c);
    benchmark::DoNotOptimize(invariants(c));
  }
}
BENCHMARK(BM_Invariants);

void BM_EllipseGeometry(benchmark::State& state) {
  num::RngStream rng(2, 0);
  MembraneConfig c;
  for (double& v : c.x) v = rng.normal();
  for (double& v : c.y) v = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(c);
    benchmark::DoNotOptimize(ellipse_geometry(c));
  }
}
BENCHMARK(BM_EllipseGeometry);

void BM_PerimeterExact(benchmark::State& state) {
  double b = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(b);
    benchmark::DoNotOptimize(perimeter_exact(1.0, b));
  }
}
BENCHMARK(BM_PerimeterExact);

void BM_Hyp2f1(benchmark::State& state) {
  double z = 0.1715728752538097;
  for (auto _ : state) {
    benchmark::DoNotOptimize(z);
    benchmark::DoNotOptimize(num::hyp2f1(2.0, 2.5, 2.75, z));
  }
}
BENCHMARK(BM_Hyp2f1);

void BM_EnergyQuadrature(benchmark::State& state) {
  const auto m = minimize_closed(kDefaultKappa);
  const double tol = state.range(0) == 0 ? 1e-8 : 1e-11;
  for (auto _ : state) benchmark::DoNotOptimize(energy_quadrature(m.params, kDefaultKappa, tol));
}
BENCHMARK(BM_EnergyQuadrature)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_ExpectedShape(benchmark::State& state) {
  const auto m = minimize_closed(kDefaultKappa);
  for (auto _ : state) benchmark::DoNotOptimize(expected_shape(m));
}
BENCHMARK(BM_ExpectedShape)->Unit(benchmark::kMillisecond);

void BM_SampleUV(benchmark::State& state) {
  const auto m = minimize_closed(kDefaultKappa);
  num::RngStream rng(3, 0);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_uv(m, n, rng));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * state.range(0)));
}
BENCHMARK(BM_SampleUV)->Arg(1000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void BM_DmcSteps(benchmark::State& state) {
  dmc::DmcConfig cfg;
  cfg.walkers = static_cast<std::size_t>(state.range(0));
  cfg.tau = 0.004;
  cfg.equilibration_steps = 0;
  cfg.measurement_steps = 100;
  for (auto _ : state) benchmark::DoNotOptimize(dmc::run_dmc(cfg));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * state.range(0) * 100));
}
BENCHMARK(BM_DmcSteps)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
