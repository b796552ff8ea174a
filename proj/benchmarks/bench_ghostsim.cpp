#include <benchmark/benchmark.h>

#include <numbers>

#include "ghost/biphoton.hpp"
#include "ghost/detector.hpp"
#include "ghost/experiments.hpp"
#include "ghost/optics.hpp"

namespace {

using namespace ghost;

void BM_ClosedForm(benchmark::State& state) {
  const auto p = SourceParams::paper_defaults();
  double x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(closed_form_amplitude(p, 1e-3, x, -0.7e-3, 0.2e-3));
    x += 1e-9;
  }
}
BENCHMARK(BM_ClosedForm);

void BM_QuadratureOracle(benchmark::State& state) {
  const auto p = SourceParams::paper_defaults();
  for (auto _ : state)
    benchmark::DoNotOptimize(quadrature_oracle_amplitude(p, 1e-3, 0.5e-3, -0.7e-3, 0.2e-3));
}
BENCHMARK(BM_QuadratureOracle)->Unit(benchmark::kMillisecond);

void BM_InterferenceMap(benchmark::State& state) {
  const auto p = SourceParams::paper_defaults();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(ghost_interference_map(p, DoubleSlit{}, GridSpec{n, n / 4, 6e-3, 2e-3, 0, 0}));
}
BENCHMARK(BM_InterferenceMap)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ImageMap(benchmark::State& state) {
  const auto lens = LensSystem::thin_lens(1.5, 2.83);
  const auto p = lens_plane_params(SourceParams::paper_defaults(), lens);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto pattern = PhasePattern::binary_halves(n, n, 62.5e-6, std::numbers::pi);
  const double ext = ghost_magnification(p, lens) * n * 62.5e-6;
  for (auto _ : state)
    benchmark::DoNotOptimize(ghost_image_map(p, lens, pattern, PolarizerAngle::from_degrees(45),
                                             PolarizerAngle::from_degrees(-45),
                                             GridSpec{n, n, ext, ext, 0, 0}));
}
BENCHMARK(BM_ImageMap)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_MonteCarlo(benchmark::State& state) {
  const auto map = ghost_interference_map(SourceParams::paper_defaults(), DoubleSlit{},
                                          GridSpec{256, 64, 6e-3, 2e-3, 0, 0});
  DetectorConfig cfg;
  cfg.exposure = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_exposure(map, cfg));
}
BENCHMARK(BM_MonteCarlo)->Arg(60)->Arg(1800)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
