#include <benchmark/benchmark.h>

#include <vector>

#include "slvst/model.hpp"
#include "slvst/spectra.hpp"
#include "slvst/tomography.hpp"
#include "slvst/topology.hpp"

using namespace slvst;

namespace {

const LatticeParams kFig2 = make_lattice_params(101, 36, -71);

void BM_Absorption(benchmark::State& state) {
  const auto chain = build_chain(kFig2, VelocityClass(200, kFig2.lambda),
                                 static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(absorption_spectrum(chain));
}
BENCHMARK(BM_Absorption)->Arg(201)->Arg(601)->Unit(benchmark::kMillisecond);

void BM_DifferenceSpectrum(benchmark::State& state) {
  const auto pump = PumpSetting::at_velocity(200, kFig2.lambda);
  const auto dist = refine_for_hole(thermal_dist_from_fwhm(350), pump);
  for (auto _ : state) benchmark::DoNotOptimize(difference_spectrum(kFig2, dist, pump));
}
BENCHMARK(BM_DifferenceSpectrum)->Unit(benchmark::kMillisecond);

void BM_ZakWilson(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(zak_wilson(kFig2, Band::kLower, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_ZakWilson)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_ChernFhs(benchmark::State& state) {
  const auto path = make_pump_path(68, 2.0 / 3.0, 100, 0);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(chern_fhs(path, n, n));
}
BENCHMARK(BM_ChernFhs)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
