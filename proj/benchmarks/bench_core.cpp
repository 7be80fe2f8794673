#include <benchmark/benchmark.h>

#include "hpa/config.hpp"
#include "hpa/optics.hpp"
#include "hpa/scenario.hpp"

namespace {

using namespace hpa;

DensityOperator link_state(int cutoff) {
  return transmit(prepare_path_entangled(heralded_photon({}, cutoff), 0.6), 0.09);
}

void BM_Beamsplitter(benchmark::State& state) {
  const int cutoff = static_cast<int>(state.range(0));
  const DensityOperator rho =
      tensor(link_state(cutoff), make_vacuum({kModeC, kModeD}, cutoff));
  for (auto _ : state) benchmark::DoNotOptimize(apply_beamsplitter(rho, kModeB, kModeC, 0.5));
}
BENCHMARK(BM_Beamsplitter)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ApplyHpa(benchmark::State& state) {
  const int cutoff = static_cast<int>(state.range(0));
  const DensityOperator rho = link_state(cutoff);
  const DensityOperator aux = heralded_photon({}, cutoff, kModeD);
  HpaSettings s;
  s.t = 0.93;
  for (auto _ : state) benchmark::DoNotOptimize(apply_hpa(rho, aux, s));
}
BENCHMARK(BM_ApplyHpa)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_DisplacementMeasurement(benchmark::State& state) {
  const DensityOperator rho = link_state(4);
  DisplacementSetting s;
  s.amplitude = 0.7;
  s.overlap = 0.9;
  for (auto _ : state) benchmark::DoNotOptimize(displacement_measurement(rho, s, {0.25, 0.0}, {0.25, 0.0}));
}
BENCHMARK(BM_DisplacementMeasurement)->Unit(benchmark::kMillisecond);

void BM_ExactScenario(benchmark::State& state) {
  const ExperimentConfig c = default_config();
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(c, state.range(0) != 0, EvaluationMode::exact));
}
BENCHMARK(BM_ExactScenario)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
