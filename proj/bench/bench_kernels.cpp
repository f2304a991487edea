// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.
#include <benchmark/benchmark.h>

#include "soris/channel.hpp"
#include "soris/evaluation.hpp"
#include "soris/geometry.hpp"
#include "soris/interpolation.hpp"
#include "soris/selection.hpp"

using namespace soris;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

Scenario p8_scenario() {
  Scenario s;
  s.grid = GridSpec::from_fraction(8, 8, 0.125);
  s.set = preset_set("p8-fig10", s.grid);
  return s;
}

void BM_Correlation(benchmark::State& state) {
  const GridSpec grid = GridSpec::from_fraction(32, 32, 0.125);
  for (auto _ : state) benchmark::DoNotOptimize(correlation_values(grid, mode(state)));
}

void BM_ChannelDataset(benchmark::State& state) {
  const GridSpec grid = GridSpec::from_fraction(16, 16, 0.125);
  const CorrelationModel corr = correlation_matrix(grid);
  for (auto _ : state)
    benchmark::DoNotOptimize(channel_dataset(7, corr, grid, RicianConfig{}, 2000, mode(state)));
}

void BM_Amse(benchmark::State& state) {
  const Scenario s = p8_scenario();
  const CorrelationModel corr = correlation_matrix(s.grid);
  const InterpolationPredictor li;
  for (auto _ : state)
    benchmark::DoNotOptimize(amse_monte_carlo(3, s, corr, li, 2000, mode(state)));
}

void BM_Ber(benchmark::State& state) {
  const Scenario s = p8_scenario();
  const CorrelationModel corr = correlation_matrix(s.grid);
  const InterpolationPredictor li;
  for (auto _ : state)
    benchmark::DoNotOptimize(ber_simulation(3, s, corr, li, -37.5, 100000, 100, mode(state)));
}

}  // namespace

BENCHMARK(BM_Correlation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ChannelDataset)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Amse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ber)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
