// Serial reference against the OpenMP kernels on the same inputs.

#include <benchmark/benchmark.h>

#include "avcert/sweep.hpp"

namespace {

using avcert::sweep::Mode;

void BM_SafeDistance(benchmark::State& state, Mode mode) {
  const auto cases = avcert::sweep::random_longitudinal_cases(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(avcert::sweep::safe_distance_batch(cases, mode));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LongitudinalOracle(benchmark::State& state, Mode mode) {
  const auto cases = avcert::sweep::random_longitudinal_cases(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(avcert::sweep::longitudinal_oracle_batch(cases, 1e-3, mode));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Soundness(benchmark::State& state, Mode mode) {
  const auto specs = avcert::sweep::random_follow_lead(static_cast<std::size_t>(state.range(0)), 3);
  avcert::simulator::RunOptions opts;
  opts.all_agent_verdicts = false;
  opts.keep_frames = false;
  for (auto _ : state) benchmark::DoNotOptimize(avcert::sweep::simulate_batch(specs, opts, mode));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK_CAPTURE(BM_SafeDistance, serial, Mode::Serial)->Arg(100000);
BENCHMARK_CAPTURE(BM_SafeDistance, parallel, Mode::Parallel)->Arg(100000);
BENCHMARK_CAPTURE(BM_LongitudinalOracle, serial, Mode::Serial)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LongitudinalOracle, parallel, Mode::Parallel)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Soundness, serial, Mode::Serial)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Soundness, parallel, Mode::Parallel)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
