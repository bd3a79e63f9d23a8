#include <benchmark/benchmark.h>

#include "srwin/montecarlo.hpp"
#include "srwin/sim.hpp"

namespace {

namespace mc = srwin::montecarlo;
namespace sim = srwin::sim;

void BM_FullRankRate_Serial(benchmark::State& state) {
  const auto b = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mc::full_rank_rate_serial(b, 2, 20000, 1));
  state.SetItemsProcessed(state.iterations() * 20000);
}

void BM_FullRankRate_Parallel(benchmark::State& state) {
  const auto b = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mc::full_rank_rate(b, 2, 20000, 1));
  state.SetItemsProcessed(state.iterations() * 20000);
}

void BM_MeanDraws_Serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mc::mean_draws_to_full_rank_serial(30, 20000, 1));
}

void BM_MeanDraws_Parallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(mc::mean_draws_to_full_rank(30, 20000, 1));
}

sim::ExperimentConfig replicated(sim::Protocol protocol) {
  sim::ExperimentConfig cfg;
  cfg.protocol = protocol;
  cfg.window = 64;
  cfg.block_size = 16;
  cfg.loss = 0.1;
  cfg.horizon = 100000;
  cfg.replications = 8;
  return cfg;
}

void BM_Replications_Serial(benchmark::State& state) {
  const auto cfg = replicated(static_cast<sim::Protocol>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_serial(cfg));
  state.SetItemsProcessed(state.iterations() * cfg.replications * cfg.horizon);
}

void BM_Replications_Parallel(benchmark::State& state) {
  const auto cfg = replicated(static_cast<sim::Protocol>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sim::run(cfg));
  state.SetItemsProcessed(state.iterations() * cfg.replications * cfg.horizon);
}

}  // namespace

BENCHMARK(BM_FullRankRate_Serial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FullRankRate_Parallel)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_MeanDraws_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MeanDraws_Parallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Replications_Serial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Replications_Parallel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
