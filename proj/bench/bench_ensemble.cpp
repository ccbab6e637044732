// Serial reference versus the OpenMP path loop on a small 2D ensemble.
#include <benchmark/benchmark.h>
#include <omp.h>

#include "nsch/ensemble.hpp"

namespace {

nsch::ensemble::EnsembleConfig small_config() {
  nsch::ensemble::EnsembleConfig cfg;
  cfg.dim = 2;
  cfg.modes = 16;
  cfg.params.m = 4;
  cfg.params.n = 6;
  cfg.params.dt = 1e-4;
  cfg.paths = 16;
  cfg.steps = 10;
  return cfg;
}

void BM_EnsembleSerial(benchmark::State& state) {
  const auto cfg = small_config();
  for (auto _ : state) benchmark::DoNotOptimize(nsch::ensemble::run_paths_serial(cfg));
  state.SetItemsProcessed(state.iterations() * cfg.paths);
}

void BM_EnsembleOpenMP(benchmark::State& state) {
  const auto cfg = small_config();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nsch::ensemble::run_paths_parallel(cfg, threads));
  state.SetItemsProcessed(state.iterations() * cfg.paths);
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleOpenMP)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
