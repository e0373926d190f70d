// Serial reference path against the OpenMP path on the independent sweeps.
// Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "wspectra/neck_lab.hpp"
#include "wspectra/singular_spectra.hpp"

using namespace wspectra;

namespace {
Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_ModeSweep(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(spectra::verify_singular_2d(1, {2, 4, 8}, 8, 200, exec_of(st)));
}

void BM_DivCorpus(benchmark::State& st) {
  std::mt19937_64 rng(7);
  std::vector<spectra::DivSource> corpus;
  for (int i = 0; i < 16; ++i) corpus.push_back(spectra::random_div_source(rng));
  for (auto _ : st) benchmark::DoNotOptimize(spectra::verify_div_weight_bound(3.0, corpus, 200, 0.01, exec_of(st)));
}

void BM_NeckSweep(benchmark::State& st) {
  neck::NeckFamily fam;
  fam.t_list = {1e-2, 3e-3, 1e-3, 3e-4};
  for (auto _ : st) benchmark::DoNotOptimize(neck::neck_sweep(fam, 12, 0.75, 0.75, 0.6, 64, exec_of(st)));
}
}  // namespace

BENCHMARK(BM_ModeSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DivCorpus)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NeckSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
