// SPDX-License-Identifier: Apache-2.0
// OpenMP grid kernels against their serial references on the full-size default scenario.
#include <memory>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "bimimo/baseline.hpp"
#include "bimimo/harness.hpp"
#include "bimimo/kernels.hpp"
#include "bimimo/reference.hpp"

using namespace bimimo;

namespace {

struct Setup {
  Scenario sc = default_scenario();
  SignalModel model;
  std::unique_ptr<Xi1Evaluator> xi1;
  BlockerSet blockers;
  std::unique_ptr<Xi2Evaluator> xi2;
  CMatrix music_basis;
  std::vector<int> delays;
  std::vector<double> dopplers;
  std::vector<double> coarse = angle_grid(0.0, 180.0, 0.5);
  std::vector<double> fine = angle_grid(0.0, 180.0, 0.01);

  Setup() {
    RunArtifacts art;
    RunOptions opt;
    run_scenario(sc, opt, 1, &art);
    model = make_signal_model(sc, art.codes);
    const DataCube cube = zero_doppler_notch(art.cube, art.symbols);
    const StageOne &s1 = art.vst->stage1;
    xi1 = std::make_unique<Xi1Evaluator>(art.codes, s1.basis.signal, model.chip_period_s);
    delays = s1.delays;
    dopplers = s1.dopplers;
    blockers = build_blockers(art.codes, art.vst->delay_doppler, model.chip_period_s);
    const VirtualSnapshots v = apply_virtual_extension(cube, blockers);
    xi2 = std::make_unique<Xi2Evaluator>(model, blockers, subspace_from_snapshots(v.gated(), 3).signal);
    music_basis = subspace_split(spatial_covariance(cube), 3).signal;
  }
};

const Setup &setup() {
  static const Setup s;
  return s;
}

void threads_arg(benchmark::State &state) { omp_set_num_threads(static_cast<int>(state.range(0))); }

void BM_xi1_serial(benchmark::State &state) {
  const Setup &s = setup();
  for (auto _ : state) benchmark::DoNotOptimize(reference::xi1_surface_serial(*s.xi1, s.delays, s.dopplers));
}

void BM_xi1_omp(benchmark::State &state) {
  const Setup &s = setup();
  threads_arg(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::xi1_surface(*s.xi1, s.delays, s.dopplers));
}

void BM_xi2_serial(benchmark::State &state) {
  const Setup &s = setup();
  for (auto _ : state)
    for (int k = 0; k < s.xi2->contexts(); ++k)
      benchmark::DoNotOptimize(reference::xi2_context_surface_serial(*s.xi2, k, s.coarse, s.coarse));
}

void BM_xi2_omp(benchmark::State &state) {
  const Setup &s = setup();
  threads_arg(state);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::xi2_surfaces(*s.xi2, s.coarse, s.coarse));
}

void BM_music_serial(benchmark::State &state) {
  const Setup &s = setup();
  const double lambda = s.model.wavelength_m;
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::music_spectrum_serial(s.music_basis, s.sc.rx_array, lambda, s.fine));
}

void BM_music_omp(benchmark::State &state) {
  const Setup &s = setup();
  threads_arg(state);
  const double lambda = s.model.wavelength_m;
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::music_spectrum(s.music_basis, s.sc.rx_array, lambda, s.fine));
}

const int max_threads = omp_get_max_threads();

} // namespace

BENCHMARK(BM_xi1_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_xi1_omp)->RangeMultiplier(2)->Range(1, max_threads)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_xi2_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_xi2_omp)->RangeMultiplier(2)->Range(1, max_threads)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_music_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_music_omp)->RangeMultiplier(2)->Range(1, max_threads)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
