#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mchain/comm_network.hpp"
#include "mchain/distributions.hpp"
#include "mchain/pmu_chain.hpp"

using namespace mchain;

static void BM_SampleGmm(benchmark::State& state) {
  const GmmParams g{{0.2, 0.3, 0.5}, {0.01, -0.02, 0.004}, {0.005, 0.01, 0.002}};
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_gmm(g, static_cast<std::size_t>(state.range(0)), rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleGmm)->Arg(1000)->Arg(100000);

static void BM_Kld(benchmark::State& state) {
  const GmmParams g{{0.5, 0.5}, {-0.02, 0.02}, {0.005, 0.005}};
  Rng rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kld_gmm_vs_gaussian(g, 0.0, 0.0206, 100000, rng));
  }
}
BENCHMARK(BM_Kld);

static void BM_FitGmm(benchmark::State& state) {
  FitTarget t;
  t.k_components = 3;
  t.total_std = 0.01;
  t.similarity_threshold = 0.05;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    Rng rng(seed++);
    benchmark::DoNotOptimize(fit_gmm_random_search(t, rng));
  }
}
BENCHMARK(BM_FitGmm)->Unit(benchmark::kMillisecond);

static void BM_DelaySchedule(benchmark::State& state) {
  const LmmParams l{{0.6, 0.4}, {std::log(0.08), std::log(0.4)}, {0.9, 0.5}};
  Rng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        build_delay_schedule(l, 2.0, static_cast<std::size_t>(state.range(0)), rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DelaySchedule)->Arg(10000);

static void BM_EstimatePhasor(benchmark::State& state) {
  const FilterSpec spec = make_filter(static_cast<double>(state.range(0)), 60.0);
  std::vector<double> x(static_cast<std::size_t>(spec.order) + 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = std::numbers::sqrt2 * std::cos(2.0 * std::numbers::pi * 60.0 * i / spec.sampling_freq);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_phasor(x, spec.half(), spec));
  }
}
BENCHMARK(BM_EstimatePhasor)->Arg(10)->Arg(60);

static void BM_EstimateFrames(benchmark::State& state) {
  const FilterSpec spec = make_filter(60.0, 60.0);
  PhasorTrack track;
  track.times = {0.0, 10.0};
  track.phasors = {{1.0, 0.1, 0.5, -0.2}, {1.0, 0.2, 0.5, -0.1}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_frames(track, spec, {}, FrequencyProfile(59.9)));
  }
}
BENCHMARK(BM_EstimateFrames)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
