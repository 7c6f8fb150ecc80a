// Microbenchmarks for the hot paths: window classification, reference
// planning, delay simulation and the LSTM forward/training steps.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "bandsleep/cell.hpp"
#include "bandsleep/lstm.hpp"
#include "bandsleep/planner.hpp"
#include "bandsleep/sim.hpp"
#include "bandsleep/synth.hpp"

namespace {

using namespace bandsleep;

void BM_BandsRequired(benchmark::State& state) {
  const CellConfig cell = default_cell();
  const Thresholds th = thresholds(cell);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::uint64_t> theta(0, 6000);
  std::vector<std::uint64_t> draws(4096);
  for (auto& t : draws) t = theta(rng);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bands_required(draws[i], th, cell));
    i = (i + 1) & 4095;
  }
}
BENCHMARK(BM_BandsRequired);

void BM_DemandSliceMinute(benchmark::State& state) {
  SynthParams params;
  params.seed = 3;
  const SynthProfile profile = synth_profile(params, default_cell(), 3600);
  std::vector<std::uint32_t> demand;
  for (auto _ : state) {
    profile.demand_slice(0, 60000, demand);
    benchmark::DoNotOptimize(demand.data());
  }
  state.SetItemsProcessed(state.iterations() * 60000);
}
BENCHMARK(BM_DemandSliceMinute);

void BM_PlanReferenceDay(benchmark::State& state) {
  SynthParams params;
  params.seed = 3;
  const SynthProfile profile = synth_profile(params, default_cell(), 86400);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_reference(profile));
  }
}
BENCHMARK(BM_PlanReferenceDay);

void BM_SimulateHour(benchmark::State& state) {
  SynthParams params;
  params.seed = 3;
  const SynthProfile profile = synth_profile(params, default_cell(), 3600);
  const BandPlan plan = plan_reference(profile);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(profile, 0, profile.tti_count(), plan));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(profile.tti_count()));
}
BENCHMARK(BM_SimulateHour);

void BM_LstmForward(benchmark::State& state) {
  LstmModel model(2, 32, 12, 4);
  model.init_params(1);
  std::vector<double> window(12, 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward(model, window));
  }
}
BENCHMARK(BM_LstmForward);

void BM_TrainEpoch(benchmark::State& state) {
  std::vector<int> series;
  const int pattern[] = {1, 2, 3, 4, 3, 2};
  while (series.size() < 300) series.push_back(pattern[series.size() % 6]);
  const Dataset data = make_windows(series, 12, 4);
  Hyperparams hp;
  hp.learning_rate = 3e-3;
  hp.epochs = 1;
  hp.hidden_size = 16;
  hp.num_layers = 2;
  hp.batch_size = 16;
  hp.window_k = 12;
  hp.val_fraction = 0.0;
  hp.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(data, hp, 4));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_TrainEpoch);

}  // namespace

BENCHMARK_MAIN();
