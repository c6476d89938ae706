// Serial reference kernels against their OpenMP counterparts. Run with
// OMP_NUM_THREADS set to compare thread counts.

#include <benchmark/benchmark.h>

#include <numeric>

#include "feedrank/evaluation.hpp"
#include "feedrank/index_engine.hpp"
#include "feedrank/pipeline.hpp"
#include "feedrank/synth.hpp"
#include "feedrank/transition_model.hpp"

using namespace feedrank;

namespace {

struct Fixture {
  GeneratorConfig generator;
  Timelines timelines;
  ModelFile model;
  std::vector<std::size_t> items;
  EvaluationConfig eval;

  Fixture() {
    generator.days = 10;
    const auto events = generate_stream(generator);
    timelines = build_timelines(events);
    RunConfig run;
    model = fit_model(timelines, run);
    attach_indices(model);
    items.resize(timelines.size());
    std::iota(items.begin(), items.end(), std::size_t{0});
    const auto w = resolve_windows(timelines, run);
    eval.window = w.eval;
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

const std::vector<double> kBetas{0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99, 0.999};

void BM_EvaluateSerial(benchmark::State& state) {
  const auto& f = fixture();
  const auto space = state_space_of(f.model);
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::evaluate_run(f.timelines, space, &*f.model.indices, f.eval));
}

void BM_EvaluateParallel(benchmark::State& state) {
  const auto& f = fixture();
  const auto space = state_space_of(f.model);
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate_run(f.timelines, space, &*f.model.indices, f.eval));
}

void BM_EstimateSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::estimate_p1(f.timelines, f.items, f.model.bins, 0.0));
}

void BM_EstimateParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(estimate_p1(f.timelines, f.items, f.model.bins, 0.0));
}

void BM_GenerateSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(serial::generate_stream(f.generator));
}

void BM_GenerateParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(generate_stream(f.generator));
}

void BM_BetaSweepSerial(benchmark::State& state) {
  const auto& f = fixture();
  const auto space = state_space_of(f.model);
  for (auto _ : state)
    benchmark::DoNotOptimize(serial::compute_indices_sweep(f.model.model, space.rewards(), kBetas));
}

void BM_BetaSweepParallel(benchmark::State& state) {
  const auto& f = fixture();
  const auto space = state_space_of(f.model);
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_indices_sweep(f.model.model, space.rewards(), kBetas));
}

}  // namespace

BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EstimateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GenerateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BetaSweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BetaSweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
