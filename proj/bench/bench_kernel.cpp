// Serial reference vs OpenMP repetition kernel on a six-edition synthetic piece.

#include <benchmark/benchmark.h>

#include <vector>

#include "barsample/experiment.hpp"
#include "barsample/synth.hpp"

namespace {

using namespace barsample;

struct Corpus {
  std::vector<Score> editions;
  MeasureCensus census;
  std::vector<PairComparison> pairs;
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus out;
    std::vector<std::int64_t> density(97);
    for (std::size_t i = 0; i < density.size(); ++i) density[i] = 12 + static_cast<std::int64_t>((i * 7) % 20);
    const auto base = generate_base_score(97, density, "e0");
    out.editions.push_back(base);
    for (int e = 1; e < 6; ++e) {
      const DifferencePlan plan{DifferenceMode::Uniform, 150 + 40 * e, 1, static_cast<std::uint64_t>(e), {}};
      out.editions.push_back(plant_differences(base, plan, "e" + std::to_string(e)).mutated);
    }
    out.census = measure_census(base);
    out.pairs = compare_full(out.editions);
    return out;
  }();
  return c;
}

KernelInput input(Algorithm alg, std::int64_t reps) {
  const auto& c = corpus();
  return KernelInput{&c.census, SamplingParams{}, alg, 42, reps, c.pairs};
}

void BM_KernelSerial(benchmark::State& state) {
  const auto in = input(static_cast<Algorithm>(state.range(0)), 10000);
  for (auto _ : state) benchmark::DoNotOptimize(run_repetitions_serial(in));
  state.SetItemsProcessed(state.iterations() * in.repetitions * static_cast<std::int64_t>(in.pairs.size()));
}

void BM_KernelParallel(benchmark::State& state) {
  const auto in = input(static_cast<Algorithm>(state.range(0)), 10000);
  for (auto _ : state) benchmark::DoNotOptimize(run_repetitions_parallel(in, static_cast<int>(state.range(1))));
  state.SetItemsProcessed(state.iterations() * in.repetitions * static_cast<std::int64_t>(in.pairs.size()));
}

void BM_CompareFull(benchmark::State& state) {
  const auto& c = corpus();
  for (auto _ : state) benchmark::DoNotOptimize(compare_full(c.editions));
}

}  // namespace

BENCHMARK(BM_KernelSerial)->Arg(0)->Arg(1)->Arg(2)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelParallel)->ArgsProduct({{0, 1, 2}, {1, 2, 4, 8}})->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CompareFull)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
