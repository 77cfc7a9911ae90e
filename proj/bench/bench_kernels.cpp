// Serial against OpenMP for the parallel kernels, plus span-table scaling in
// the number of steps. Argument 0 selects serial, 1 parallel.
#include <benchmark/benchmark.h>

#include <random>

#include "storyline/oracle.hpp"
#include "storyline/pipeline.hpp"
#include "storyline/routing.hpp"
#include "storyline/wigglefree.hpp"

using namespace storyline;

namespace {

// n characters, all active, each step a random permutation with one meeting
// of the two lowest characters.
OrderedStorylineInstance permutations(std::size_t n, std::size_t steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  StorylineInstance base;
  base.steps = steps;
  for (std::size_t c = 0; c < n; ++c) base.characters.push_back({"c" + std::to_string(c), {0, steps - 1}, {}});
  std::vector<std::vector<CharIndex>> orders(steps);
  for (Step t = 0; t < steps; ++t) {
    for (CharIndex c = 0; c < n; ++c) orders[t].push_back(c);
    for (std::size_t i = n; i > 1; --i) std::swap(orders[t][i - 1], orders[t][rng() % i]);
    if (n >= 2) base.meetings.push_back({t, {orders[t][0], orders[t][1]}});
  }
  return OrderedStorylineInstance(std::move(base), std::move(orders));
}

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void BM_Oracle(benchmark::State& state) {
  const auto inst = permutations(4, 4, 1);
  const OracleConfig cfg{100'000'000, mode(state), false};
  for (auto _ : state) benchmark::DoNotOptimize(bruteForceOracle(inst, {}, WiggleObjective::LWH, cfg).optimum);
}
BENCHMARK(BM_Oracle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PairArcs(benchmark::State& state) {
  const auto inst = permutations(200, 20, 2);
  const SpanTables tables(inst, {});
  for (auto _ : state) benchmark::DoNotOptimize(pairArcs(tables, mode(state)).size());
}
BENCHMARK(BM_PairArcs)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RouteAllGaps(benchmark::State& state) {
  const auto inst = permutations(12, 40, 3);
  const auto layout = optimizeLayout(inst, {}, Objective::LWH);
  for (auto _ : state) benchmark::DoNotOptimize(routeAllGaps(inst, layout.coord, 0.5, mode(state)).size());
}
BENCHMARK(BM_RouteAllGaps)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SpanTables(benchmark::State& state) {
  const auto inst = permutations(60, static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(computeSpanTables(inst, {}).stepCount());
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpanTables)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
