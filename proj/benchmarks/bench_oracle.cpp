#include <benchmark/benchmark.h>

#include <random>

#include "kep/dynsim/dynsim.hpp"
#include "kep/oracle/oracle.hpp"

using namespace kep;

namespace {

oracle::PlainGraph graph(std::size_t n, double density) {
  std::mt19937_64 rng(n);
  std::bernoulli_distribution edge(density);
  std::uniform_int_distribution<oracle::Weight> weight(1, 5);
  oracle::PlainGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && edge(rng)) g.set_edge(i, j, weight(rng));
  return g;
}

void BM_Greedy(benchmark::State& state) {
  const auto g = graph(static_cast<std::size_t>(state.range(0)), 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::greedy_solve(g, 3));
}
BENCHMARK(BM_Greedy)->Arg(20)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_ExactDp(benchmark::State& state) {
  const auto g = graph(static_cast<std::size_t>(state.range(0)), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::exact_solve(g, 3));
}
BENCHMARK(BM_ExactDp)->Arg(10)->Arg(14)->Arg(18)->Unit(benchmark::kMillisecond);

void BM_OptimalPacking(benchmark::State& state) {
  const auto g = graph(static_cast<std::size_t>(state.range(0)), 0.02);
  for (auto _ : state) benchmark::DoNotOptimize(oracle::optimal_packing(g, 3));
}
BENCHMARK(BM_OptimalPacking)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_SimulationYear(benchmark::State& state) {
  dynsim::SimConfig config;
  config.horizon_days = 365;
  config.arrival_rate_days = 2;
  config.match_run_interval_days = 7;
  config.model = state.range(0) ? dynsim::Model::kGreedy : dynsim::Model::kConventional;
  for (auto _ : state) benchmark::DoNotOptimize(dynsim::run_sim(config));
  state.SetLabel(dynsim::to_string(config.model));
}
BENCHMARK(BM_SimulationYear)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
