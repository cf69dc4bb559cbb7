#include <benchmark/benchmark.h>

#include <numeric>

#include "kep/abb/session.hpp"
#include "kep/gates/gates.hpp"

using namespace kep;
using abb::Party;

// Peers run on their own threads, so timings are wall clock.

namespace {

abb::PartyOptions seeded() {
  abb::PartyOptions o;
  o.seed = 1;
  return o;
}

abb::ShareVector dealt(Party& party, std::size_t n, abb::Ring modulus) {
  std::vector<abb::Ring> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = (i * 2654435761u) % modulus;
  return party.input(0, values, n);
}

void BM_Gt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    abb::run_local(seeded(), [&](Party& party) {
      const auto x = dealt(party, n, 1 << 20);
      const auto y = dealt(party, n, 1 << 19);
      benchmark::DoNotOptimize(gates::gt(party, x, y));
      return 0;
    });
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Gt)->Arg(100)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_Demux(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    abb::run_local(seeded(), [&](Party& party) {
      const auto x = dealt(party, 1, len);
      benchmark::DoNotOptimize(gates::demux(party, x[0], len));
      return 0;
    });
  }
}
BENCHMARK(BM_Demux)->Arg(16)->Arg(256)->Arg(4096)->Unit(benchmark::kMillisecond)->UseRealTime();

// One greedy selection over all 2- and 3-subsets of N nodes.
void BM_MaxWeightSet(benchmark::State& state) {
  const auto nodes = static_cast<std::size_t>(state.range(0));
  const std::size_t subsets = nodes * (nodes - 1) / 2 + nodes * (nodes - 1) * (nodes - 2) / 6;
  std::uint64_t bytes = 0;
  for (auto _ : state) {
    auto sent = abb::run_local(seeded(), [&](Party& party) {
      gates::SubsetEncoding enc;
      std::vector<abb::Ring> idx(subsets);
      std::iota(idx.begin(), idx.end(), 0);
      enc.indices = party.input(0, idx, subsets);
      enc.weights = dealt(party, subsets, 7);
      enc.nodes = abb::ShareMatrix(subsets, 3);
      enc.nodes.data() = dealt(party, subsets * 3, nodes);
      const auto before = party.channel().transcript().bytes_sent();
      benchmark::DoNotOptimize(gates::max_weight_set(party, enc, subsets, nodes));
      return party.channel().transcript().bytes_sent() - before;
    });
    bytes = sent[0] + sent[1] + sent[2];
  }
  state.counters["subsets"] = static_cast<double>(subsets);
  state.counters["bytes"] = static_cast<double>(bytes);
}
BENCHMARK(BM_MaxWeightSet)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
