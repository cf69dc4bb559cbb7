#include <benchmark/benchmark.h>

#include <random>

#include "kep/abb/session.hpp"
#include "kep/datagen/datagen.hpp"
#include "kep/protocol/protocol.hpp"
#include "kep/transport/transcript.hpp"

using namespace kep;
using abb::Party;

namespace {

// Dense random graph so the run is not dominated by empty subsets.
oracle::PlainGraph graph(std::size_t n) {
  std::mt19937_64 rng(n);
  std::bernoulli_distribution edge(0.3);
  oracle::PlainGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && edge(rng)) g.set_edge(i, j, 1);
  return g;
}

compat::CompatGraph share(Party& party, const oracle::PlainGraph& g) {
  const std::size_t n = g.size();
  std::vector<abb::Ring> m(n * n), w(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      m[i * n + j] = g.edge(i, j);
      w[i * n + j] = g.weight(i, j);
    }
  compat::CompatGraph out{abb::ShareMatrix(n, n), abb::ShareMatrix(n, n)};
  out.m.data() = party.input(0, m, n * n);
  out.w.data() = party.input(0, w, n * n);
  return out;
}

void run(benchmark::State& state, const protocol::ProtocolConfig& config) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = graph(n);
  abb::PartyOptions options;
  options.seed = 1;
  std::uint64_t bytes = 0;
  for (auto _ : state) {
    auto sent = abb::run_local(options, [&](Party& party) {
      auto shared = share(party, g);
      const auto before = party.channel().transcript().bytes_sent();
      benchmark::DoNotOptimize(protocol::run_on_graph(party, config, std::move(shared)));
      return party.channel().transcript().bytes_sent() - before;
    });
    bytes = sent[0] + sent[1] + sent[2];
  }
  state.counters["bytes"] = static_cast<double>(bytes);
}

void BM_ProtocolOnGraph(benchmark::State& state) {
  protocol::ProtocolConfig config;
  config.shuffle.mode = gates::ShuffleMode::kRandom;
  run(state, config);
}
BENCHMARK(BM_ProtocolOnGraph)->Arg(5)->Arg(10)->Arg(15)->Arg(20)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ProtocolCrossoverOnly(benchmark::State& state) {
  protocol::ProtocolConfig config;
  config.kappa = 2;
  run(state, config);
}
BENCHMARK(BM_ProtocolCrossoverOnly)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ProtocolFromQuotes(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const datagen::PopulationModel model;
  const auto quotes = datagen::gen_pairs(n, model, 3);
  const std::size_t width = compat::flat_size(model.antigens);
  std::vector<abb::Ring> flat;
  for (const auto& q : quotes) {
    const auto f = compat::flatten(q);
    flat.insert(flat.end(), f.begin(), f.end());
  }
  protocol::ProtocolConfig config;
  abb::PartyOptions options;
  options.seed = 1;
  for (auto _ : state) {
    abb::run_local(options, [&](Party& party) {
      const auto shares = party.input(0, flat, flat.size());
      std::vector<compat::SharedQuote> shared;
      for (std::size_t i = 0; i < n; ++i)
        shared.push_back(
            compat::unflatten(std::span(shares).subspan(i * width, width), model.antigens));
      benchmark::DoNotOptimize(protocol::run_protocol(party, config, shared));
      return 0;
    });
  }
}
BENCHMARK(BM_ProtocolFromQuotes)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
