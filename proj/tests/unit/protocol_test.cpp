#include <gtest/gtest.h>

#include <random>

#include "kep/abb/session.hpp"
#include "kep/protocol/client.hpp"
#include "kep/protocol/protocol.hpp"
#include "support/brute_force.hpp"
#include "support/fixtures.hpp"

using namespace kep;
using namespace kep::abb;
using namespace kep::protocol;
using kep::oracle::PlainGraph;
using kep::testing::random_graph;
using kep::testing::share_graph;

namespace {

PartyOptions seeded(std::uint64_t seed) {
  PartyOptions o;
  o.seed = seed;
  return o;
}

ProtocolConfig identity_config(unsigned kappa) {
  ProtocolConfig c;
  c.kappa = kappa;
  c.shuffle.mode = gates::ShuffleMode::kIdentity;
  return c;
}

oracle::Assignment solve(const PlainGraph& g, const ProtocolConfig& config,
                         std::uint64_t seed = 1) {
  auto out = run_local(seeded(seed), [&](Party& p) {
    auto sol = run_on_graph(p, config, share_graph(p, g));
    return open_solution(p, sol);
  });
  EXPECT_EQ(out[0], out[1]);
  EXPECT_EQ(out[0], out[2]);
  return out[0];
}

PlainGraph complete(std::size_t n) {
  PlainGraph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) g.set_edge(i, j, 1);
  return g;
}

}  // namespace

TEST(Subsets, Counts) {
  EXPECT_EQ(build_subsets(4, 3).size(), 10u);
  auto two = build_subsets(5, 2);
  EXPECT_EQ(two.size(), 10u);
  for (std::size_t i = 0; i < two.size(); ++i) {
    EXPECT_EQ(two.nodes[i][2], 5u);
    EXPECT_TRUE(two.is_pair(i));
  }
  auto tiny = build_subsets(2, 3);
  ASSERT_EQ(tiny.size(), 1u);
  EXPECT_EQ(tiny.nodes[0], (std::array<std::uint32_t, 3>{0, 1, 2}));
  EXPECT_THROW(build_subsets(1, 3), InvalidArgument);
  EXPECT_THROW(build_subsets(4, 4), InvalidArgument);
}

TEST(Client, DealReconstruct) {
  Prg prg(Prg::derive_key(1, 2), 0);
  std::vector<Ring> values = {0, 1, 42, ~Ring{0}};
  auto views = deal(values, prg);
  EXPECT_EQ(reconstruct(views), values);
  views[1][2].first += 1;
  EXPECT_THROW(reconstruct(views), InconsistentShares);
}

TEST(Client, DealtViewsWorkWithPeers) {
  Prg prg(Prg::derive_key(3, 4), 0);
  std::vector<Ring> values = {6, 7};
  auto views = deal(values, prg);
  auto out = run_local(seeded(2), [&](Party& p) {
    const auto& v = views[p.id()];
    return p.open(p.mul(std::span(v).first(1), std::span(v).subspan(1)));
  });
  EXPECT_EQ(out[0], std::vector<Ring>{42});
}

TEST(Evaluation, Examples) {
  // Nodes 0,1 form a 2-cycle; nodes 2,3,4 only have orientation (2,4,3).
  PlainGraph g(5);
  g.set_edge(0, 1, 1);
  g.set_edge(1, 0, 1);
  g.set_edge(2, 4, 1);
  g.set_edge(4, 3, 1);
  g.set_edge(3, 2, 1);
  const auto subsets = build_subsets(5, 3);
  auto out = run_local(seeded(3), [&](Party& p) {
    auto graph = share_graph(p, g);
    auto e = evaluation_phase(p, graph.m, graph.w, subsets);
    return std::pair{p.open(e.weights), p.open(e.choose_first)};
  });
  const auto& weights = out[0].first;
  const auto& cf = out[0].second;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const auto& s = subsets.nodes[i];
    if (s == std::array<std::uint32_t, 3>{0, 1, 5}) EXPECT_EQ(weights[i], 2u);
    else if (s == std::array<std::uint32_t, 3>{2, 3, 4}) {
      EXPECT_EQ(weights[i], 3u);
      EXPECT_EQ(cf[i], 0u);
    } else {
      EXPECT_EQ(weights[i], 0u) << s[0] << s[1] << s[2];
    }
  }
}

TEST(Approximation, IterationCount) {
  for (std::size_t n : {2u, 5u, 8u}) {
    auto out = run_local(seeded(4), [&](Party& p) {
      run_on_graph(p, identity_config(3), share_graph(p, complete(n)));
      return p.stats().calls("max_weight_set");
    });
    EXPECT_EQ(out[0], n / 2);
  }
}

TEST(Approximation, SingleTwoCycle) {
  PlainGraph g(5);
  g.set_edge(1, 3, 4);
  g.set_edge(3, 1, 2);
  const auto subsets = build_subsets(5, 3);
  auto out = run_local(seeded(5), [&](Party& p) {
    auto graph = share_graph(p, g);
    auto e = evaluation_phase(p, graph.m, graph.w, subsets);
    return p.open(approximation_phase(p, subsets, e.weights, identity_config(3)));
  });
  const std::array<std::uint32_t, 3> only{1, 3, 5};
  for (std::size_t i = 0; i < subsets.size(); ++i)
    EXPECT_EQ(out[0][i], subsets.nodes[i] == only ? 1u : 0u);
}

TEST(Resolution, CompleteTriangle) {
  auto a = solve(complete(3), identity_config(3));
  EXPECT_EQ(a.donor, (std::vector<std::uint32_t>{3, 1, 2}));
  EXPECT_EQ(a.recipient, (std::vector<std::uint32_t>{2, 3, 1}));
}

TEST(Resolution, EmptyGraph) {
  auto a = solve(PlainGraph(6), identity_config(3));
  EXPECT_EQ(a.donor, std::vector<std::uint32_t>(6, 0));
  EXPECT_EQ(a.recipient, std::vector<std::uint32_t>(6, 0));
}

TEST(Resolution, TwoCrossovers) {
  PlainGraph g(4);
  for (auto [u, v] : {std::pair{0, 1}, {1, 0}, {2, 3}, {3, 2}}) g.set_edge(u, v, 1);
  for (unsigned kappa : {2u, 3u}) {
    auto a = solve(g, identity_config(kappa));
    EXPECT_EQ(a.donor, (std::vector<std::uint32_t>{2, 1, 4, 3}));
    EXPECT_EQ(a.recipient, (std::vector<std::uint32_t>{2, 1, 4, 3}));
  }
}

TEST(Protocol, CrossoverOnlyIgnoresTriangles) {
  PlainGraph g(3);
  g.set_edge(0, 1, 1);
  g.set_edge(1, 2, 1);
  g.set_edge(2, 0, 1);
  auto a = solve(g, identity_config(2));
  EXPECT_EQ(a.donor, std::vector<std::uint32_t>(3, 0));
}

TEST(Protocol, MatchesGreedyOracle) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + trial % 8;
    const unsigned kappa = trial % 3 == 0 ? 2 : 3;
    auto g = random_graph(rng, n, 0.35, 1 + trial % 5);
    auto expected = oracle::to_assignment(oracle::greedy_solve(g, kappa), n);
    EXPECT_EQ(solve(g, identity_config(kappa), trial), expected) << "trial " << trial;
  }
}

TEST(Protocol, SeededShuffleMatchesRelabeledGreedy) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 4 + trial % 5;
    auto g = random_graph(rng, n, 0.5, 3);
    ProtocolConfig config;
    config.shuffle = {gates::ShuffleMode::kSeeded, 1000u + trial};
    auto perm = gates::seeded_permutation(config.shuffle.seed, n);
    auto expected = oracle::to_assignment(oracle::greedy_solve(g, 3, perm), n);
    EXPECT_EQ(solve(g, config, trial), expected) << "trial " << trial;
  }
}

TEST(Protocol, SubsetShuffleMatchesReorderedGreedy) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 4 + trial % 5;
    const unsigned kappa = trial % 2 ? 2 : 3;
    auto g = random_graph(rng, n, 0.6, 1);
    ProtocolConfig config;
    config.kappa = kappa;
    config.shuffle_subsets = true;
    config.shuffle = {gates::ShuffleMode::kSeeded, 77u + trial};
    const std::size_t s = oracle::subset_count(n, kappa);
    auto pi = gates::seeded_row_permutation(config.shuffle.seed, s);
    std::vector<std::uint32_t> order(s);
    for (std::size_t i = 0; i < s; ++i) order[pi[i]] = static_cast<std::uint32_t>(i);
    auto node_perm = gates::seeded_permutation(config.shuffle.seed, n);
    // The table greedy runs on the relabeled graph; map its cycles back.
    auto relabeled = g.relabeled(node_perm);
    auto packing = oracle::greedy_solve_table(relabeled, kappa, order);
    auto inverse = abb::invert_permutation(node_perm);
    for (auto& c : packing.cycles)
      for (auto& v : c) v = inverse[v];
    EXPECT_EQ(solve(g, config, trial), oracle::to_assignment(packing, n)) << "trial " << trial;
  }
}

TEST(Protocol, RandomShuffleIsValidAndBounded) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 5 + trial % 4;
    const unsigned kappa = trial % 2 ? 2 : 3;
    auto g = random_graph(rng, n, 0.5, 4);
    ProtocolConfig config;
    config.kappa = kappa;
    config.shuffle_subsets = trial % 3 == 0;
    auto a = solve(g, config, 100 + trial);
    auto packing = oracle::from_assignment(g, a);
    auto report = oracle::validate(g, packing, kappa);
    EXPECT_TRUE(report.ok()) << report.detail;
    auto best = oracle::exact_solve(g, kappa).total_weight;
    EXPECT_GE(kappa * packing.total_weight, best);
  }
}

TEST(Protocol, TranscriptIndependentOfInput) {
  auto summary = [](const PlainGraph& g, bool shuffle_subsets) {
    ProtocolConfig config;
    config.shuffle = {gates::ShuffleMode::kSeeded, 5};
    config.shuffle_subsets = shuffle_subsets;
    auto out = run_local(seeded(10), [&](Party& p) {
      run_on_graph(p, config, share_graph(p, g));
      return p.channel().transcript().summary();
    });
    return out;
  };
  std::mt19937_64 rng(11);
  auto dense = random_graph(rng, 7, 0.8, 9);
  for (bool flag : {false, true}) EXPECT_EQ(summary(PlainGraph(7), flag), summary(dense, flag));
}

TEST(Protocol, FromQuotes) {
  std::mt19937_64 rng(12);
  std::vector<compat::Quote> quotes;
  for (int i = 0; i < 7; ++i) quotes.push_back(kep::testing::random_quote(rng, 5, 0.1, 0.1));
  auto plain = compat::plain_graph(quotes, compat::PrioPolicy::constant_one());
  auto expected = oracle::to_assignment(oracle::greedy_solve(plain, 3), 7);
  ProtocolStats stats;
  auto out = run_local(seeded(13), [&](Party& p) {
    auto sq = kep::testing::share_quotes(p, quotes, 5);
    ProtocolStats local;
    auto sol = run_protocol(p, identity_config(3), sq, &local);
    if (p.id() == 0) stats = local;
    return open_solution(p, sol);
  });
  EXPECT_EQ(out[0], expected);
  EXPECT_EQ(stats.subsets, 35u + 21u);
  EXPECT_EQ(stats.iterations, 3u);
}

TEST(Protocol, RunsOn32BitRing) {
  PartyOptions o = seeded(14);
  o.ring.bits = 32;
  PlainGraph g = complete(5);
  g.set_edge(3, 4, std::uint64_t{1} << 20);
  g.set_edge(4, 3, std::uint64_t{1} << 20);
  auto out = run_local(o, [&](Party& p) {
    return open_solution(p, run_on_graph(p, identity_config(3), share_graph(p, g)));
  });
  EXPECT_EQ(out[0], oracle::to_assignment(oracle::greedy_solve(g, 3), 5));
}
