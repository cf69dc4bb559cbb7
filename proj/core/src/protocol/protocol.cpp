#include "kep/protocol/protocol.hpp"

#include "kep/error.hpp"

namespace kep::protocol {

using abb::Ring;
using Clock = std::chrono::steady_clock;

namespace {

void check_ring(const Party& party, const ProtocolConfig& config) {
  // Subset weights reach 3 * max_weight and are compared with a +1 offset.
  const unsigned bits = party.ring().bits;
  if (3 * config.policy.max_weight + 1 >= (Ring{1} << (bits - 2)))
    throw InvalidArgument("ring of " + std::to_string(bits) + " bits is too narrow for max weight " +
                          std::to_string(config.policy.max_weight));
}

unsigned node_width(unsigned kappa) { return kappa == 2 ? 2 : 3; }

}  // namespace

void ProtocolConfig::validate() const {
  if (kappa != 2 && kappa != 3) throw InvalidArgument("kappa must be 2 or 3");
  policy.validate();
}

PublicSubsets build_subsets(std::size_t n, unsigned kappa) {
  if (n < 2) throw InvalidArgument("at least two pairs are needed");
  if (kappa != 2 && kappa != 3) throw InvalidArgument("kappa must be 2 or 3");
  return {n, kappa, oracle::enumerate_subsets(n, kappa)};
}

Construction shuffle_graph(Party& party, compat::CompatGraph graph, const ProtocolConfig& config) {
  Construction c{std::move(graph.m), std::move(graph.w), {}};
  if (c.m.rows() != c.m.cols() || c.w.rows() != c.m.rows() || c.w.cols() != c.m.cols())
    throw InvalidArgument("adjacency and weight matrices must be square and of equal size");
  std::array<ShareMatrix*, 2> both{&c.m, &c.w};
  c.sigma = gates::shuffle_nodes(party, both, config.shuffle);
  return c;
}

Construction construction_phase(Party& party, std::span<const compat::SharedQuote> quotes,
                                const ProtocolConfig& config) {
  return shuffle_graph(party, compat::build_graph(party, quotes, config.policy), config);
}

Evaluation evaluation_phase(Party& party, const ShareMatrix& m, const ShareMatrix& w,
                            const PublicSubsets& subsets) {
  const std::size_t s = subsets.size();

  // Round one: for a 3-subset {u, v, w} the partial products
  // M(u,v)M(v,w), M(w,u)(W(u,v)+W(v,w)+W(w,u)) and the same for the
  // reversed orientation; for a 2-subset M(u,v)M(v,u).
  ShareVector lhs, rhs;
  lhs.reserve(4 * s);
  rhs.reserve(4 * s);
  for (std::size_t i = 0; i < s; ++i) {
    const auto [u, v, x] = subsets.nodes[i];
    if (subsets.is_pair(i)) {
      lhs.push_back(m(u, v));
      rhs.push_back(m(v, u));
      continue;
    }
    lhs.push_back(m(u, v));
    rhs.push_back(m(v, x));
    lhs.push_back(m(x, u));
    rhs.push_back(w(u, v) + w(v, x) + w(x, u));
    lhs.push_back(m(u, x));
    rhs.push_back(m(x, v));
    lhs.push_back(m(v, u));
    rhs.push_back(w(u, x) + w(x, v) + w(v, u));
  }
  const ShareVector partial = party.mul(lhs, rhs);

  lhs.clear();
  rhs.clear();
  std::size_t at = 0;
  for (std::size_t i = 0; i < s; ++i) {
    const auto [u, v, x] = subsets.nodes[i];
    (void)x;
    if (subsets.is_pair(i)) {
      lhs.push_back(partial[at++]);
      rhs.push_back(w(u, v) + w(v, u));
      continue;
    }
    lhs.push_back(partial[at]);
    rhs.push_back(partial[at + 1]);
    lhs.push_back(partial[at + 2]);
    rhs.push_back(partial[at + 3]);
    at += 4;
  }
  const ShareVector cycle = party.mul(lhs, rhs);

  // first >= second is evaluated as NOT(second > first).
  ShareVector first, second;
  for (std::size_t i = 0, k = 0; i < s; ++i) {
    if (subsets.is_pair(i)) {
      ++k;
      continue;
    }
    first.push_back(cycle[k]);
    second.push_back(cycle[k + 1]);
    k += 2;
  }
  ShareVector keep_first, best;
  if (!first.empty()) {
    keep_first = gates::gt(party, second, first);
    for (auto& b : keep_first) b = party.constant(1) - b;
    best = gates::select(party, keep_first, first, second);
  }

  Evaluation out{ShareVector(s), ShareVector(s)};
  for (std::size_t i = 0, k = 0, t = 0; i < s; ++i) {
    if (subsets.is_pair(i)) {
      out.weights[i] = cycle[k++];
      out.choose_first[i] = party.constant(1);
      continue;
    }
    out.weights[i] = best[t];
    out.choose_first[i] = keep_first[t];
    ++t;
    k += 2;
  }
  return out;
}

ShareVector approximation_phase(Party& party, const PublicSubsets& subsets,
                                const ShareVector& weights, const ProtocolConfig& config) {
  const std::size_t s = subsets.size();
  const std::size_t n = subsets.node_count;
  const unsigned width = node_width(subsets.kappa);
  if (weights.size() != s) throw InvalidArgument("one weight per subset is required");

  gates::SubsetEncoding enc{ShareVector(s), ShareMatrix(s, width), {}};
  for (std::size_t i = 0; i < s; ++i) {
    enc.indices[i] = party.constant(i);
    for (unsigned c = 0; c < width; ++c) enc.nodes(i, c) = party.constant(subsets.nodes[i][c]);
  }

  // With a subset shuffle the greedy loop sees the rows in secret order. The
  // index column still names the public position, so chosen and the weight
  // updates stay in public order and the current weights are re-permuted
  // before every selection.
  gates::SecretPermutation rows;
  if (config.shuffle_subsets) {
    rows = gates::row_permutation(party, s, config.shuffle);
    ShareMatrix table(s, width + 1);
    for (std::size_t i = 0; i < s; ++i) {
      table(i, 0) = enc.indices[i];
      for (unsigned c = 0; c < width; ++c) table(i, 1 + c) = enc.nodes(i, c);
    }
    table = gates::permute_rows(party, table, rows);
    for (std::size_t i = 0; i < s; ++i) {
      enc.indices[i] = table(i, 0);
      for (unsigned c = 0; c < width; ++c) enc.nodes(i, c) = table(i, 1 + c);
    }
  }

  ShareVector current = weights;
  ShareVector chosen(s, party.constant(0));
  const std::size_t iterations = n / 2;
  for (std::size_t it = 0; it < iterations; ++it) {
    const bool last = it + 1 == iterations;
    if (config.shuffle_subsets) {
      ShareMatrix column(s, 1);
      column.data() = current;
      enc.weights = gates::permute_rows(party, column, rows).data();
    } else {
      enc.weights = current;
    }
    const auto best = gates::max_weight_set(party, enc, s, n);

    std::vector<gates::DemuxRequest> requests{{best.index, s}};
    if (!last)
      for (const auto& node : best.nodes) requests.push_back({node, n});
    const auto ind = gates::demux(party, requests);
    for (std::size_t i = 0; i < s; ++i) chosen[i] += ind[0][i];
    if (last) break;

    ShareVector comb(n, party.constant(0));
    for (std::size_t k = 1; k < ind.size(); ++k)
      for (std::size_t v = 0; v < n; ++v) comb[v] += ind[k][v];
    auto free_of = [&](std::uint32_t v) { return party.constant(1) - comb[v]; };

    // weight * (1 - comb(u)) * (1 - comb(v)) * (1 - comb(w)) in two rounds;
    // the dummy third node contributes no factor.
    ShareVector lhs(2 * s), rhs(2 * s);
    for (std::size_t i = 0; i < s; ++i) {
      const auto& nodes = subsets.nodes[i];
      lhs[2 * i] = free_of(nodes[0]);
      rhs[2 * i] = free_of(nodes[1]);
      lhs[2 * i + 1] = current[i];
      rhs[2 * i + 1] = subsets.is_pair(i) ? party.constant(1) : free_of(nodes[2]);
    }
    const ShareVector partial = party.mul(lhs, rhs);
    ShareVector a(s), b(s);
    for (std::size_t i = 0; i < s; ++i) {
      a[i] = partial[2 * i];
      b[i] = partial[2 * i + 1];
    }
    current = party.mul(a, b);
  }
  return chosen;
}

SharedSolution resolution_phase(Party& party, const PublicSubsets& subsets,
                                const Evaluation& evaluation, const ShareVector& chosen,
                                const gates::SecretPermutation& sigma) {
  const std::size_t s = subsets.size();
  const std::size_t n = subsets.node_count;
  if (chosen.size() != s || evaluation.choose_first.size() != s)
    throw InvalidArgument("one chosen flag per subset is required");

  ShareVector cf, flags;
  for (std::size_t i = 0; i < s; ++i) {
    if (subsets.is_pair(i)) continue;
    cf.push_back(evaluation.choose_first[i]);
    flags.push_back(chosen[i]);
  }
  const ShareVector map_first = cf.empty() ? ShareVector{} : party.mul(cf, flags);

  ShareMatrix a(n, n);
  for (std::size_t i = 0, t = 0; i < s; ++i) {
    const auto [u, v, w] = subsets.nodes[i];
    if (subsets.is_pair(i)) {
      a(u, v) += chosen[i];
      a(v, u) += chosen[i];
      continue;
    }
    const Share first = map_first[t++];
    const Share second = chosen[i] - first;
    a(u, v) += first;
    a(v, w) += first;
    a(w, u) += first;
    a(u, w) += second;
    a(w, v) += second;
    a(v, u) += second;
  }

  const ShareMatrix orig = gates::rev_shuffle(party, a, sigma);
  SharedSolution out{ShareVector(n, party.constant(0)), ShareVector(n, party.constant(0))};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.donor[i] += orig(j, i) * static_cast<Ring>(j + 1);
      out.recipient[i] += orig(i, j) * static_cast<Ring>(j + 1);
    }
  }
  return out;
}

SharedSolution run_on_graph(Party& party, const ProtocolConfig& config, compat::CompatGraph graph,
                            ProtocolStats* stats) {
  config.validate();
  check_ring(party, config);
  const auto subsets = build_subsets(graph.m.rows(), config.kappa);

  ProtocolStats local;
  ProtocolStats& st = stats ? *stats : local;
  st.subsets = subsets.size();
  st.iterations = subsets.node_count / 2;

  auto t0 = Clock::now();
  const Construction c = shuffle_graph(party, std::move(graph), config);
  auto t1 = Clock::now();
  const Evaluation e = evaluation_phase(party, c.m, c.w, subsets);
  auto t2 = Clock::now();
  const ShareVector chosen = approximation_phase(party, subsets, e.weights, config);
  auto t3 = Clock::now();
  SharedSolution out = resolution_phase(party, subsets, e, chosen, c.sigma);
  auto t4 = Clock::now();
  st.phase_time[0] += t1 - t0;
  st.phase_time[1] = t2 - t1;
  st.phase_time[2] = t3 - t2;
  st.phase_time[3] = t4 - t3;
  return out;
}

SharedSolution run_protocol(Party& party, const ProtocolConfig& config,
                            std::span<const compat::SharedQuote> quotes, ProtocolStats* stats) {
  config.validate();
  check_ring(party, config);
  ProtocolStats local;
  ProtocolStats& st = stats ? *stats : local;
  st.phase_time[0] = {};
  auto t0 = Clock::now();
  compat::CompatGraph graph = compat::build_graph(party, quotes, config.policy);
  st.phase_time[0] = Clock::now() - t0;
  return run_on_graph(party, config, std::move(graph), &st);
}

oracle::Assignment open_solution(Party& party, const SharedSolution& solution) {
  const std::size_t n = solution.donor.size();
  ShareVector both = solution.donor;
  both.insert(both.end(), solution.recipient.begin(), solution.recipient.end());
  const auto values = party.open(both);
  oracle::Assignment a{std::vector<std::uint32_t>(n), std::vector<std::uint32_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] > n || values[n + i] > n) throw InconsistentShares("opened index out of range");
    a.donor[i] = static_cast<std::uint32_t>(values[i]);
    a.recipient[i] = static_cast<std::uint32_t>(values[n + i]);
  }
  return a;
}

}  // namespace kep::protocol
