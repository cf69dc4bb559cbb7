#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "kep/abb/party.hpp"
#include "kep/compat/compat.hpp"
#include "kep/gates/gates.hpp"
#include "kep/oracle/oracle.hpp"

namespace kep::protocol {

using abb::Party;
using abb::Share;
using abb::ShareMatrix;
using abb::ShareVector;

struct ProtocolConfig {
  /// Maximum cycle length, 2 or 3. With 2 only crossover exchanges are formed.
  unsigned kappa = 3;
  gates::ShuffleOptions shuffle;
  compat::PrioPolicy policy;
  /// Secretly permute the subset list before the greedy loop, which randomizes
  /// the choice among equal-weight subsets. Off by default.
  bool shuffle_subsets = false;

  void validate() const;
};

/// Candidate node subsets, 3-subsets first then 2-subsets, lexicographic.
/// 2-subsets carry the dummy node N in their third slot.
struct PublicSubsets {
  std::size_t node_count = 0;
  unsigned kappa = 3;
  std::vector<std::array<std::uint32_t, 3>> nodes;

  std::size_t size() const noexcept { return nodes.size(); }
  bool is_pair(std::size_t i) const noexcept { return nodes[i][2] == node_count; }
};

PublicSubsets build_subsets(std::size_t n, unsigned kappa);

struct Construction {
  ShareMatrix m;
  ShareMatrix w;
  gates::SecretPermutation sigma;
};

struct Evaluation {
  ShareVector weights;
  /// 1 if orientation (u, v, w) was kept over (u, w, v); 2-subsets hold 1.
  ShareVector choose_first;
};

/// Donor and recipient per pair as 1-based indices, 0 when unmatched.
/// donor[i] is the pair whose donor gives to patient i; recipient[i] is the
/// pair whose patient receives from donor i.
struct SharedSolution {
  ShareVector donor;
  ShareVector recipient;
};

/// Shuffles an already built graph. Keeps `m` and `w` unchanged in identity mode.
Construction shuffle_graph(Party& party, compat::CompatGraph graph, const ProtocolConfig& config);

Construction construction_phase(Party& party, std::span<const compat::SharedQuote> quotes,
                                const ProtocolConfig& config);

Evaluation evaluation_phase(Party& party, const ShareMatrix& m, const ShareMatrix& w,
                            const PublicSubsets& subsets);

/// Greedy selection loop; floor(N / 2) iterations whatever the input.
/// Returns the indicator of chosen subsets in public subset order.
ShareVector approximation_phase(Party& party, const PublicSubsets& subsets,
                                const ShareVector& weights, const ProtocolConfig& config);

SharedSolution resolution_phase(Party& party, const PublicSubsets& subsets,
                                const Evaluation& evaluation, const ShareVector& chosen,
                                const gates::SecretPermutation& sigma);

struct ProtocolStats {
  std::size_t subsets = 0;
  std::size_t iterations = 0;
  /// Wall time of construction, evaluation, approximation and resolution.
  std::array<std::chrono::duration<double>, 4> phase_time{};
};

SharedSolution run_protocol(Party& party, const ProtocolConfig& config,
                            std::span<const compat::SharedQuote> quotes,
                            ProtocolStats* stats = nullptr);

/// Runs the protocol on a graph that is already shared, skipping the
/// compatibility and priority gates.
SharedSolution run_on_graph(Party& party, const ProtocolConfig& config, compat::CompatGraph graph,
                            ProtocolStats* stats = nullptr);

/// Opens a shared solution at every peer.
oracle::Assignment open_solution(Party& party, const SharedSolution& solution);

}  // namespace kep::protocol
