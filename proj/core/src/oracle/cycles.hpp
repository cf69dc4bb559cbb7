#pragma once

#include <array>
#include <vector>

#include "kep/oracle/oracle.hpp"

namespace kep::oracle::detail {

/// Best-oriented cycle of one node subset that has positive weight.
struct Candidate {
  /// Sorted nodes; third entry is the node count for 2-subsets.
  std::array<std::uint32_t, 3> subset;
  Cycle cycle;
  Weight weight;
};

/// Orders candidates like the subset table: 3-subsets before 2-subsets, then
/// lexicographic.
bool table_less(const std::array<std::uint32_t, 3>& a, const std::array<std::uint32_t, 3>& b,
                std::uint32_t n);

/// All subsets with a positive-weight cycle. For 3-subsets the orientation
/// (u, v, w) is kept unless (u, w, v) weighs strictly more.
std::vector<Candidate> candidates(const PlainGraph& g, unsigned kappa);

/// A cycle over at most kExactMaxNodes local nodes, as a node bit mask.
struct MaskedCycle {
  std::uint32_t mask;
  Weight weight;
};

/// Indices of a maximum-weight set of disjoint cycles over `n` local nodes,
/// by dynamic programming over node subsets.
std::vector<std::size_t> dp_pack(std::size_t n, const std::vector<MaskedCycle>& cycles);

}  // namespace kep::oracle::detail
