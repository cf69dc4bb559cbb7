#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kep::oracle {

using Weight = std::uint64_t;

/// Plaintext compatibility graph: adj(i, j) = 1 when donor i can give to
/// patient j, with edge weight weight(i, j).
class PlainGraph {
 public:
  PlainGraph() = default;
  explicit PlainGraph(std::size_t n) : n_(n), adj_(n * n, 0), weight_(n * n, 0) {}

  std::size_t size() const noexcept { return n_; }

  bool edge(std::size_t i, std::size_t j) const { return adj_[i * n_ + j] != 0; }
  Weight weight(std::size_t i, std::size_t j) const { return weight_[i * n_ + j]; }

  /// Adds or replaces edge (i, j); self loops are rejected.
  void set_edge(std::size_t i, std::size_t j, Weight w);
  void remove_edge(std::size_t i, std::size_t j);

  std::size_t edge_count() const;

  /// Same graph with node v renamed to perm[v].
  PlainGraph relabeled(const std::vector<std::uint32_t>& perm) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<Weight> weight_;
};

/// Nodes in exchange order: cycle[0] gives to cycle[1], ..., last gives to
/// cycle[0].
using Cycle = std::vector<std::uint32_t>;

struct CyclePacking {
  std::vector<Cycle> cycles;
  Weight total_weight = 0;

  std::size_t matched_pairs() const;
};

/// Sum of the edge weights along `cycle`, or nullopt if an edge is missing.
std::optional<Weight> cycle_weight(const PlainGraph& g, const Cycle& cycle);

/// Cycle with the smallest node first, so equal cycles compare equal.
Cycle canonical(Cycle cycle);

/// Node subsets in protocol order: all 3-subsets (if kappa = 3) then all
/// 2-subsets, lexicographic. 2-subsets carry `n` as third entry.
std::vector<std::array<std::uint32_t, 3>> enumerate_subsets(std::size_t n, unsigned kappa);
std::size_t subset_count(std::size_t n, unsigned kappa);

/// Greedy approximation: repeatedly take the lowest-index subset of maximal
/// positive weight and drop every subset touching its nodes. A 3-subset
/// {u, v, w} is scored by its better orientation, (u, v, w) on ties.
/// When `perm` is given, the graph is relabeled by it first and the cycles
/// are reported in the original labels.
CyclePacking greedy_solve(const PlainGraph& g, unsigned kappa,
                          const std::optional<std::vector<std::uint32_t>>& perm = std::nullopt);

/// Literal subset-table version of greedy_solve; O(|S|) per iteration.
/// `subset_order[k]` is the table index scanned at position k (default: table
/// order).
CyclePacking greedy_solve_table(
    const PlainGraph& g, unsigned kappa,
    const std::optional<std::vector<std::uint32_t>>& subset_order = std::nullopt);

inline constexpr std::size_t kExactMaxNodes = 22;

/// Maximum-weight packing by dynamic programming over node subsets.
/// Throws SizeLimit above kExactMaxNodes.
CyclePacking exact_solve(const PlainGraph& g, unsigned kappa);

/// Maximum-weight packing for larger sparse graphs: splits the graph into
/// independent parts, solves small parts with exact_solve and larger ones by
/// LP-based branch and bound over candidate cycles. Parts of at most
/// `dp_limit` nodes go to the dynamic program; lower it to force the search.
CyclePacking optimal_packing(const PlainGraph& g, unsigned kappa,
                             std::size_t dp_limit = kExactMaxNodes);

enum class Violation { kNone, kLength, kNodeRange, kDisjointness, kMissingEdge, kWeight };

struct ValidationReport {
  Violation kind = Violation::kNone;
  std::string detail;

  bool ok() const noexcept { return kind == Violation::kNone; }
};

std::string to_string(Violation v);

ValidationReport validate(const PlainGraph& g, const CyclePacking& packing, unsigned kappa);

/// Matched pairs of greedy over matched pairs of exact; 1 when exact
/// matches none.
double quality(const PlainGraph& g, unsigned kappa);

/// "N" on the first line, then one "u v weight" line per edge. '#' starts a
/// comment.
PlainGraph read_graph(std::istream& in);
void write_graph(std::ostream& out, const PlainGraph& g);

/// Donor/recipient vectors (1-based, 0 = unmatched) for a packing: pair i
/// donates to recipient[i] and receives from donor[i].
struct Assignment {
  std::vector<std::uint32_t> donor;
  std::vector<std::uint32_t> recipient;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

Assignment to_assignment(const CyclePacking& packing, std::size_t n);

/// Inverse of to_assignment; throws InvalidArgument if the vectors are not a
/// consistent set of cycles.
CyclePacking from_assignment(const PlainGraph& g, const Assignment& a);

}  // namespace kep::oracle
