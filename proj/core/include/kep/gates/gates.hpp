#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kep/abb/party.hpp"

namespace kep::gates {

using abb::Party;
using abb::Ring;
using abb::Share;
using abb::ShareMatrix;
using abb::ShareVector;

/// Bitwise [x > y] for each pair. Values are read as two's complement
/// k-bit integers and must satisfy |x - y| < 2^(k-2).
ShareVector gt(Party& party, std::span<const Share> x, std::span<const Share> y);
Share gt(Party& party, Share x, Share y);

/// z * (x - y) + y for each position; z must hold 0 or 1.
ShareVector select(Party& party, std::span<const Share> z, std::span<const Share> x,
                   std::span<const Share> y);
Share select(Party& party, Share z, Share x, Share y);

Share dot_product(Party& party, std::span<const Share> a, std::span<const Share> b);

/// Low `bits` bits of each value, least significant first (row-major,
/// `bits` per value). Every value must be below 2^bits.
ShareVector bit_decompose(Party& party, std::span<const Share> x, unsigned bits);

struct DemuxRequest {
  Share value;
  /// Output length; the value must lie in [0, length]. A value equal to
  /// `length` yields all zeros.
  std::size_t length;
};

/// One-hot expansion of every request, all in the same rounds.
std::vector<ShareVector> demux(Party& party, std::span<const DemuxRequest> requests);
ShareVector demux(Party& party, Share x, std::size_t length);

enum class ShuffleMode { kRandom, kSeeded, kIdentity };

struct ShuffleOptions {
  ShuffleMode mode = ShuffleMode::kRandom;
  /// Used by kSeeded only.
  std::uint64_t seed = 0;
};

/// This peer's fragments of a composed node permutation. Pass j is known to
/// peers j and j+1 only, so no single peer knows the composition.
class SecretPermutation {
 public:
  SecretPermutation() = default;

  std::size_t size() const noexcept { return size_; }

 private:
  friend struct ShuffleAccess;
  std::size_t size_ = 0;
  std::array<std::optional<std::vector<std::uint32_t>>, 3> passes_;
};

/// Relabels nodes: the same uniformly random permutation pi is applied to
/// rows and columns of every matrix, M'(pi(i), pi(j)) = M(i, j).
/// All matrices must be square with equal size.
SecretPermutation shuffle_nodes(Party& party, std::span<ShareMatrix*> matrices,
                                const ShuffleOptions& options);

/// Undoes the relabeling of `sigma` on a square matrix of the same size.
ShareMatrix rev_shuffle(Party& party, const ShareMatrix& a, const SecretPermutation& sigma);

/// Draws a secret permutation of `n` rows; no communication. Can be applied
/// any number of times with permute_rows.
SecretPermutation row_permutation(Party& party, std::size_t n, const ShuffleOptions& options);

/// Moves row i of `a` to row pi(i). Three rounds.
ShareMatrix permute_rows(Party& party, const ShareMatrix& a, const SecretPermutation& sigma);

/// The composed permutation used in seeded mode, as pi(i) per position; lets
/// tests reveal what the peers applied.
std::vector<std::uint32_t> seeded_permutation(std::uint64_t seed, std::size_t n);
/// Same for row_permutation: row i moves to position pi(i).
std::vector<std::uint32_t> seeded_row_permutation(std::uint64_t seed, std::size_t n);

struct SubsetEncoding {
  ShareVector indices;
  /// One row per subset; the width is the number of node slots.
  ShareMatrix nodes;
  ShareVector weights;
};

struct MaxWeightSet {
  Share index;
  ShareVector nodes;
};

/// Index and nodes of the lowest-index subset of maximal positive weight, or
/// (subset_count, (node_count, ...)) when every weight is zero.
MaxWeightSet max_weight_set(Party& party, const SubsetEncoding& enc, std::size_t subset_count,
                            std::size_t node_count);

}  // namespace kep::gates
