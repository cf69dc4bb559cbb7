#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace kep::abb {

using PrgKey = std::array<std::uint8_t, 32>;

/// Deterministic ChaCha20 keystream generator.
///
/// Two holders of the same (key, stream id) produce identical sequences as
/// long as they draw the same number of words.
class Prg {
 public:
  Prg() = default;
  Prg(const PrgKey& key, std::uint64_t stream_id);

  std::uint64_t next();
  /// Uniform in [0, bound); bound > 0.
  std::uint64_t uniform(std::uint64_t bound);
  void fill(std::uint64_t* out, std::size_t count);

  /// Fresh key from the OS CSPRNG.
  static PrgKey random_key();
  /// Key derived from a 64-bit seed and a label (test and reproducible modes).
  static PrgKey derive_key(std::uint64_t seed, std::uint64_t label);

 private:
  void refill();

  PrgKey key_{};
  std::array<std::uint8_t, 8> nonce_{};
  std::uint64_t block_counter_ = 0;
  std::vector<std::uint64_t> buffer_;
  std::size_t position_ = 0;
};

/// Uniformly random permutation of [0, n) (Fisher-Yates).
std::vector<std::uint32_t> random_permutation(Prg& prg, std::size_t n);

std::vector<std::uint32_t> invert_permutation(const std::vector<std::uint32_t>& perm);

}  // namespace kep::abb
