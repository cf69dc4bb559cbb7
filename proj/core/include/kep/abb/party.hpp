#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kep/abb/prg.hpp"
#include "kep/abb/share.hpp"
#include "kep/transport/channel.hpp"

namespace kep::abb {

using transport::PeerId;

struct PartyOptions {
  RingConfig ring;
  /// When set, pairwise keys are derived from this seed instead of the OS
  /// CSPRNG. Reproducible but insecure; tests only.
  std::optional<std::uint64_t> seed;
};

/// Operation counters, used for cost accounting and instrumentation.
struct PartyStats {
  std::uint64_t rounds = 0;
  std::uint64_t multiplications = 0;
  std::uint64_t openings = 0;
  std::uint64_t random_bits = 0;
  /// Invocation counts of composite gates, keyed by gate name.
  std::map<std::string, std::uint64_t, std::less<>> gate_calls;

  std::uint64_t calls(std::string_view gate) const {
    auto it = gate_calls.find(gate);
    return it == gate_calls.end() ? 0 : it->second;
  }
};

/// Two vectors of equal length whose inner product is wanted.
struct DotTerm {
  std::span<const Share> lhs;
  std::span<const Share> rhs;
};

/// One peer's session of semi-honest three-party replicated secret sharing
/// over Z_2^k.
///
/// Component j of every sharing is known to peers j and j-1. The key that
/// drives component j's correlated randomness is known to the same two peers,
/// which gives zero-sharings for multiplication and non-interactive random
/// sharings. Every interactive call is one communication round, and the three
/// peers must issue the same sequence of calls with the same sizes.
class Party {
 public:
  /// Runs the one-round key setup with the other two peers.
  explicit Party(transport::Channel& channel, PartyOptions options = {});

  Party(const Party&) = delete;
  Party& operator=(const Party&) = delete;

  PeerId id() const noexcept { return id_; }
  const RingConfig& ring() const noexcept { return ring_; }
  transport::Channel& channel() noexcept { return channel_; }
  const PartyStats& stats() const noexcept { return stats_; }

  /// Sharing of a public constant, no communication.
  Share constant(Ring c) const;
  Share add_const(Share s, Ring c) const { return s + constant(c); }

  /// `dealer` shares `values` (ignored at the other peers); `count` values.
  ShareVector input(PeerId dealer, std::span<const Ring> values, std::size_t count);

  /// Reconstructs at every peer; the two received copies of the missing
  /// component are compared.
  std::vector<Ring> open(std::span<const Share> shares);
  Ring open(Share s) { return open(std::span<const Share>(&s, 1)).front(); }

  /// Reconstructs at `receiver` only; other peers get an empty vector.
  std::vector<Ring> open_to(PeerId receiver, std::span<const Share> shares);

  /// Element-wise products, one round.
  ShareVector mul(std::span<const Share> lhs, std::span<const Share> rhs);

  /// Batched inner products, one round and one ring element per term.
  ShareVector dot(std::span<const DotTerm> terms);

  /// Uniform sharings, no communication.
  ShareVector random(std::size_t count);

  /// Uniform secret bits that no single peer knows. Two rounds.
  ShareVector random_bits(std::size_t count);

  /// Fresh sharing of a + b where peer `leader` holds `local` = a and peer
  /// leader+1 holds `local` = b; the third peer passes an empty span.
  /// One round, used by the resharing passes of the shuffle.
  ShareVector reshare_pair(PeerId leader, std::span<const Ring> local, std::size_t count);

  /// Keystream shared by `leader` and leader+1, unknown to the third peer.
  /// Only those two peers may call this.
  Prg& pair_stream(PeerId leader);

  std::uint32_t next_round();

  void record_gate(std::string_view gate) {
    auto it = stats_.gate_calls.find(gate);
    if (it == stats_.gate_calls.end()) it = stats_.gate_calls.emplace(std::string(gate), 0).first;
    ++it->second;
  }

 private:
  PeerId next() const noexcept { return (id_ + 1) % 3; }
  PeerId prev() const noexcept { return (id_ + 2) % 3; }

  transport::Bytes pack(std::span<const Ring> values) const;
  std::vector<Ring> unpack(const transport::Bytes& bytes, std::size_t count) const;

  transport::Channel& channel_;
  PeerId id_;
  RingConfig ring_;
  PartyStats stats_;
  std::uint32_t round_ = 0;

  // Index 0: key of component id (shared with prev), 1: component id+1
  // (shared with next).
  std::array<Prg, 2> zero_;
  std::array<Prg, 2> rand_;
  std::array<Prg, 2> perm_;
};

}  // namespace kep::abb
