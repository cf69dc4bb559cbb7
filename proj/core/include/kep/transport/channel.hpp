#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "kep/transport/transcript.hpp"

namespace kep::transport {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kFrameHeaderSize = 8;

/// One framed message: 4-byte little-endian payload length, 4-byte
/// little-endian round tag, raw payload.
struct RoundMessage {
  std::uint32_t round_tag = 0;
  PeerId sender = 0;
  PeerId receiver = 0;
  Bytes payload;
};

Bytes encode_frame(std::uint32_t round_tag, std::span<const std::uint8_t> payload);

/// Parses the 8-byte header; returns (payload length, round tag).
std::pair<std::uint32_t, std::uint32_t> decode_header(std::span<const std::uint8_t> header);

/// Endpoint of one peer in a three-peer session.
///
/// Ordered, reliable delivery per directed channel. Round tags are strictly
/// increasing per (sender, receiver) pair. A single endpoint must not be used
/// from two threads at once.
class Channel {
 public:
  explicit Channel(PeerId self);
  virtual ~Channel() = default;

  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;

  PeerId self() const noexcept { return self_; }

  /// Point-to-point send, tagged with the next tag on the (self, to) channel.
  void send(PeerId to, std::span<const std::uint8_t> payload);

  /// Receives the next message from `from`; checks the tag increased.
  Bytes recv(PeerId from);

  /// Sends every payload in `outgoing` tagged `round_tag`, then blocks until
  /// one message tagged `round_tag` arrived from every peer in `expect_from`.
  /// A received tag other than `round_tag` raises Desync.
  std::map<PeerId, Bytes> exchange_round(std::uint32_t round_tag,
                                         const std::map<PeerId, Bytes>& outgoing,
                                         std::span<const PeerId> expect_from);

  void close();
  bool closed() const noexcept { return closed_; }

  const Transcript& transcript() const noexcept { return transcript_; }

 protected:
  virtual void write_frame(PeerId to, Bytes frame) = 0;
  virtual Bytes read_frame(PeerId from) = 0;
  virtual void on_close() = 0;

  /// Writes all frames and reads one frame per expected peer. Backends whose
  /// writes can block on a full buffer override this to interleave I/O.
  virtual std::map<PeerId, Bytes> transfer(std::vector<std::pair<PeerId, Bytes>> frames,
                                           std::span<const PeerId> expect_from);

 private:
  void check_peer(PeerId peer) const;
  void check_open() const;
  Bytes unpack(PeerId from, Bytes frame, std::uint32_t* tag_out);

  PeerId self_;
  bool closed_ = false;
  std::array<std::uint32_t, kNumPeers> last_sent_{};
  std::array<std::uint32_t, kNumPeers> last_received_{};
  Transcript transcript_;
};

}  // namespace kep::transport
