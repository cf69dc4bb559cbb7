#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace kep::transport {

using PeerId = std::uint32_t;
inline constexpr std::size_t kNumPeers = 3;

enum class Direction : std::uint8_t { kOut, kIn };

struct TranscriptEntry {
  std::uint32_t round_tag;
  Direction direction;
  PeerId peer;  // the other end of the message
  std::size_t byte_count;

  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

/// (round_tag, total payload bytes) in tag order.
using TranscriptSummary = std::vector<std::pair<std::uint32_t, std::uint64_t>>;

/// Append-only log of the messages one peer sent and received.
class Transcript {
 public:
  void append(const TranscriptEntry& entry) { entries_.push_back(entry); }

  const std::vector<TranscriptEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  std::uint64_t bytes_sent() const;
  std::uint64_t bytes_received() const;

  /// Outgoing payload bytes grouped by round tag.
  TranscriptSummary summary() const;

 private:
  std::vector<TranscriptEntry> entries_;
};

/// Session-wide summary: outgoing bytes of all peers grouped by round tag.
TranscriptSummary transcript_summary(const std::vector<const Transcript*>& peers);

std::uint64_t total_bytes(const TranscriptSummary& summary);

}  // namespace kep::transport
