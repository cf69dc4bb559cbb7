#include "kep/transport/transcript.hpp"

#include <map>

namespace kep::transport {

namespace {

void accumulate_out(const Transcript& t, std::map<std::uint32_t, std::uint64_t>& by_tag) {
  for (const auto& e : t.entries()) {
    if (e.direction == Direction::kOut) by_tag[e.round_tag] += e.byte_count;
  }
}

TranscriptSummary flatten(const std::map<std::uint32_t, std::uint64_t>& by_tag) {
  return {by_tag.begin(), by_tag.end()};
}

}  // namespace

std::uint64_t Transcript::bytes_sent() const {
  std::uint64_t total = 0;
  for (const auto& e : entries_) {
    if (e.direction == Direction::kOut) total += e.byte_count;
  }
  return total;
}

std::uint64_t Transcript::bytes_received() const {
  std::uint64_t total = 0;
  for (const auto& e : entries_) {
    if (e.direction == Direction::kIn) total += e.byte_count;
  }
  return total;
}

TranscriptSummary Transcript::summary() const {
  std::map<std::uint32_t, std::uint64_t> by_tag;
  accumulate_out(*this, by_tag);
  return flatten(by_tag);
}

TranscriptSummary transcript_summary(const std::vector<const Transcript*>& peers) {
  std::map<std::uint32_t, std::uint64_t> by_tag;
  for (const Transcript* t : peers) accumulate_out(*t, by_tag);
  return flatten(by_tag);
}

std::uint64_t total_bytes(const TranscriptSummary& summary) {
  std::uint64_t total = 0;
  for (const auto& [tag, bytes] : summary) total += bytes;
  return total;
}

}  // namespace kep::transport
