#include "kep/transport/channel.hpp"

#include <string>

#include "kep/error.hpp"

namespace kep::transport {

namespace {

void put_u32(std::uint8_t* out, std::uint32_t value) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(value >> (8 * i));
}

std::uint32_t get_u32(const std::uint8_t* in) {
  std::uint32_t value = 0;
  for (int i = 0; i < 4; ++i) value |= static_cast<std::uint32_t>(in[i]) << (8 * i);
  return value;
}

}  // namespace

Bytes encode_frame(std::uint32_t round_tag, std::span<const std::uint8_t> payload) {
  Bytes frame(kFrameHeaderSize + payload.size());
  put_u32(frame.data(), static_cast<std::uint32_t>(payload.size()));
  put_u32(frame.data() + 4, round_tag);
  std::copy(payload.begin(), payload.end(), frame.begin() + kFrameHeaderSize);
  return frame;
}

std::pair<std::uint32_t, std::uint32_t> decode_header(std::span<const std::uint8_t> header) {
  if (header.size() < kFrameHeaderSize) throw Error("truncated frame header");
  return {get_u32(header.data()), get_u32(header.data() + 4)};
}

Channel::Channel(PeerId self) : self_(self) {
  if (self >= kNumPeers) throw InvalidArgument("peer id out of range: " + std::to_string(self));
}

void Channel::check_peer(PeerId peer) const {
  if (peer >= kNumPeers || peer == self_) {
    throw InvalidArgument("invalid peer " + std::to_string(peer) + " for endpoint " +
                          std::to_string(self_));
  }
}

void Channel::check_open() const {
  if (closed_) throw ChannelClosed("channel closed");
}

void Channel::send(PeerId to, std::span<const std::uint8_t> payload) {
  check_open();
  check_peer(to);
  if (payload.empty()) throw InvalidArgument("empty payload");
  const std::uint32_t tag = ++last_sent_[to];
  write_frame(to, encode_frame(tag, payload));
  transcript_.append({tag, Direction::kOut, to, payload.size()});
}

Bytes Channel::unpack(PeerId from, Bytes frame, std::uint32_t* tag_out) {
  auto [length, tag] = decode_header(frame);
  if (frame.size() != kFrameHeaderSize + length) throw Error("frame length mismatch");
  if (tag <= last_received_[from]) {
    throw Desync("round tag " + std::to_string(tag) + " from peer " + std::to_string(from) +
                 " does not increase (last " + std::to_string(last_received_[from]) + ")");
  }
  last_received_[from] = tag;
  *tag_out = tag;
  transcript_.append({tag, Direction::kIn, from, length});
  frame.erase(frame.begin(), frame.begin() + kFrameHeaderSize);
  return frame;
}

Bytes Channel::recv(PeerId from) {
  check_open();
  check_peer(from);
  std::uint32_t tag = 0;
  return unpack(from, read_frame(from), &tag);
}

std::map<PeerId, Bytes> Channel::exchange_round(std::uint32_t round_tag,
                                                const std::map<PeerId, Bytes>& outgoing,
                                                std::span<const PeerId> expect_from) {
  check_open();
  if (outgoing.empty() && expect_from.empty()) return {};

  std::vector<std::pair<PeerId, Bytes>> frames;
  frames.reserve(outgoing.size());
  for (const auto& [to, payload] : outgoing) {
    check_peer(to);
    if (round_tag <= last_sent_[to]) {
      throw Desync("round tag " + std::to_string(round_tag) + " not increasing towards peer " +
                   std::to_string(to));
    }
    frames.emplace_back(to, encode_frame(round_tag, payload));
  }
  for (PeerId from : expect_from) check_peer(from);

  auto raw = transfer(std::move(frames), expect_from);

  for (const auto& [to, payload] : outgoing) {
    last_sent_[to] = round_tag;
    transcript_.append({round_tag, Direction::kOut, to, payload.size()});
  }
  std::map<PeerId, Bytes> received;
  for (PeerId from : expect_from) {
    std::uint32_t tag = 0;
    Bytes payload = unpack(from, std::move(raw.at(from)), &tag);
    if (tag != round_tag) {
      throw Desync("expected round " + std::to_string(round_tag) + " from peer " +
                   std::to_string(from) + ", got " + std::to_string(tag));
    }
    received.emplace(from, std::move(payload));
  }
  return received;
}

std::map<PeerId, Bytes> Channel::transfer(std::vector<std::pair<PeerId, Bytes>> frames,
                                          std::span<const PeerId> expect_from) {
  for (auto& [to, frame] : frames) write_frame(to, std::move(frame));
  std::map<PeerId, Bytes> raw;
  for (PeerId from : expect_from) raw.emplace(from, read_frame(from));
  return raw;
}

void Channel::close() {
  if (closed_) return;
  closed_ = true;
  on_close();
}

}  // namespace kep::transport
