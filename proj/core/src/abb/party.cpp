#include "kep/abb/party.hpp"

#include <string>

#include "kep/error.hpp"

namespace kep::abb {

namespace {

constexpr std::uint64_t kZeroStream = 1;
constexpr std::uint64_t kRandStream = 2;
constexpr std::uint64_t kPermStream = 3;

void check_peer(PeerId p) {
  if (p >= 3) throw InvalidArgument("peer id out of range: " + std::to_string(p));
}

}  // namespace

Party::Party(transport::Channel& channel, PartyOptions options)
    : channel_(channel), id_(channel.self()), ring_(options.ring) {
  ring_.validate();

  // Peer p creates the key of component p+1 and hands it to peer p+1.
  const PrgKey mine = options.seed ? Prg::derive_key(*options.seed, next())
                                   : Prg::random_key();
  transport::Bytes payload(mine.begin(), mine.end());
  const PeerId from_prev[] = {prev()};
  auto received =
      channel_.exchange_round(next_round(), {{next(), payload}}, std::span<const PeerId>(from_prev));
  const auto& theirs = received.at(prev());
  if (theirs.size() != 32) throw Desync("malformed key setup message");
  PrgKey own_component{};
  std::copy(theirs.begin(), theirs.end(), own_component.begin());

  const std::array<PrgKey, 2> keys{own_component, mine};
  for (int i = 0; i < 2; ++i) {
    zero_[i] = Prg(keys[i], kZeroStream);
    rand_[i] = Prg(keys[i], kRandStream);
    perm_[i] = Prg(keys[i], kPermStream);
  }
}

std::uint32_t Party::next_round() {
  ++stats_.rounds;
  return ++round_;
}

transport::Bytes Party::pack(std::span<const Ring> values) const {
  const std::size_t width = ring_.wire_bytes();
  const Ring mask = ring_.mask();
  transport::Bytes out(values.size() * width);
  std::uint8_t* p = out.data();
  for (Ring v : values) {
    v &= mask;
    for (std::size_t b = 0; b < width; ++b) *p++ = static_cast<std::uint8_t>(v >> (8 * b));
  }
  return out;
}

std::vector<Ring> Party::unpack(const transport::Bytes& bytes, std::size_t count) const {
  const std::size_t width = ring_.wire_bytes();
  if (bytes.size() != count * width) {
    throw Desync("expected " + std::to_string(count * width) + " bytes, got " +
                 std::to_string(bytes.size()));
  }
  std::vector<Ring> out(count);
  const std::uint8_t* p = bytes.data();
  for (auto& v : out) {
    v = 0;
    for (std::size_t b = 0; b < width; ++b) v |= static_cast<Ring>(*p++) << (8 * b);
  }
  return out;
}

Share Party::constant(Ring c) const {
  // c sits in component 0, held by peer 0 (first) and peer 2 (second).
  if (id_ == 0) return {c, 0};
  if (id_ == 2) return {0, c};
  return {0, 0};
}

ShareVector Party::input(PeerId dealer, std::span<const Ring> values, std::size_t count) {
  check_peer(dealer);
  const std::uint32_t tag = next_round();
  ShareVector out(count);
  if (id_ == dealer) {
    if (values.size() != count) throw InvalidArgument("dealer value count mismatch");
    std::vector<Ring> third(count);
    for (std::size_t i = 0; i < count; ++i) {
      const Ring a = rand_[0].next();  // component dealer
      const Ring b = rand_[1].next();  // component dealer+1
      third[i] = values[i] - a - b;    // component dealer+2
      out[i] = {a, b};
    }
    auto payload = pack(third);
    channel_.exchange_round(tag, {{next(), payload}, {prev(), payload}}, {});
  } else {
    const PeerId from[] = {dealer};
    auto received = channel_.exchange_round(tag, {}, std::span<const PeerId>(from));
    const auto third = unpack(received.at(dealer), count);
    if (id_ == (dealer + 1) % 3) {
      // holds (x_{d+1}, x_{d+2})
      for (std::size_t i = 0; i < count; ++i) out[i] = {rand_[0].next(), third[i]};
    } else {
      // holds (x_{d+2}, x_d)
      for (std::size_t i = 0; i < count; ++i) out[i] = {third[i], rand_[1].next()};
    }
  }
  return out;
}

std::vector<Ring> Party::open(std::span<const Share> shares) {
  const std::size_t n = shares.size();
  stats_.openings += n;
  std::vector<Ring> firsts(n), seconds(n);
  for (std::size_t i = 0; i < n; ++i) {
    firsts[i] = shares[i].first;
    seconds[i] = shares[i].second;
  }
  const PeerId from[] = {prev(), next()};
  auto received = channel_.exchange_round(
      next_round(), {{next(), pack(firsts)}, {prev(), pack(seconds)}}, std::span<const PeerId>(from));
  const auto via_prev = unpack(received.at(prev()), n);
  const auto via_next = unpack(received.at(next()), n);
  const Ring mask = ring_.mask();
  std::vector<Ring> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (via_prev[i] != via_next[i]) {
      throw InconsistentShares("replicated components disagree at position " + std::to_string(i));
    }
    out[i] = (firsts[i] + seconds[i] + via_prev[i]) & mask;
  }
  return out;
}

std::vector<Ring> Party::open_to(PeerId receiver, std::span<const Share> shares) {
  check_peer(receiver);
  const std::size_t n = shares.size();
  stats_.openings += n;
  const std::uint32_t tag = next_round();
  if (id_ == receiver) {
    const PeerId from[] = {prev(), next()};
    auto received = channel_.exchange_round(tag, {}, std::span<const PeerId>(from));
    const auto via_prev = unpack(received.at(prev()), n);
    const auto via_next = unpack(received.at(next()), n);
    std::vector<Ring> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (via_prev[i] != via_next[i]) {
        throw InconsistentShares("replicated components disagree at position " + std::to_string(i));
      }
      out[i] = (shares[i].first + shares[i].second + via_prev[i]) & ring_.mask();
    }
    return out;
  }
  // receiver r lacks x_{r+2}: peer r+1 holds it second, peer r+2 holds it first.
  std::vector<Ring> part(n);
  const bool is_next_of_receiver = id_ == (receiver + 1) % 3;
  for (std::size_t i = 0; i < n; ++i) part[i] = is_next_of_receiver ? shares[i].second : shares[i].first;
  channel_.exchange_round(tag, {{receiver, pack(part)}}, {});
  return {};
}

ShareVector Party::mul(std::span<const Share> lhs, std::span<const Share> rhs) {
  if (lhs.size() != rhs.size()) throw InvalidArgument("mul operand length mismatch");
  const std::size_t n = lhs.size();
  stats_.multiplications += n;
  std::vector<Ring> z(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Share x = lhs[i];
    const Share y = rhs[i];
    const Ring alpha = zero_[0].next() - zero_[1].next();
    z[i] = x.first * y.first + x.first * y.second + x.second * y.first + alpha;
  }
  const PeerId from[] = {next()};
  auto received =
      channel_.exchange_round(next_round(), {{prev(), pack(z)}}, std::span<const PeerId>(from));
  const auto z_next = unpack(received.at(next()), n);
  ShareVector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {z[i], z_next[i]};
  return out;
}

ShareVector Party::dot(std::span<const DotTerm> terms) {
  const std::size_t n = terms.size();
  std::vector<Ring> z(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto& term = terms[t];
    if (term.lhs.size() != term.rhs.size()) throw InvalidArgument("dot operand length mismatch");
    stats_.multiplications += term.lhs.size();
    Ring acc = zero_[0].next() - zero_[1].next();
    for (std::size_t i = 0; i < term.lhs.size(); ++i) {
      const Share x = term.lhs[i];
      const Share y = term.rhs[i];
      acc += x.first * y.first + x.first * y.second + x.second * y.first;
    }
    z[t] = acc;
  }
  const PeerId from[] = {next()};
  auto received =
      channel_.exchange_round(next_round(), {{prev(), pack(z)}}, std::span<const PeerId>(from));
  const auto z_next = unpack(received.at(next()), n);
  ShareVector out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {z[i], z_next[i]};
  return out;
}

ShareVector Party::random(std::size_t count) {
  ShareVector out(count);
  for (auto& s : out) {
    s.first = rand_[0].next();
    s.second = rand_[1].next();
  }
  return out;
}

ShareVector Party::random_bits(std::size_t count) {
  stats_.random_bits += count;
  // Component j contributes a bit c_j known to its two holders; the secret bit
  // is c_0 xor c_1 xor c_2, so no single peer learns it.
  std::array<ShareVector, 3> component_bits;
  for (auto& v : component_bits) v.resize(count);
  const PeerId c_first = id_;
  const PeerId c_second = next();
  for (std::size_t i = 0; i < count; ++i) {
    const Ring b_first = rand_[0].next() & 1;
    const Ring b_second = rand_[1].next() & 1;
    component_bits[c_first][i] = {b_first, 0};
    component_bits[c_second][i] = {0, b_second};
  }
  auto t = mul(component_bits[0], component_bits[1]);
  for (std::size_t i = 0; i < count; ++i) {
    t[i] = component_bits[0][i] + component_bits[1][i] - t[i] * 2;
  }
  auto u = mul(t, component_bits[2]);
  ShareVector out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = t[i] + component_bits[2][i] - u[i] * 2;
  return out;
}

ShareVector Party::reshare_pair(PeerId leader, std::span<const Ring> local, std::size_t count) {
  check_peer(leader);
  const PeerId helper = (leader + 1) % 3;
  const std::uint32_t tag = next_round();
  ShareVector out(count);
  if (id_ == leader || id_ == helper) {
    if (local.size() != count) throw InvalidArgument("reshare value count mismatch");
    // leader masks with component `leader` (its first key), helper with
    // component leader+2 (its second key); the sum is component leader+1.
    Prg& mask_stream = id_ == leader ? rand_[0] : rand_[1];
    std::vector<Ring> masks(count), masked(count);
    for (std::size_t i = 0; i < count; ++i) {
      masks[i] = mask_stream.next();
      masked[i] = local[i] - masks[i];
    }
    const PeerId other = id_ == leader ? helper : leader;
    const PeerId from[] = {other};
    auto received =
        channel_.exchange_round(tag, {{other, pack(masked)}}, std::span<const PeerId>(from));
    const auto theirs = unpack(received.at(other), count);
    for (std::size_t i = 0; i < count; ++i) {
      const Ring middle = masked[i] + theirs[i];
      out[i] = id_ == leader ? Share{masks[i], middle} : Share{middle, masks[i]};
    }
  } else {
    // Third peer holds (x_{leader+2}, x_leader), both pure keystream.
    for (std::size_t i = 0; i < count; ++i) out[i].first = rand_[0].next();
    for (std::size_t i = 0; i < count; ++i) out[i].second = rand_[1].next();
  }
  return out;
}

Prg& Party::pair_stream(PeerId leader) {
  check_peer(leader);
  if (id_ == leader) return perm_[1];
  if (id_ == (leader + 1) % 3) return perm_[0];
  throw InvalidArgument("peer " + std::to_string(id_) + " is not in pair led by " +
                        std::to_string(leader));
}

}  // namespace kep::abb
