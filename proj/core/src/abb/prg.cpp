#include "kep/abb/prg.hpp"

#include <sodium.h>

#include <cstring>
#include <numeric>
#include <stdexcept>

namespace kep::abb {

namespace {

constexpr std::size_t kBufferWords = 512;

void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialisation failed");
}

}  // namespace

Prg::Prg(const PrgKey& key, std::uint64_t stream_id) : key_(key) {
  ensure_sodium();
  for (int i = 0; i < 8; ++i) nonce_[i] = static_cast<std::uint8_t>(stream_id >> (8 * i));
}

void Prg::refill() {
  buffer_.assign(kBufferWords, 0);
  // Keystream = encryption of zeros; counter advances by 64-byte blocks.
  auto* bytes = reinterpret_cast<unsigned char*>(buffer_.data());
  const std::size_t len = kBufferWords * sizeof(std::uint64_t);
  crypto_stream_chacha20_xor_ic(bytes, bytes, len, nonce_.data(), block_counter_, key_.data());
  block_counter_ += len / 64;
  position_ = 0;
}

std::uint64_t Prg::next() {
  if (position_ >= buffer_.size()) refill();
  return buffer_[position_++];
}

void Prg::fill(std::uint64_t* out, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) out[i] = next();
}

std::uint64_t Prg::uniform(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform bound must be positive");
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x <= limit) return x % bound;
  }
}

PrgKey Prg::random_key() {
  ensure_sodium();
  PrgKey key;
  randombytes_buf(key.data(), key.size());
  return key;
}

PrgKey Prg::derive_key(std::uint64_t seed, std::uint64_t label) {
  ensure_sodium();
  std::array<std::uint8_t, 16> input{};
  for (int i = 0; i < 8; ++i) {
    input[i] = static_cast<std::uint8_t>(seed >> (8 * i));
    input[8 + i] = static_cast<std::uint8_t>(label >> (8 * i));
  }
  PrgKey key;
  crypto_generichash(key.data(), key.size(), input.data(), input.size(), nullptr, 0);
  return key;
}

std::vector<std::uint32_t> random_permutation(Prg& prg, std::size_t n) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = prg.uniform(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

std::vector<std::uint32_t> invert_permutation(const std::vector<std::uint32_t>& perm) {
  std::vector<std::uint32_t> inverse(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) inverse[perm[i]] = static_cast<std::uint32_t>(i);
  return inverse;
}

}  // namespace kep::abb
