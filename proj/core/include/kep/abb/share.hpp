#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kep/error.hpp"

namespace kep::abb {

/// Element of Z_2^64. Narrower rings reduce on open and on the wire, which is
/// sound because reduction mod 2^k is a ring homomorphism.
using Ring = std::uint64_t;

struct RingConfig {
  unsigned bits = 64;

  Ring mask() const noexcept { return bits >= 64 ? ~Ring{0} : (Ring{1} << bits) - 1; }
  std::size_t wire_bytes() const noexcept { return (bits + 7) / 8; }
  void validate() const {
    if (bits < 32 || bits > 64) throw InvalidArgument("ring bit width must be in [32, 64]");
  }
};

/// One peer's view of a replicated sharing: peer p holds components
/// (x_p, x_{p+1}) of x = x_0 + x_1 + x_2.
struct Share {
  Ring first = 0;
  Ring second = 0;

  friend bool operator==(const Share&, const Share&) = default;
};

inline Share operator+(Share a, Share b) { return {a.first + b.first, a.second + b.second}; }
inline Share operator-(Share a, Share b) { return {a.first - b.first, a.second - b.second}; }
inline Share operator-(Share a) { return {Ring{0} - a.first, Ring{0} - a.second}; }
inline Share operator*(Share a, Ring c) { return {a.first * c, a.second * c}; }
inline Share operator*(Ring c, Share a) { return a * c; }
inline Share& operator+=(Share& a, Share b) { return a = a + b; }
inline Share& operator-=(Share& a, Share b) { return a = a - b; }

using ShareVector = std::vector<Share>;

ShareVector operator+(std::span<const Share> a, std::span<const Share> b);
ShareVector operator-(std::span<const Share> a, std::span<const Share> b);

/// Row-major matrix of shares with public dimensions.
class ShareMatrix {
 public:
  ShareMatrix() = default;
  ShareMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Share& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Share& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Share> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const Share> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  ShareVector& data() noexcept { return data_; }
  const ShareVector& data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  ShareVector data_;
};

}  // namespace kep::abb
