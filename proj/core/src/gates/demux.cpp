#include <bit>
#include <string>

#include "kep/error.hpp"
#include "kep/gates/gates.hpp"

namespace kep::gates {

namespace {

// Bits of x[i] below widths[i], concatenated.
std::vector<ShareVector> decompose(Party& party, std::span<const Share> x,
                                   std::span<const unsigned> widths) {
  const std::size_t n = x.size();
  const unsigned k = party.ring().bits;
  std::size_t total = 0;
  for (unsigned w : widths) {
    if (w >= k - 1) throw InvalidArgument("bit width " + std::to_string(w) + " too large");
    total += w;
  }
  const auto bits = party.random_bits(total);
  const auto high = party.random(n);

  // c = x + r with r = sum r_b 2^b + 2^w * r_high; since x < 2^w, x equals the
  // low w bits of c - r, computed by a borrow-lookahead subtraction.
  ShareVector masked(n);
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    offset[i + 1] = offset[i] + widths[i];
    Share r = high[i] * (Ring{1} << widths[i]);
    for (unsigned b = 0; b < widths[i]; ++b) r += bits[offset[i] + b] * (Ring{1} << b);
    masked[i] = x[i] + r;
  }
  const auto c = party.open(masked);

  // Kogge-Stone prefix over (generate, propagate); g[j] ends up as the borrow
  // out of bits [0, j].
  ShareVector g(total), p(total);
  const Share one = party.constant(1);
  for (std::size_t i = 0; i < n; ++i) {
    for (unsigned b = 0; b < widths[i]; ++b) {
      const Share r = bits[offset[i] + b];
      if (((c[i] >> b) & 1) == 0) {
        g[offset[i] + b] = r;
        p[offset[i] + b] = one - r;
      } else {
        g[offset[i] + b] = Share{};
        p[offset[i] + b] = r;
      }
    }
  }
  unsigned max_width = 0;
  for (unsigned w : widths) max_width = std::max(max_width, w);
  // Only borrows out of bits [0, w-2] are needed.
  for (unsigned d = 1; d + 1 < max_width; d *= 2) {
    ShareVector lhs, rhs;
    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < n; ++i) {
      for (unsigned b = d; b + 1 < widths[i]; ++b) {
        const std::size_t at = offset[i] + b;
        lhs.push_back(p[at]);
        rhs.push_back(g[at - d]);
        lhs.push_back(p[at]);
        rhs.push_back(p[at - d]);
        targets.push_back(at);
      }
    }
    if (targets.empty()) break;
    const auto prod = party.mul(lhs, rhs);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      g[targets[t]] += prod[2 * t];
      p[targets[t]] = prod[2 * t + 1];
    }
  }

  // x_b = c_b ^ r_b ^ borrow_b, with borrow_0 = 0.
  ShareVector lhs, rhs;
  for (std::size_t i = 0; i < n; ++i) {
    for (unsigned b = 1; b < widths[i]; ++b) {
      lhs.push_back(bits[offset[i] + b]);
      rhs.push_back(g[offset[i] + b - 1]);
    }
  }
  const auto both = party.mul(lhs, rhs);
  std::vector<ShareVector> out(n);
  std::size_t at = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i].resize(widths[i]);
    for (unsigned b = 0; b < widths[i]; ++b) {
      const Share r = bits[offset[i] + b];
      Share t = r;
      if (b > 0) {
        const Share borrow = g[offset[i] + b - 1];
        t = r + borrow - both[at++] * 2;
      }
      out[i][b] = ((c[i] >> b) & 1) == 0 ? t : one - t;
    }
  }
  return out;
}

struct Expansion {
  std::span<const Share> bits;
  std::size_t length;
};

// One-hot vectors of the first `length` values for each bit vector. Splits
// every bit vector in halves and recurses on all halves at once, so the
// round count is the depth of the widest split.
std::vector<ShareVector> expand(Party& party, std::span<const Expansion> tasks) {
  std::vector<ShareVector> out(tasks.size());
  std::vector<Expansion> children;
  std::vector<std::size_t> split;
  const Share one = party.constant(1);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const auto& task = tasks[t];
    const std::size_t m = task.bits.size();
    if (m == 0) {
      out[t].assign(std::min<std::size_t>(task.length, 1), one);
    } else if (m == 1) {
      const ShareVector full{one - task.bits[0], task.bits[0]};
      out[t].assign(full.begin(), full.begin() + std::min<std::size_t>(task.length, 2));
    } else {
      const std::size_t low = m / 2;
      const std::size_t low_size = std::size_t{1} << low;
      children.push_back({task.bits.first(low), low_size});
      children.push_back({task.bits.subspan(low), (task.length + low_size - 1) >> low});
      split.push_back(t);
    }
  }
  if (split.empty()) return out;

  const auto halves = expand(party, children);
  ShareVector lhs, rhs;
  for (std::size_t s = 0; s < split.size(); ++s) {
    const auto& lo = halves[2 * s];
    const auto& hi = halves[2 * s + 1];
    const std::size_t low = tasks[split[s]].bits.size() / 2;
    for (std::size_t j = 0; j < tasks[split[s]].length; ++j) {
      lhs.push_back(hi[j >> low]);
      rhs.push_back(lo[j & ((std::size_t{1} << low) - 1)]);
    }
  }
  const auto prod = party.mul(lhs, rhs);
  std::size_t at = 0;
  for (std::size_t s = 0; s < split.size(); ++s) {
    const std::size_t len = tasks[split[s]].length;
    out[split[s]].assign(prod.begin() + at, prod.begin() + at + len);
    at += len;
  }
  return out;
}

}  // namespace

ShareVector bit_decompose(Party& party, std::span<const Share> x, unsigned bits) {
  const std::vector<unsigned> widths(x.size(), bits);
  const auto parts = decompose(party, x, widths);
  ShareVector out;
  out.reserve(x.size() * bits);
  for (const auto& v : parts) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::vector<ShareVector> demux(Party& party, std::span<const DemuxRequest> requests) {
  party.record_gate("demux");
  ShareVector values;
  std::vector<unsigned> widths;
  for (const auto& r : requests) {
    values.push_back(r.value);
    widths.push_back(static_cast<unsigned>(std::bit_width(r.length)));
  }
  const auto bits = decompose(party, values, widths);
  std::vector<Expansion> tasks;
  for (std::size_t i = 0; i < requests.size(); ++i) tasks.push_back({bits[i], requests[i].length});
  return expand(party, tasks);
}

ShareVector demux(Party& party, Share x, std::size_t length) {
  const DemuxRequest request{x, length};
  return demux(party, std::span<const DemuxRequest>(&request, 1)).front();
}

}  // namespace kep::gates
