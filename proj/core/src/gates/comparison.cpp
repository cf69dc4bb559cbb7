#include <string>

#include "kep/error.hpp"
#include "kep/gates/gates.hpp"

namespace kep::gates {

namespace {

// Generate/propagate pair of a borrow chain segment.
struct Borrow {
  Share g;
  Share p;
};

// Borrow-out of (public c) - (shared r) over bit i, with c_i public.
Borrow borrow_leaf(const Party& party, Ring c_bit, Share r_bit) {
  if (c_bit == 0) return {r_bit, party.constant(1) - r_bit};
  return {Share{}, r_bit};
}

// Folds every chain of leaves into its overall generate bit. All chains are
// reduced together, one round per tree level.
std::vector<Share> reduce_borrows(Party& party, std::vector<std::vector<Borrow>> chains) {
  for (;;) {
    std::vector<Share> lhs, rhs;
    bool any = false;
    for (const auto& chain : chains) {
      for (std::size_t i = 0; i + 1 < chain.size(); i += 2) {
        any = true;
        const Borrow& lo = chain[i];
        const Borrow& hi = chain[i + 1];
        lhs.push_back(hi.p);
        rhs.push_back(lo.g);
        // The propagate bit of the lowest segment is never read again.
        if (i > 0) {
          lhs.push_back(hi.p);
          rhs.push_back(lo.p);
        }
      }
    }
    if (!any) break;
    const auto prod = party.mul(lhs, rhs);
    std::size_t at = 0;
    for (auto& chain : chains) {
      std::vector<Borrow> next;
      next.reserve(chain.size() / 2 + 1);
      for (std::size_t i = 0; i + 1 < chain.size(); i += 2) {
        Borrow b;
        b.g = chain[i + 1].g + prod[at++];
        if (i > 0) b.p = prod[at++];
        next.push_back(b);
      }
      if (chain.size() % 2 == 1) next.push_back(chain.back());
      chain = std::move(next);
    }
  }
  std::vector<Share> out;
  out.reserve(chains.size());
  for (const auto& chain : chains) out.push_back(chain.empty() ? Share{} : chain.front().g);
  return out;
}

Share xor_public(const Party& party, Ring c_bit, Share s) {
  return c_bit == 0 ? s : party.constant(1) - s;
}

}  // namespace

ShareVector gt(Party& party, std::span<const Share> x, std::span<const Share> y) {
  if (x.size() != y.size()) throw InvalidArgument("gt operand length mismatch");
  const std::size_t n = x.size();
  if (n == 0) return {};
  const unsigned k = party.ring().bits;

  // [x > y] is the sign bit of y - x. Mask with k shared random bits, open,
  // then recover the sign as c_{k-1} ^ r_{k-1} ^ borrow of the low k-1 bits.
  const auto bits = party.random_bits(n * k);
  ShareVector masked(n);
  for (std::size_t i = 0; i < n; ++i) {
    Share r{};
    for (unsigned b = 0; b < k; ++b) r += bits[i * k + b] * (Ring{1} << b);
    masked[i] = y[i] - x[i] + r;
  }
  const auto c = party.open(masked);

  std::vector<std::vector<Borrow>> chains(n);
  for (std::size_t i = 0; i < n; ++i) {
    chains[i].reserve(k - 1);
    for (unsigned b = 0; b + 1 < k; ++b) {
      chains[i].push_back(borrow_leaf(party, (c[i] >> b) & 1, bits[i * k + b]));
    }
  }
  const auto borrow = reduce_borrows(party, std::move(chains));

  ShareVector top(n);
  for (std::size_t i = 0; i < n; ++i) top[i] = bits[i * k + k - 1];
  const auto both = party.mul(top, borrow);
  ShareVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Share t = top[i] + borrow[i] - both[i] * 2;
    out[i] = xor_public(party, (c[i] >> (k - 1)) & 1, t);
  }
  return out;
}

Share gt(Party& party, Share x, Share y) {
  return gt(party, std::span<const Share>(&x, 1), std::span<const Share>(&y, 1)).front();
}

ShareVector select(Party& party, std::span<const Share> z, std::span<const Share> x,
                   std::span<const Share> y) {
  if (z.size() != x.size() || x.size() != y.size()) {
    throw InvalidArgument("select operand length mismatch");
  }
  const auto diff = x - y;
  auto out = party.mul(z, diff);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += y[i];
  return out;
}

Share select(Party& party, Share z, Share x, Share y) {
  return select(party, std::span<const Share>(&z, 1), std::span<const Share>(&x, 1),
                std::span<const Share>(&y, 1))
      .front();
}

Share dot_product(Party& party, std::span<const Share> a, std::span<const Share> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("dot product length mismatch: " + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()));
  }
  const abb::DotTerm term{a, b};
  return party.dot(std::span<const abb::DotTerm>(&term, 1)).front();
}

}  // namespace kep::gates
