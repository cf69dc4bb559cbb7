#include "kep/protocol/client.hpp"

#include "kep/error.hpp"

namespace kep::protocol {

std::array<abb::ShareVector, 3> deal(std::span<const abb::Ring> values, abb::Prg& prg) {
  std::array<abb::ShareVector, 3> views;
  for (auto& v : views) v.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const abb::Ring x0 = prg.next();
    const abb::Ring x1 = prg.next();
    const std::array<abb::Ring, 3> x{x0, x1, values[i] - x0 - x1};
    for (unsigned p = 0; p < 3; ++p) views[p][i] = {x[p], x[(p + 1) % 3]};
  }
  return views;
}

std::vector<abb::Ring> reconstruct(const std::array<abb::ShareVector, 3>& views,
                                   const abb::RingConfig& ring) {
  const std::size_t n = views[0].size();
  if (views[1].size() != n || views[2].size() != n)
    throw InvalidArgument("share views have different lengths");
  const abb::Ring mask = ring.mask();
  std::vector<abb::Ring> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (unsigned p = 0; p < 3; ++p) {
      if (((views[p][i].second - views[(p + 1) % 3][i].first) & mask) != 0)
        throw InconsistentShares("share views disagree at position " + std::to_string(i));
    }
    out[i] = (views[0][i].first + views[1][i].first + views[2][i].first) & mask;
  }
  return out;
}

}  // namespace kep::protocol
