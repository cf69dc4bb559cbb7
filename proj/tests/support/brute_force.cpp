#include "brute_force.hpp"

#include <algorithm>
#include <functional>

namespace kep::testing {

std::vector<oracle::Cycle> all_cycles(const oracle::PlainGraph& g, unsigned kappa) {
  std::vector<oracle::Cycle> out;
  const auto n = static_cast<std::uint32_t>(g.size());
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      if (g.edge(a, b) && g.edge(b, a)) out.push_back({a, b});
      if (kappa < 3) continue;
      for (std::uint32_t c = a + 1; c < n; ++c) {
        if (c == b) continue;
        if (g.edge(a, b) && g.edge(b, c) && g.edge(c, a)) out.push_back({a, b, c});
      }
    }
  }
  return out;
}

oracle::Weight brute_force_optimum(const oracle::PlainGraph& g, unsigned kappa) {
  const auto cycles = all_cycles(g, kappa);
  std::vector<bool> used(g.size(), false);
  oracle::Weight best = 0;
  std::function<void(std::size_t, oracle::Weight)> go = [&](std::size_t i, oracle::Weight acc) {
    best = std::max(best, acc);
    for (std::size_t k = i; k < cycles.size(); ++k) {
      const auto& c = cycles[k];
      if (std::any_of(c.begin(), c.end(), [&](auto v) { return used[v]; })) continue;
      for (auto v : c) used[v] = true;
      go(k + 1, acc + *oracle::cycle_weight(g, c));
      for (auto v : c) used[v] = false;
    }
  };
  go(0, 0);
  return best;
}

}  // namespace kep::testing
