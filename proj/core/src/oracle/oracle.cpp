#include "kep/oracle/oracle.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "cycles.hpp"
#include "kep/error.hpp"

namespace kep::oracle {

void PlainGraph::set_edge(std::size_t i, std::size_t j, Weight w) {
  if (i >= n_ || j >= n_) throw InvalidArgument("edge endpoint out of range");
  if (i == j) throw InvalidArgument("self loop at node " + std::to_string(i));
  adj_[i * n_ + j] = 1;
  weight_[i * n_ + j] = w;
}

void PlainGraph::remove_edge(std::size_t i, std::size_t j) {
  adj_[i * n_ + j] = 0;
  weight_[i * n_ + j] = 0;
}

std::size_t PlainGraph::edge_count() const {
  return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), 1));
}

PlainGraph PlainGraph::relabeled(const std::vector<std::uint32_t>& perm) const {
  if (perm.size() != n_) throw InvalidArgument("permutation size mismatch");
  PlainGraph out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if (edge(i, j)) out.set_edge(perm[i], perm[j], weight(i, j));
    }
  }
  return out;
}

std::size_t CyclePacking::matched_pairs() const {
  std::size_t n = 0;
  for (const auto& c : cycles) n += c.size();
  return n;
}

std::optional<Weight> cycle_weight(const PlainGraph& g, const Cycle& cycle) {
  Weight total = 0;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    const auto from = cycle[i];
    const auto to = cycle[(i + 1) % cycle.size()];
    if (from >= g.size() || to >= g.size() || !g.edge(from, to)) return std::nullopt;
    total += g.weight(from, to);
  }
  return total;
}

Cycle canonical(Cycle cycle) {
  auto lowest = std::min_element(cycle.begin(), cycle.end());
  std::rotate(cycle.begin(), lowest, cycle.end());
  return cycle;
}

std::size_t subset_count(std::size_t n, unsigned kappa) {
  const std::size_t pairs = n * (n - (n > 0 ? 1 : 0)) / 2;
  if (kappa == 2) return pairs;
  const std::size_t triples = n < 3 ? 0 : n * (n - 1) * (n - 2) / 6;
  return triples + pairs;
}

std::vector<std::array<std::uint32_t, 3>> enumerate_subsets(std::size_t n, unsigned kappa) {
  if (kappa != 2 && kappa != 3) throw InvalidArgument("kappa must be 2 or 3");
  std::vector<std::array<std::uint32_t, 3>> out;
  out.reserve(subset_count(n, kappa));
  const auto N = static_cast<std::uint32_t>(n);
  if (kappa == 3) {
    for (std::uint32_t u = 0; u < N; ++u)
      for (std::uint32_t v = u + 1; v < N; ++v)
        for (std::uint32_t w = v + 1; w < N; ++w) out.push_back({u, v, w});
  }
  for (std::uint32_t u = 0; u < N; ++u)
    for (std::uint32_t v = u + 1; v < N; ++v) out.push_back({u, v, N});
  return out;
}

namespace detail {

bool table_less(const std::array<std::uint32_t, 3>& a, const std::array<std::uint32_t, 3>& b,
                std::uint32_t n) {
  const bool a_pair = a[2] == n;
  const bool b_pair = b[2] == n;
  if (a_pair != b_pair) return !a_pair;
  return a < b;
}

std::vector<Candidate> candidates(const PlainGraph& g, unsigned kappa) {
  if (kappa != 2 && kappa != 3) throw InvalidArgument("kappa must be 2 or 3");
  const auto n = static_cast<std::uint32_t>(g.size());
  std::vector<std::vector<std::uint32_t>> out(n);
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < n; ++j)
      if (g.edge(i, j)) out[i].push_back(j);

  std::vector<Candidate> result;
  if (kappa == 3) {
    // For u the smallest node, u -> v -> w -> u is orientation (u, v, w) of
    // the sorted subset when v < w, and (u, w, v) otherwise.
    struct Orientations {
      std::optional<Weight> first;
      std::optional<Weight> second;
    };
    std::unordered_map<std::uint64_t, Orientations> seen;
    auto key = [n](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
      return (static_cast<std::uint64_t>(a) * n + b) * n + c;
    };
    for (std::uint32_t u = 0; u < n; ++u) {
      for (std::uint32_t v : out[u]) {
        if (v < u) continue;
        for (std::uint32_t w : out[v]) {
          if (w <= u || w == v || !g.edge(w, u)) continue;
          const Weight wt = g.weight(u, v) + g.weight(v, w) + g.weight(w, u);
          if (v < w) {
            seen[key(u, v, w)].first = wt;
          } else {
            seen[key(u, w, v)].second = wt;
          }
        }
      }
    }
    for (const auto& [k, o] : seen) {
      const auto c = static_cast<std::uint32_t>(k % n);
      const auto b = static_cast<std::uint32_t>((k / n) % n);
      const auto a = static_cast<std::uint32_t>(k / n / n);
      const Weight wf = o.first.value_or(0);
      const Weight ws = o.second.value_or(0);
      if (wf >= ws) {
        if (wf > 0) result.push_back({{a, b, c}, {a, b, c}, wf});
      } else {
        result.push_back({{a, b, c}, {a, c, b}, ws});
      }
    }
  }
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t v : out[u]) {
      if (v <= u || !g.edge(v, u)) continue;
      const Weight wt = g.weight(u, v) + g.weight(v, u);
      if (wt > 0) result.push_back({{u, v, n}, {u, v}, wt});
    }
  }
  std::sort(result.begin(), result.end(),
            [n](const auto& a, const auto& b) { return table_less(a.subset, b.subset, n); });
  return result;
}

}  // namespace detail

CyclePacking greedy_solve(const PlainGraph& g, unsigned kappa,
                          const std::optional<std::vector<std::uint32_t>>& perm) {
  if (perm) {
    auto packing = greedy_solve(g.relabeled(*perm), kappa);
    std::vector<std::uint32_t> inverse(perm->size());
    for (std::uint32_t i = 0; i < perm->size(); ++i) inverse[(*perm)[i]] = i;
    for (auto& c : packing.cycles)
      for (auto& v : c) v = inverse[v];
    return packing;
  }
  auto cands = detail::candidates(g, kappa);
  const auto n = static_cast<std::uint32_t>(g.size());
  std::sort(cands.begin(), cands.end(), [n](const auto& a, const auto& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return detail::table_less(a.subset, b.subset, n);
  });
  CyclePacking packing;
  std::vector<bool> used(g.size(), false);
  for (const auto& c : cands) {
    if (std::any_of(c.cycle.begin(), c.cycle.end(), [&](auto v) { return used[v]; })) continue;
    for (auto v : c.cycle) used[v] = true;
    packing.cycles.push_back(c.cycle);
    packing.total_weight += c.weight;
  }
  return packing;
}

CyclePacking greedy_solve_table(const PlainGraph& g, unsigned kappa,
                                const std::optional<std::vector<std::uint32_t>>& subset_order) {
  const auto subsets = enumerate_subsets(g.size(), kappa);
  const auto n = static_cast<std::uint32_t>(g.size());
  std::vector<std::uint32_t> order(subsets.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  if (subset_order) {
    if (subset_order->size() != subsets.size()) throw InvalidArgument("subset order size mismatch");
    order = *subset_order;
  }

  // Scores in scan order.
  std::vector<Weight> weights(order.size());
  std::vector<Cycle> best(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& s = subsets[order[k]];
    if (s[2] == n) {
      best[k] = {s[0], s[1]};
      weights[k] = cycle_weight(g, best[k]).value_or(0);
    } else {
      const Cycle first{s[0], s[1], s[2]};
      const Cycle second{s[0], s[2], s[1]};
      const Weight wf = cycle_weight(g, first).value_or(0);
      const Weight ws = cycle_weight(g, second).value_or(0);
      best[k] = wf >= ws ? first : second;
      weights[k] = std::max(wf, ws);
    }
  }

  CyclePacking packing;
  std::vector<bool> alive(order.size(), true);
  for (;;) {
    std::size_t pick = order.size();
    Weight top = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (alive[k] && weights[k] > top) {
        top = weights[k];
        pick = k;
      }
    }
    if (pick == order.size()) break;
    packing.cycles.push_back(best[pick]);
    packing.total_weight += top;
    const auto& chosen = subsets[order[pick]];
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& s = subsets[order[k]];
      for (auto a : s) {
        if (a == n) continue;
        if (a == chosen[0] || a == chosen[1] || (chosen[2] != n && a == chosen[2])) alive[k] = false;
      }
    }
  }
  return packing;
}

CyclePacking exact_solve(const PlainGraph& g, unsigned kappa) {
  const std::size_t n = g.size();
  if (n > kExactMaxNodes) {
    throw SizeLimit("exact solver supports at most " + std::to_string(kExactMaxNodes) +
                    " nodes, got " + std::to_string(n));
  }
  const auto cands = detail::candidates(g, kappa);
  std::vector<detail::MaskedCycle> masked;
  masked.reserve(cands.size());
  for (const auto& c : cands) {
    std::uint32_t m = 0;
    for (auto v : c.cycle) m |= 1u << v;
    masked.push_back({m, c.weight});
  }
  CyclePacking packing;
  for (std::size_t c : detail::dp_pack(n, masked)) {
    packing.cycles.push_back(cands[c].cycle);
    packing.total_weight += cands[c].weight;
  }
  return packing;
}

std::string to_string(Violation v) {
  switch (v) {
    case Violation::kNone: return "none";
    case Violation::kLength: return "length";
    case Violation::kNodeRange: return "node-range";
    case Violation::kDisjointness: return "disjointness";
    case Violation::kMissingEdge: return "missing-edge";
    case Violation::kWeight: return "weight";
  }
  return "unknown";
}

ValidationReport validate(const PlainGraph& g, const CyclePacking& packing, unsigned kappa) {
  std::vector<bool> used(g.size(), false);
  Weight total = 0;
  for (std::size_t c = 0; c < packing.cycles.size(); ++c) {
    const auto& cycle = packing.cycles[c];
    const std::string where = "cycle " + std::to_string(c);
    if (cycle.size() < 2 || cycle.size() > kappa) {
      return {Violation::kLength, where + " has length " + std::to_string(cycle.size())};
    }
    for (auto v : cycle) {
      if (v >= g.size()) return {Violation::kNodeRange, where + " uses node " + std::to_string(v)};
      if (used[v]) return {Violation::kDisjointness, "node " + std::to_string(v) + " used twice"};
      used[v] = true;
    }
    const auto w = cycle_weight(g, cycle);
    if (!w) return {Violation::kMissingEdge, where + " uses a missing edge"};
    total += *w;
  }
  if (total != packing.total_weight) {
    return {Violation::kWeight, "reported weight " + std::to_string(packing.total_weight) +
                                    ", actual " + std::to_string(total)};
  }
  return {};
}

double quality(const PlainGraph& g, unsigned kappa) {
  const auto exact = exact_solve(g, kappa).matched_pairs();
  if (exact == 0) return 1.0;
  return static_cast<double>(greedy_solve(g, kappa).matched_pairs()) / static_cast<double>(exact);
}

PlainGraph read_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<PlainGraph> g;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    fields.clear();
    fields.seekg(0);
    if (!g) {
      long long n = -1;
      std::string extra;
      if (!(fields >> n) || n < 0 || (fields >> extra)) {
        throw ParseError(line_no, "expected node count");
      }
      g.emplace(static_cast<std::size_t>(n));
      continue;
    }
    long long u = -1, v = -1, w = -1;
    std::string extra;
    if (!(fields >> u >> v >> w) || (fields >> extra)) {
      throw ParseError(line_no, "expected 'u v weight'");
    }
    if (u < 0 || v < 0 || w < 0) throw ParseError(line_no, "negative value");
    if (static_cast<std::size_t>(u) >= g->size() || static_cast<std::size_t>(v) >= g->size()) {
      throw ParseError(line_no, "node out of range");
    }
    if (u == v) throw ParseError(line_no, "self loop");
    g->set_edge(u, v, static_cast<Weight>(w));
  }
  if (!g) throw ParseError(line_no, "missing node count");
  return *g;
}

void write_graph(std::ostream& out, const PlainGraph& g) {
  out << g.size() << '\n';
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (g.edge(i, j)) out << i << ' ' << j << ' ' << g.weight(i, j) << '\n';
}

Assignment to_assignment(const CyclePacking& packing, std::size_t n) {
  Assignment a{std::vector<std::uint32_t>(n, 0), std::vector<std::uint32_t>(n, 0)};
  for (const auto& c : packing.cycles) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto from = c[i];
      const auto to = c[(i + 1) % c.size()];
      a.recipient[from] = to + 1;
      a.donor[to] = from + 1;
    }
  }
  return a;
}

CyclePacking from_assignment(const PlainGraph& g, const Assignment& a) {
  const std::size_t n = g.size();
  if (a.donor.size() != n || a.recipient.size() != n) {
    throw InvalidArgument("assignment length does not match graph");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (a.donor[i] > n || a.recipient[i] > n) throw InvalidArgument("assignment index out of range");
    if ((a.donor[i] == 0) != (a.recipient[i] == 0)) {
      throw InvalidArgument("pair " + std::to_string(i) + " is half matched");
    }
    if (a.recipient[i] != 0 && a.donor[a.recipient[i] - 1] != i + 1) {
      throw InvalidArgument("donor and recipient vectors disagree at pair " + std::to_string(i));
    }
  }
  CyclePacking packing;
  std::vector<bool> seen(n, false);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (seen[i] || a.recipient[i] == 0) continue;
    Cycle c;
    std::uint32_t v = i;
    while (!seen[v]) {
      seen[v] = true;
      c.push_back(v);
      v = a.recipient[v] - 1;
    }
    if (v != i) throw InvalidArgument("assignment does not decompose into cycles");
    packing.cycles.push_back(c);
    packing.total_weight += cycle_weight(g, c).value_or(0);
  }
  return packing;
}

}  // namespace kep::oracle
