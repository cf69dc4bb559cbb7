#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "cycles.hpp"
#include "kep/error.hpp"

namespace kep::oracle {

namespace detail {

std::vector<std::size_t> dp_pack(std::size_t n, const std::vector<MaskedCycle>& cycles) {
  if (n > kExactMaxNodes) throw SizeLimit("too many nodes for subset dynamic program");
  std::vector<std::vector<std::size_t>> by_low(n);
  for (std::size_t c = 0; c < cycles.size(); ++c) {
    by_low[std::countr_zero(cycles[c].mask)].push_back(c);
  }

  // best[mask]: max weight using only nodes outside mask. Nodes are decided in
  // increasing order: the lowest undecided node is left alone or covered by a
  // cycle of undecided nodes.
  const std::uint32_t full = static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1);
  std::vector<Weight> best(std::size_t{1} << n, 0);
  std::vector<std::int32_t> choice(std::size_t{1} << n, -1);
  for (std::int64_t mask = static_cast<std::int64_t>(full) - 1; mask >= 0; --mask) {
    const auto m = static_cast<std::uint32_t>(mask);
    const unsigned u = static_cast<unsigned>(std::countr_one(m));
    Weight value = best[m | (1u << u)];
    std::int32_t pick = -1;
    for (std::size_t c : by_low[u]) {
      if (cycles[c].mask & m) continue;
      const Weight alt = cycles[c].weight + best[m | cycles[c].mask];
      if (alt > value) {
        value = alt;
        pick = static_cast<std::int32_t>(c);
      }
    }
    best[m] = value;
    choice[m] = pick;
  }

  std::vector<std::size_t> chosen;
  std::uint32_t m = 0;
  while (m != full) {
    const auto pick = choice[m];
    if (pick < 0) {
      m |= 1u << std::countr_one(m);
    } else {
      chosen.push_back(static_cast<std::size_t>(pick));
      m |= cycles[pick].mask;
    }
  }
  return chosen;
}

}  // namespace detail

namespace {

using detail::Candidate;
using CandidateSet = std::vector<const Candidate*>;

constexpr double kEps = 1e-9;
// Smallest accepted pivot; smaller ones come from rounding and make the
// basis ill-conditioned.
constexpr double kPivotTol = 1e-7;
constexpr double kIntegralTol = 1e-6;

struct LpSolution {
  double value = 0;
  /// Upper bound on the LP optimum from the final duals, valid however
  /// inexact they are.
  double bound = 0;
  std::vector<double> x;
};

// Packing LP over cycles: max sum w_c x_c subject to, for every node, the
// cycles through it summing to at most 1, and x >= 0. Revised primal simplex
// with a dense basis inverse; Dantzig pricing, Bland's rule during degenerate
// stretches.
LpSolution solve_packing_lp(std::size_t rows, const std::vector<std::vector<std::uint32_t>>& cols,
                            const std::vector<double>& cost) {
  const std::size_t m = rows;
  const std::size_t n = cols.size();
  // Variables 0..n-1 are cycles, n..n+m-1 slacks.
  std::vector<std::size_t> basis(m);
  std::vector<char> in_basis(n + m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    basis[i] = n + i;
    in_basis[n + i] = 1;
  }
  std::vector<double> binv(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) binv[i * m + i] = 1.0;
  std::vector<double> xb(m, 1.0);
  std::vector<double> y(m, 0.0);
  std::vector<double> u(m);

  auto basic_cost = [&](std::size_t var) { return var < n ? cost[var] : 0.0; };
  auto refresh = [&] {
    std::fill(y.begin(), y.end(), 0.0);
    std::fill(xb.begin(), xb.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double cb = basic_cost(basis[i]);
      const double* row = &binv[i * m];
      double sum = 0;
      for (std::size_t k = 0; k < m; ++k) {
        if (cb != 0.0) y[k] += cb * row[k];
        sum += row[k];
      }
      xb[i] = std::max(0.0, sum);
    }
  };

  // Rebuilds the basis inverse from scratch (Gauss-Jordan, partial pivoting);
  // the in-place updates below drift on long runs.
  std::vector<double> work(m * m);
  auto reinvert = [&] {
    std::fill(work.begin(), work.end(), 0.0);
    for (std::size_t c = 0; c < m; ++c) {
      if (basis[c] < n) {
        for (auto v : cols[basis[c]]) work[v * m + c] = 1.0;
      } else {
        work[(basis[c] - n) * m + c] = 1.0;
      }
    }
    std::fill(binv.begin(), binv.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) binv[i * m + i] = 1.0;
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < m; ++r)
        if (std::abs(work[r * m + c]) > std::abs(work[p * m + c])) p = r;
      if (std::abs(work[p * m + c]) < kEps) throw Error("packing LP basis is singular");
      if (p != c) {
        std::swap_ranges(&work[p * m], &work[p * m] + m, &work[c * m]);
        std::swap_ranges(&binv[p * m], &binv[p * m] + m, &binv[c * m]);
      }
      const double inv = 1.0 / work[c * m + c];
      for (std::size_t k = 0; k < m; ++k) {
        work[c * m + k] *= inv;
        binv[c * m + k] *= inv;
      }
      for (std::size_t r = 0; r < m; ++r) {
        const double f = work[r * m + c];
        if (r == c || f == 0.0) continue;
        for (std::size_t k = 0; k < m; ++k) {
          work[r * m + k] -= f * work[c * m + k];
          binv[r * m + k] -= f * binv[c * m + k];
        }
      }
    }
    // Row r of the inverse now belongs to basis position r.
    refresh();
  };

  std::size_t degenerate_run = 0;
  // Columns whose positive reduced cost did not survive a fresh inverse.
  std::vector<char> rejected(n + m, 0);
  bool fresh_inverse = true;
  for (std::size_t iter = 1;; ++iter) {
    if (iter % 256 == 0) {
      reinvert();
      fresh_inverse = true;
    } else if (iter % 64 == 0) {
      refresh();
    }
    const bool bland = degenerate_run > 32;

    std::size_t enter = n + m;
    double best_d = kEps;
    for (std::size_t j = 0; j < n + m; ++j) {
      if (in_basis[j] || rejected[j]) continue;
      double d;
      if (j < n) {
        d = cost[j];
        for (auto v : cols[j]) d -= y[v];
      } else {
        d = -y[j - n];
      }
      if (d > best_d) {
        best_d = d;
        enter = j;
        if (bland) break;
      }
    }
    if (enter == n + m) break;

    for (std::size_t i = 0; i < m; ++i) {
      const double* row = &binv[i * m];
      if (enter < n) {
        double s = 0;
        for (auto v : cols[enter]) s += row[v];
        u[i] = s;
      } else {
        u[i] = row[enter - n];
      }
    }

    std::size_t leave = m;
    double theta = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (u[i] <= kPivotTol) continue;
      const double ratio = xb[i] / u[i];
      if (leave == m || ratio < theta - kEps ||
          (ratio <= theta + kEps &&
           (bland ? basis[i] < basis[leave] : u[i] > u[leave]))) {
        leave = i;
        theta = ratio;
      }
    }
    if (leave == m) {
      // The LP is bounded, so this is rounding error.
      if (fresh_inverse) {
        rejected[enter] = 1;
      } else {
        reinvert();
        fresh_inverse = true;
      }
      continue;
    }
    std::fill(rejected.begin(), rejected.end(), 0);
    fresh_inverse = false;
    degenerate_run = theta <= kEps ? degenerate_run + 1 : 0;

    const double pivot = u[leave];
    for (std::size_t i = 0; i < m; ++i) xb[i] -= theta * u[i];
    xb[leave] = theta;

    double* prow = &binv[leave * m];
    const double step = best_d / pivot;
    for (std::size_t k = 0; k < m; ++k) y[k] += step * prow[k];
    for (std::size_t k = 0; k < m; ++k) prow[k] /= pivot;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave || u[i] == 0.0) continue;
      double* row = &binv[i * m];
      const double f = u[i];
      for (std::size_t k = 0; k < m; ++k) row[k] -= f * prow[k];
    }

    in_basis[basis[leave]] = 0;
    basis[leave] = enter;
    in_basis[enter] = 1;
  }
  refresh();

  LpSolution sol;
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) sol.x[basis[i]] = xb[i];
  }
  for (std::size_t j = 0; j < n; ++j) sol.value += cost[j] * sol.x[j];
  // Weak duality with x <= 1: for any y >= 0 the optimum is at most
  // sum y + sum over columns of their positive reduced cost.
  for (std::size_t i = 0; i < m; ++i) {
    y[i] = std::max(0.0, y[i]);
    sol.bound += y[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    double d = cost[j];
    for (auto v : cols[j]) d -= y[v];
    sol.bound += std::max(0.0, d);
  }
  return sol;
}

struct Selection {
  std::vector<const Candidate*> cycles;
  Weight weight = 0;
};

std::vector<std::uint32_t> nodes_of(const CandidateSet& cs) {
  std::vector<std::uint32_t> nodes;
  for (const auto* c : cs) nodes.insert(nodes.end(), c->cycle.begin(), c->cycle.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

Selection solve_small(const CandidateSet& cs, const std::vector<std::uint32_t>& nodes) {
  std::unordered_map<std::uint32_t, std::uint32_t> local;
  for (std::uint32_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = i;
  std::vector<detail::MaskedCycle> masked;
  masked.reserve(cs.size());
  for (const auto* c : cs) {
    std::uint32_t m = 0;
    for (auto v : c->cycle) m |= 1u << local[v];
    masked.push_back({m, c->weight});
  }
  Selection sel;
  for (std::size_t i : detail::dp_pack(nodes.size(), masked)) {
    sel.cycles.push_back(cs[i]);
    sel.weight += cs[i]->weight;
  }
  return sel;
}

bool touches(const Candidate* c, const Cycle& nodes) {
  return std::any_of(c->cycle.begin(), c->cycle.end(), [&](auto v) {
    return std::find(nodes.begin(), nodes.end(), v) != nodes.end();
  });
}

// Candidate sets that share no node.
std::vector<CandidateSet> components(const CandidateSet& cs) {
  std::unordered_map<std::uint32_t, std::uint32_t> parent;
  auto find = [&](std::uint32_t v) {
    auto it = parent.try_emplace(v, v).first;
    while (it->second != v) {
      v = it->second;
      it = parent.find(v);
    }
    return v;
  };
  for (const auto* c : cs)
    for (std::size_t i = 1; i < c->cycle.size(); ++i) {
      const auto a = find(c->cycle[0]), b = find(c->cycle[i]);
      if (a != b) parent[b] = a;
    }
  std::unordered_map<std::uint32_t, std::size_t> slot;
  std::vector<CandidateSet> out;
  for (const auto* c : cs) {
    auto [it, fresh] = slot.try_emplace(find(c->cycle[0]), out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(c);
  }
  return out;
}

Selection greedy_pick(const CandidateSet& cs) {
  CandidateSet sorted = cs;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->weight > b->weight; });
  std::vector<std::uint32_t> used;
  Selection sel;
  for (const auto* c : sorted) {
    if (touches(c, used)) continue;
    used.insert(used.end(), c->cycle.begin(), c->cycle.end());
    sel.cycles.push_back(c);
    sel.weight += c->weight;
  }
  return sel;
}

Weight lp_bound(const LpSolution& lp) {
  return static_cast<Weight>(std::max(0.0, std::floor(lp.bound + kIntegralTol)));
}

bool overlap(const Candidate* a, const Candidate* b) { return touches(a, b->cycle); }

// Node rows alone let odd structures such as three 2-cycles on a triangle
// take 1/2 each. A set of cycles that pairwise overlap admits at most one of
// them, so violated sets are added as extra rows. Valid for every subproblem.
class CutPool {
 public:
  /// Runs up to `rounds` separation rounds, stopping early once the rounded
  /// bound is at most `target`.
  LpSolution relax(const CandidateSet& cs, const std::vector<std::uint32_t>& nodes,
                   std::int64_t target, int rounds) {
    std::unordered_map<const Candidate*, std::size_t> pos;
    for (std::size_t j = 0; j < cs.size(); ++j) pos[cs[j]] = j;
    std::unordered_map<std::uint32_t, std::uint32_t> row;
    for (std::uint32_t i = 0; i < nodes.size(); ++i) row[nodes[i]] = i;
    std::vector<double> cost(cs.size());
    for (std::size_t j = 0; j < cs.size(); ++j) cost[j] = static_cast<double>(cs[j]->weight);
    double previous = 0;
    for (int round = 0;; ++round) {
      std::vector<std::vector<std::uint32_t>> cols(cs.size());
      for (std::size_t j = 0; j < cs.size(); ++j)
        for (auto v : cs[j]->cycle) cols[j].push_back(row[v]);
      auto rows = static_cast<std::uint32_t>(nodes.size());
      for (const auto& cut : cuts_) {
        std::vector<std::size_t> present;
        for (const auto* c : cut)
          if (auto it = pos.find(c); it != pos.end()) present.push_back(it->second);
        if (present.size() < 2) continue;
        for (auto j : present) cols[j].push_back(rows);
        ++rows;
      }
      auto lp = solve_packing_lp(rows, cols, cost);
      // Rounds that no longer move the bound are not worth their LP solve.
      const bool settled = static_cast<std::int64_t>(lp_bound(lp)) <= target ||
                           (round > 0 && previous - lp.bound < kMinProgress);
      if (settled || round >= rounds || !separate(cs, lp)) return lp;
      previous = lp.bound;
    }
  }

 private:
  static constexpr std::size_t kSeeds = 64;
  static constexpr double kMinProgress = 1e-3;

  // Grows a pairwise overlapping set from each of the largest fractional
  // cycles; keeps the sets whose LP values sum above 1.
  bool separate(const CandidateSet& cs, const LpSolution& lp) {
    std::vector<std::size_t> frac;
    for (std::size_t j = 0; j < cs.size(); ++j)
      if (lp.x[j] > kIntegralTol && lp.x[j] < 1 - kIntegralTol) frac.push_back(j);
    std::stable_sort(frac.begin(), frac.end(),
                     [&](std::size_t a, std::size_t b) { return lp.x[a] > lp.x[b]; });
    bool added = false;
    for (std::size_t s = 0; s < std::min(frac.size(), kSeeds); ++s) {
      std::vector<const Candidate*> clique{cs[frac[s]]};
      double sum = lp.x[frac[s]];
      for (auto j : frac) {
        if (j == frac[s]) continue;
        const bool fits = std::all_of(clique.begin(), clique.end(),
                                      [&](const Candidate* c) { return overlap(c, cs[j]); });
        if (fits) {
          clique.push_back(cs[j]);
          sum += lp.x[j];
        }
      }
      if (sum <= 1 + 1e-6) continue;
      std::sort(clique.begin(), clique.end());
      if (seen_.insert(clique).second) {
        cuts_.push_back(std::move(clique));
        added = true;
      }
    }
    return added;
  }

  std::vector<std::vector<const Candidate*>> cuts_;
  std::set<std::vector<const Candidate*>> seen_;
};

// Packing that takes cycles in order of decreasing LP value, then weight.
Selection round_lp(const CandidateSet& cs, const LpSolution& lp) {
  std::vector<std::size_t> order(cs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (lp.x[a] != lp.x[b]) return lp.x[a] > lp.x[b];
    return cs[a]->weight > cs[b]->weight;
  });
  CandidateSet sorted;
  for (auto j : order) sorted.push_back(cs[j]);
  std::vector<std::uint32_t> used;
  Selection sel;
  for (const auto* c : sorted) {
    if (touches(c, used)) continue;
    used.insert(used.end(), c->cycle.begin(), c->cycle.end());
    sel.cycles.push_back(c);
    sel.weight += c->weight;
  }
  return sel;
}

constexpr int kRootCutRounds = 20;

Selection solve_part(const CandidateSet& cs, std::size_t dp_limit);

// Depth-first search over which cycle covers a chosen node, keeping the best
// packing found so far. Each subproblem is split into independent parts.
class BranchAndBound {
 public:
  BranchAndBound(const CandidateSet& cs, std::size_t dp_limit)
      : dp_limit_(dp_limit), best_(greedy_pick(cs)) {
    std::vector<const Candidate*> taken;
    search(cs, taken, 0);
  }

  Selection result() && { return std::move(best_); }

 private:
  void offer(const std::vector<const Candidate*>& taken, Weight weight, const Selection& rest) {
    if (weight + rest.weight <= best_.weight) return;
    best_.cycles = taken;
    best_.cycles.insert(best_.cycles.end(), rest.cycles.begin(), rest.cycles.end());
    best_.weight = weight + rest.weight;
  }

  void search(const CandidateSet& cs, std::vector<const Candidate*>& taken, Weight weight) {
    if (cs.empty()) {
      offer(taken, weight, {});
      return;
    }
    const auto nodes = nodes_of(cs);
    if (nodes.size() <= dp_limit_) {
      offer(taken, weight, solve_small(cs, nodes));
      return;
    }
    auto parts = components(cs);
    if (parts.size() > 1) {
      // Parts are independent: bound them together, then solve each one.
      Weight bound = 0;
      for (const auto& part : parts) {
        const auto part_nodes = nodes_of(part);
        bound += part_nodes.size() <= dp_limit_ ? solve_small(part, part_nodes).weight
                                                     : lp_bound(cuts_.relax(part, part_nodes, -1, 0));
      }
      if (weight + bound <= best_.weight) return;
      Selection all;
      for (const auto& part : parts) {
        auto sel = solve_part(part, dp_limit_);
        all.cycles.insert(all.cycles.end(), sel.cycles.begin(), sel.cycles.end());
        all.weight += sel.weight;
      }
      offer(taken, weight, all);
      return;
    }

    auto gap = [&] { return static_cast<std::int64_t>(best_.weight) - static_cast<std::int64_t>(weight); };
    auto lp = cuts_.relax(cs, nodes, gap(), 0);
    Weight bound = lp_bound(lp);
    if (weight + bound <= best_.weight) return;
    offer(taken, weight, round_lp(cs, lp));
    if (weight + bound <= best_.weight) return;
    if (taken.empty()) {
      // Cuts found at the root stay in the pool for every later subproblem.
      lp = cuts_.relax(cs, nodes, gap(), kRootCutRounds);
      bound = lp_bound(lp);
      offer(taken, weight, round_lp(cs, lp));
    }
    if (weight + bound <= best_.weight) return;
    std::size_t frac = cs.size();
    double frac_score = 0;
    for (std::size_t j = 0; j < cs.size(); ++j) {
      const double dist = std::min(lp.x[j], 1.0 - lp.x[j]);
      if (dist > kIntegralTol && dist > frac_score) {
        frac_score = dist;
        frac = j;
      }
    }
    if (frac == cs.size()) {
      Selection sel;
      for (std::size_t j = 0; j < cs.size(); ++j)
        if (lp.x[j] > 0.5) {
          sel.cycles.push_back(cs[j]);
          sel.weight += cs[j]->weight;
        }
      offer(taken, weight, sel);
      return;
    }

    // Branch on the node of the most fractional cycle with the fewest
    // candidates: one child per cycle covering it, plus one leaving it out.
    std::uint32_t node = cs[frac]->cycle[0];
    std::size_t fewest = cs.size() + 1;
    for (auto v : cs[frac]->cycle) {
      const auto count = static_cast<std::size_t>(std::count_if(
          cs.begin(), cs.end(), [&](const Candidate* c) { return touches(c, {v}); }));
      if (count < fewest) {
        fewest = count;
        node = v;
      }
    }
    std::vector<std::pair<double, std::size_t>> covering;
    for (std::size_t j = 0; j < cs.size(); ++j)
      if (touches(cs[j], {node})) covering.emplace_back(-lp.x[j], j);
    std::sort(covering.begin(), covering.end());
    for (const auto& [neg_x, j] : covering) {
      const Candidate* pick = cs[j];
      CandidateSet rest;
      for (const auto* c : cs)
        if (!touches(c, pick->cycle)) rest.push_back(c);
      taken.push_back(pick);
      search(rest, taken, weight + pick->weight);
      taken.pop_back();
      if (best_.weight >= weight + bound) return;
    }
    CandidateSet rest;
    for (const auto* c : cs)
      if (!touches(c, {node})) rest.push_back(c);
    search(rest, taken, weight);
  }

  std::size_t dp_limit_;
  Selection best_;
  CutPool cuts_;
};

// Maximum-weight selection from a connected candidate set.
Selection solve_part(const CandidateSet& cs, std::size_t dp_limit) {
  const auto nodes = nodes_of(cs);
  if (nodes.size() <= dp_limit) return solve_small(cs, nodes);
  return BranchAndBound(cs, dp_limit).result();
}

}  // namespace

CyclePacking optimal_packing(const PlainGraph& g, unsigned kappa, std::size_t dp_limit) {
  dp_limit = std::min(dp_limit, kExactMaxNodes);
  const auto cands = detail::candidates(g, kappa);
  CandidateSet all;
  all.reserve(cands.size());
  for (const auto& c : cands) all.push_back(&c);

  CyclePacking packing;
  for (const auto& part : components(all)) {
    const auto sel = solve_part(part, dp_limit);
    for (const auto* c : sel.cycles) packing.cycles.push_back(c->cycle);
    packing.total_weight += sel.weight;
  }
  std::sort(packing.cycles.begin(), packing.cycles.end());
  return packing;
}

}  // namespace kep::oracle
