#include "kep/compat/compat.hpp"

#include "kep/error.hpp"
#include "kep/gates/gates.hpp"

namespace kep::compat {

using abb::Party;
using abb::Ring;
using abb::Share;
using abb::ShareVector;
using PairList = std::span<const std::pair<std::size_t, std::size_t>>;

namespace {

std::uint64_t dot(const BloodVector& a, const BloodVector& b) {
  std::uint64_t s = 0;
  for (std::size_t t = 0; t < 4; ++t) s += std::uint64_t{a[t]} * b[t];
  return s;
}

// Patient blood type as a one-hot vector, recovered linearly from the
// acceptance row: AB = acc_AB, A = acc_A - acc_AB, B = acc_B - acc_AB,
// O = 1 - acc_A - acc_B + acc_AB.
ShareVector patient_type(const Party& party, const SharedQuote& q) {
  const auto& acc = q.patient_accepts;
  return {party.constant(1) - acc[1] - acc[2] + acc[3], acc[1] - acc[3], acc[2] - acc[3],
          acc[3]};
}

BloodVector patient_type(const BloodVector& acc) {
  return {static_cast<std::uint8_t>(1 - acc[1] - acc[2] + acc[3]),
          static_cast<std::uint8_t>(acc[1] - acc[3]), static_cast<std::uint8_t>(acc[2] - acc[3]),
          acc[3]};
}

void check_pairs(std::span<const SharedQuote> quotes, PairList pairs) {
  for (auto [i, j] : pairs)
    if (i >= quotes.size() || j >= quotes.size() || i == j)
      throw InvalidArgument("quote pair out of range or on the diagonal");
}

}  // namespace

std::uint64_t PrioPolicy::bound() const {
  if (kind == Kind::kConstant) return constant;
  std::uint64_t total = 0;
  for (std::uint64_t c : {base, blood_identical, region_match, pediatric, prior_living_donor,
                          age_difference, high_cpra}) {
    if (c > max_weight) return c;
    total += c;
  }
  return total;
}

void PrioPolicy::validate() const {
  if (max_weight == 0 || max_weight > kDefaultMaxWeight)
    throw InvalidArgument("max weight must be in [1, 2^20]");
  if (bound() > max_weight)
    throw InvalidArgument("priority policy can exceed the max weight " +
                          std::to_string(max_weight));
  if (sensitized_cpra > 100) throw InvalidArgument("sensitized cpra must be in [0, 100]");
  if (age_window > 150) throw InvalidArgument("age window must be at most 150");
}

bool compatible(const Quote& donor_side, const Quote& patient_side) {
  if (dot(donor_side.donor_blood, patient_side.patient_accepts) != 1) return false;
  for (std::size_t l = 0; l < donor_side.donor_antigens.size(); ++l)
    if (donor_side.donor_antigens[l] && patient_side.patient_antibodies[l]) return false;
  return true;
}

std::uint64_t priority(const PrioPolicy& policy, const Quote& donor_side,
                       const Quote& patient_side) {
  if (policy.kind == PrioPolicy::Kind::kConstant) return policy.constant;
  const auto& d = donor_side.prio;
  const auto& p = patient_side.prio;
  std::uint64_t w = policy.base;
  if (dot(donor_side.donor_blood, patient_type(patient_side.patient_accepts)) == 1)
    w += policy.blood_identical;
  if (d.region == p.region) w += policy.region_match;
  if (p.pediatric) w += policy.pediatric;
  if (p.prior_living_donor) w += policy.prior_living_donor;
  std::uint32_t gap = d.donor_age > p.age ? d.donor_age - p.age : p.age - d.donor_age;
  if (gap <= policy.age_window) w += policy.age_difference;
  if (patient_side.cpra >= policy.sensitized_cpra) w += policy.high_cpra;
  return w;
}

oracle::PlainGraph plain_graph(std::span<const Quote> quotes, const PrioPolicy& policy) {
  oracle::PlainGraph g(quotes.size());
  for (std::size_t i = 0; i < quotes.size(); ++i)
    for (std::size_t j = 0; j < quotes.size(); ++j) {
      if (i == j || !compatible(quotes[i], quotes[j])) continue;
      auto w = priority(policy, quotes[i], quotes[j]);
      if (w > 0) g.set_edge(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), w);
    }
  return g;
}

ShareVector comp_check(Party& party, std::span<const SharedQuote> quotes, PairList pairs) {
  check_pairs(quotes, pairs);
  std::vector<abb::DotTerm> terms;
  terms.reserve(2 * pairs.size());
  for (auto [i, j] : pairs) {
    terms.push_back({quotes[i].donor_blood, quotes[j].patient_accepts});
    terms.push_back({quotes[i].donor_antigens, quotes[j].patient_antibodies});
  }
  ShareVector dots = party.dot(terms);

  ShareVector blood(pairs.size()), hits(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    blood[k] = dots[2 * k];
    hits[k] = dots[2 * k + 1];
  }
  ShareVector zero(pairs.size(), party.constant(0));
  ShareVector conflict = gates::gt(party, hits, zero);
  ShareVector clear(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) clear[k] = party.constant(1) - conflict[k];
  return party.mul(blood, clear);
}

ShareVector prio(Party& party, const PrioPolicy& policy, std::span<const SharedQuote> quotes,
                 PairList pairs) {
  policy.validate();
  check_pairs(quotes, pairs);
  const std::size_t n = pairs.size();
  if (policy.kind == PrioPolicy::Kind::kConstant)
    return ShareVector(n, party.constant(policy.constant));

  ShareVector w(n, party.constant(policy.base));
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = quotes[pairs[k].second];
    w[k] += p.pediatric * policy.pediatric;
    w[k] += p.prior_living_donor * policy.prior_living_donor;
  }

  if (policy.blood_identical) {
    std::vector<ShareVector> types;
    types.reserve(n);
    std::vector<abb::DotTerm> terms;
    terms.reserve(n);
    for (auto [i, j] : pairs) {
      types.push_back(patient_type(party, quotes[j]));
      terms.push_back({quotes[i].donor_blood, types.back()});
    }
    ShareVector same = party.dot(terms);
    for (std::size_t k = 0; k < n; ++k) w[k] += same[k] * policy.blood_identical;
  }

  // All comparisons share one gt batch; each criterion owns a contiguous
  // block of n results.
  ShareVector lhs, rhs;
  auto block = [&](auto&& pick) {
    for (auto [i, j] : pairs) {
      auto [a, b] = pick(quotes[i], quotes[j]);
      lhs.push_back(a);
      rhs.push_back(b);
    }
  };
  const Share window = party.constant(policy.age_window);
  if (policy.region_match) {
    block([](const SharedQuote& d, const SharedQuote& p) { return std::pair{d.region, p.region}; });
    block([](const SharedQuote& d, const SharedQuote& p) { return std::pair{p.region, d.region}; });
  }
  if (policy.age_difference) {
    block([&](const SharedQuote& d, const SharedQuote& p) {
      return std::pair{d.donor_age, p.age + window};
    });
    block([&](const SharedQuote& d, const SharedQuote& p) {
      return std::pair{p.age, d.donor_age + window};
    });
  }
  const bool cpra_always = policy.sensitized_cpra == 0;
  if (policy.high_cpra && !cpra_always) {
    const Share below = party.constant(policy.sensitized_cpra - 1);
    block([&](const SharedQuote&, const SharedQuote& p) { return std::pair{p.cpra, below}; });
  }
  if (cpra_always)
    for (auto& x : w) x = party.add_const(x, policy.high_cpra);
  if (lhs.empty()) return w;

  ShareVector g = gates::gt(party, lhs, rhs);
  std::size_t at = 0;
  auto neither = [&](std::uint64_t coef) {
    for (std::size_t k = 0; k < n; ++k)
      w[k] += (party.constant(1) - g[at + k] - g[at + n + k]) * coef;
    at += 2 * n;
  };
  if (policy.region_match) neither(policy.region_match);
  if (policy.age_difference) neither(policy.age_difference);
  if (policy.high_cpra && !cpra_always)
    for (std::size_t k = 0; k < n; ++k) w[k] += g[at + k] * policy.high_cpra;
  return w;
}

CompatGraph build_graph(Party& party, std::span<const SharedQuote> quotes,
                        const PrioPolicy& policy) {
  const std::size_t n = quotes.size();
  if (n < 2) throw InvalidArgument("the compatibility graph needs at least two pairs");
  policy.validate();
  const unsigned bits = party.ring().bits;
  if (3 * policy.max_weight + 1 >= (Ring{1} << (bits - 2)))
    throw InvalidArgument("ring too narrow for the max weight");

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) pairs.emplace_back(i, j);

  ShareVector m = comp_check(party, quotes, pairs);
  ShareVector w = prio(party, policy, quotes, pairs);
  CompatGraph g{abb::ShareMatrix(n, n), abb::ShareMatrix(n, n)};
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [i, j] = pairs[k];
    g.m(i, j) = m[k];
    g.w(i, j) = w[k];
  }
  return g;
}

}  // namespace kep::compat
