#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kep/abb/party.hpp"
#include "kep/compat/quote.hpp"
#include "kep/oracle/oracle.hpp"

namespace kep::compat {

inline constexpr std::uint64_t kDefaultMaxWeight = std::uint64_t{1} << 20;
inline constexpr std::uint32_t kHighlySensitizedCpra = 80;

/// Edge weight rule. kConstant gives every edge `constant`; kExtended sums
/// public integer coefficients over per-edge criteria.
struct PrioPolicy {
  enum class Kind { kConstant, kExtended };

  Kind kind = Kind::kConstant;
  std::uint64_t constant = 1;

  std::uint64_t base = 0;
  /// Donor blood type equals the patient's.
  std::uint64_t blood_identical = 0;
  /// Both pairs registered in the same region.
  std::uint64_t region_match = 0;
  /// Patient is a child.
  std::uint64_t pediatric = 0;
  /// Patient was a living donor before.
  std::uint64_t prior_living_donor = 0;
  /// |donor age - patient age| <= age_window.
  std::uint64_t age_difference = 0;
  std::uint32_t age_window = 10;
  /// Patient cpra >= sensitized_cpra.
  std::uint64_t high_cpra = 0;
  std::uint32_t sensitized_cpra = kHighlySensitizedCpra;

  std::uint64_t max_weight = kDefaultMaxWeight;

  /// Largest weight the policy can produce; must not exceed max_weight.
  std::uint64_t bound() const;
  void validate() const;

  static PrioPolicy constant_one() { return {}; }
};

/// Policy as a JSON object with the field names above and "kind" set to
/// "constant" or "extended". Missing keys keep defaults.
PrioPolicy parse_policy(const std::string& json_text);
std::string policy_json(const PrioPolicy& policy);

/// Plaintext rules, the oracles of the secure gates.
bool compatible(const Quote& donor_side, const Quote& patient_side);
std::uint64_t priority(const PrioPolicy& policy, const Quote& donor_side,
                       const Quote& patient_side);
oracle::PlainGraph plain_graph(std::span<const Quote> quotes, const PrioPolicy& policy);

/// Secret adjacency and weight matrices, zero diagonal.
struct CompatGraph {
  abb::ShareMatrix m;
  abb::ShareMatrix w;
};

/// comp_check for every ordered pair (i, j) in `pairs`, batched.
abb::ShareVector comp_check(abb::Party& party, std::span<const SharedQuote> quotes,
                            std::span<const std::pair<std::size_t, std::size_t>> pairs);

/// prio for every ordered pair in `pairs`, batched.
abb::ShareVector prio(abb::Party& party, const PrioPolicy& policy,
                      std::span<const SharedQuote> quotes,
                      std::span<const std::pair<std::size_t, std::size_t>> pairs);

CompatGraph build_graph(abb::Party& party, std::span<const SharedQuote> quotes,
                        const PrioPolicy& policy);

}  // namespace kep::compat
