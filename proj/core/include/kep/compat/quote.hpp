#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kep/abb/share.hpp"

namespace kep::compat {

inline constexpr std::size_t kDefaultAntigens = 50;

/// ABO blood types, in indicator-vector order.
enum class BloodType : std::uint8_t { kO = 0, kA = 1, kB = 2, kAB = 3 };

std::string to_string(BloodType t);
BloodType parse_blood_type(const std::string& text);

using BloodVector = std::array<std::uint8_t, 4>;

BloodVector one_hot(BloodType t);
/// Donor types a patient of type `t` can receive (ABO rule).
BloodVector accepted_donors(BloodType t);

struct PrioAttrs {
  std::uint32_t age = 0;
  std::uint32_t pediatric = 0;
  std::uint32_t prior_living_donor = 0;
  std::uint32_t region = 0;
  std::uint32_t donor_age = 0;

  friend bool operator==(const PrioAttrs&, const PrioAttrs&) = default;
};

/// Private record of one patient-donor pair.
struct Quote {
  BloodVector donor_blood{};
  BloodVector patient_accepts{};
  std::vector<std::uint8_t> donor_antigens;
  std::vector<std::uint8_t> patient_antibodies;
  std::uint32_t cpra = 0;
  PrioAttrs prio;

  friend bool operator==(const Quote&, const Quote&) = default;
};

/// Throws InvalidArgument describing the first broken invariant.
void validate(const Quote& q, std::size_t antigens);

/// Ring elements of a quote in sharing order: donor blood (4), accepts (4),
/// antigens (L), antibodies (L), cpra, then the five priority attributes.
std::size_t flat_size(std::size_t antigens);
std::vector<abb::Ring> flatten(const Quote& q);

/// One peer's shares of a quote, laid out like flatten().
struct SharedQuote {
  abb::ShareVector donor_blood;
  abb::ShareVector patient_accepts;
  abb::ShareVector donor_antigens;
  abb::ShareVector patient_antibodies;
  abb::Share cpra;
  abb::Share age;
  abb::Share pediatric;
  abb::Share prior_living_donor;
  abb::Share region;
  abb::Share donor_age;
};

SharedQuote unflatten(std::span<const abb::Share> flat, std::size_t antigens);

/// Quote files are JSON Lines: a header object
/// {"schema": "kep-quotes", "version": 1, "antigens": L}
/// followed by one quote object per line.
struct QuoteFile {
  std::size_t antigens = kDefaultAntigens;
  std::vector<Quote> quotes;
};

QuoteFile read_quotes(std::istream& in);
void write_quotes(std::ostream& out, const QuoteFile& file);

}  // namespace kep::compat
