#include "kep/datagen/datagen.hpp"

#include <cmath>
#include <numeric>

#include "kep/compat/compat.hpp"
#include "kep/error.hpp"

namespace kep::datagen {

namespace {

constexpr std::uint64_t kPairLabel = 0x7061697273000000ull;

bool probability(double p) { return p >= 0 && p <= 1; }

std::size_t pick(abb::Prg& prg, const double* weights, std::size_t count) {
  double total = 0;
  for (std::size_t i = 0; i < count; ++i) total += weights[i];
  double u = uniform01(prg) * total;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return count - 1;
}

std::uint32_t between(abb::Prg& prg, std::uint32_t lo, std::uint32_t hi) {
  return lo + static_cast<std::uint32_t>(prg.uniform(std::uint64_t{hi} - lo + 1));
}

}  // namespace

double uniform01(abb::Prg& prg) { return static_cast<double>(prg.next() >> 11) * 0x1p-53; }

void PopulationModel::validate() const {
  double sum = 0;
  for (double p : blood) {
    if (!probability(p)) throw InvalidArgument("blood type frequencies must lie in [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1) > 1e-9) throw InvalidArgument("blood type frequencies must sum to 1");
  if (antigens == 0) throw InvalidArgument("antigen space must be non-empty");
  if (!probability(antigen_frequency) || antigen_frequency >= 1)
    throw InvalidArgument("antigen frequency must lie in [0, 1)");
  if (cpra_bands.empty()) throw InvalidArgument("at least one cpra band is required");
  sum = 0;
  for (const auto& b : cpra_bands) {
    if (b.lo > b.hi || b.hi > 100) throw InvalidArgument("cpra band must satisfy lo <= hi <= 100");
    if (b.weight < 0) throw InvalidArgument("cpra band weights must be non-negative");
    sum += b.weight;
  }
  if (std::abs(sum - 1) > 1e-9) throw InvalidArgument("cpra band weights must sum to 1");
  if (!probability(pediatric) || !probability(prior_living_donor))
    throw InvalidArgument("flag probabilities must lie in [0, 1]");
  if (regions == 0) throw InvalidArgument("at least one region is required");
  if (max_attempts == 0) throw InvalidArgument("max attempts must be positive");
}

std::size_t antibody_count(const PopulationModel& model, std::uint32_t cpra) {
  if (cpra == 0 || model.antigen_frequency <= 0) return 0;
  if (cpra >= 100) return model.antigens;
  // (1 - f)^k = 1 - cpra / 100.
  const double k = std::log1p(-(cpra / 100.0)) / std::log1p(-model.antigen_frequency);
  return std::min(model.antigens, static_cast<std::size_t>(std::lround(k)));
}

compat::Quote sample_pair(const PopulationModel& model, abb::Prg& prg) {
  compat::Quote q;
  const auto donor = static_cast<compat::BloodType>(pick(prg, model.blood.data(), 4));
  const auto patient = static_cast<compat::BloodType>(pick(prg, model.blood.data(), 4));
  q.donor_blood = compat::one_hot(donor);
  q.patient_accepts = compat::accepted_donors(patient);

  q.donor_antigens.resize(model.antigens);
  for (auto& a : q.donor_antigens) a = uniform01(prg) < model.antigen_frequency;

  std::vector<double> weights;
  for (const auto& b : model.cpra_bands) weights.push_back(b.weight);
  const auto& band = model.cpra_bands[pick(prg, weights.data(), weights.size())];
  q.cpra = between(prg, band.lo, band.hi);

  // Antibodies at k distinct random positions (partial Fisher-Yates).
  std::vector<std::uint32_t> slots(model.antigens);
  std::iota(slots.begin(), slots.end(), 0u);
  const std::size_t k = antibody_count(model, q.cpra);
  q.patient_antibodies.assign(model.antigens, 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(slots[i], slots[i + prg.uniform(model.antigens - i)]);
    q.patient_antibodies[slots[i]] = 1;
  }

  q.prio.pediatric = uniform01(prg) < model.pediatric;
  q.prio.age = q.prio.pediatric ? between(prg, 1, 17) : between(prg, 18, 75);
  q.prio.donor_age = between(prg, 18, 70);
  q.prio.prior_living_donor = uniform01(prg) < model.prior_living_donor;
  q.prio.region = between(prg, 0, model.regions - 1);
  return q;
}

PairStream::PairStream(PopulationModel model, std::uint64_t seed)
    : model_(std::move(model)), prg_(abb::Prg::derive_key(seed, kPairLabel), 0) {
  model_.validate();
}

compat::Quote PairStream::next() {
  for (std::size_t attempts = 0; attempts < model_.max_attempts; ++attempts) {
    auto q = sample_pair(model_, prg_);
    if (!model_.require_incompatible || !compat::compatible(q, q)) return q;
  }
  throw InvalidArgument("population model yields no internally incompatible pairs");
}

std::vector<compat::Quote> gen_pairs(std::size_t n, const PopulationModel& model,
                                     std::uint64_t seed) {
  PairStream stream(model, seed);
  std::vector<compat::Quote> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(stream.next());
  return out;
}

}  // namespace kep::datagen
