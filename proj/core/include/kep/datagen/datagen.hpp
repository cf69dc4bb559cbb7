#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "kep/abb/prg.hpp"
#include "kep/compat/quote.hpp"

namespace kep::datagen {

/// Patients whose cpra falls in [lo, hi], drawn with relative `weight`.
struct CpraBand {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;
  double weight = 0;
};

/// Synthetic population. Defaults use US ABO frequencies and a sensitization
/// mix typical of exchange registries; they are not fitted to registry data.
struct PopulationModel {
  /// O, A, B, AB.
  std::array<double, 4> blood = {0.44, 0.42, 0.10, 0.04};
  std::size_t antigens = compat::kDefaultAntigens;
  /// Probability that a donor carries a given antigen.
  double antigen_frequency = 0.12;
  std::vector<CpraBand> cpra_bands = {{0, 0, 0.30}, {1, 79, 0.40}, {80, 94, 0.15}, {95, 100, 0.15}};
  double pediatric = 0.05;
  double prior_living_donor = 0.02;
  std::uint32_t regions = 11;
  /// Only keep pairs whose own donor cannot give to their patient.
  bool require_incompatible = true;
  std::size_t max_attempts = 100000;

  void validate() const;
};

/// Number of antibodies that makes a random donor incompatible with
/// probability cpra / 100 under the model's antigen frequency.
std::size_t antibody_count(const PopulationModel& model, std::uint32_t cpra);

/// Draws one pair from the model using `prg`.
compat::Quote sample_pair(const PopulationModel& model, abb::Prg& prg);

/// Endless seeded sequence of pairs; gen_pairs(n) is its first n draws.
class PairStream {
 public:
  PairStream(PopulationModel model, std::uint64_t seed);

  compat::Quote next();

 private:
  PopulationModel model_;
  abb::Prg prg_;
};

/// Deterministic under `seed`.
std::vector<compat::Quote> gen_pairs(std::size_t n, const PopulationModel& model,
                                     std::uint64_t seed);

/// Uniform double in [0, 1) from 53 bits of the stream.
double uniform01(abb::Prg& prg);

}  // namespace kep::datagen
