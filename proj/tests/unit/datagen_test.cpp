#include <gtest/gtest.h>

#include <cmath>

#include "kep/compat/compat.hpp"
#include "kep/datagen/datagen.hpp"
#include "kep/error.hpp"

using namespace kep;
using namespace kep::datagen;

namespace {

int patient_type(const compat::Quote& q) {
  for (int t = 0; t < 4; ++t)
    if (q.patient_accepts == compat::accepted_donors(static_cast<compat::BloodType>(t))) return t;
  return -1;
}

int donor_type(const compat::Quote& q) {
  for (int t = 0; t < 4; ++t)
    if (q.donor_blood[t]) return t;
  return -1;
}

}  // namespace

TEST(GenPairs, SameSeedSameOutput) {
  PopulationModel m;
  EXPECT_EQ(gen_pairs(200, m, 11), gen_pairs(200, m, 11));
  EXPECT_NE(gen_pairs(200, m, 11), gen_pairs(200, m, 12));
}

TEST(GenPairs, PrefixOfStream) {
  PopulationModel m;
  const auto long_run = gen_pairs(50, m, 3);
  const auto short_run = gen_pairs(20, m, 3);
  EXPECT_TRUE(std::equal(short_run.begin(), short_run.end(), long_run.begin()));
}

TEST(GenPairs, QuotesAreValidAndInternallyIncompatible) {
  PopulationModel m;
  for (const auto& q : gen_pairs(2000, m, 5)) {
    EXPECT_NO_THROW(compat::validate(q, m.antigens));
    EXPECT_FALSE(compat::compatible(q, q));
    EXPECT_LE(q.cpra, 100u);
    EXPECT_LT(q.prio.region, m.regions);
  }
}

TEST(GenPairs, BloodFrequenciesOfTheSamplingModel) {
  // Checked on raw draws; keeping only incompatible pairs shifts the mix
  // toward type O patients.
  PopulationModel m;
  m.require_incompatible = false;
  const std::size_t n = 10000;
  const auto quotes = gen_pairs(n, m, 21);
  std::array<double, 4> donors{}, patients{};
  for (const auto& q : quotes) {
    donors[donor_type(q)] += 1.0 / n;
    patients[patient_type(q)] += 1.0 / n;
  }
  for (int t = 0; t < 4; ++t) {
    EXPECT_NEAR(donors[t], m.blood[t], 0.03) << "donor type " << t;
    EXPECT_NEAR(patients[t], m.blood[t], 0.03) << "patient type " << t;
  }
}

TEST(GenPairs, UnsensitizedTypeOPoolIsNearlyComplete) {
  PopulationModel m;
  m.blood = {1, 0, 0, 0};
  m.cpra_bands = {{0, 0, 1.0}};
  m.require_incompatible = false;
  const auto quotes = gen_pairs(30, m, 1);
  const auto g = compat::plain_graph(quotes, compat::PrioPolicy::constant_one());
  const double density = static_cast<double>(g.edge_count()) / (30.0 * 29.0);
  EXPECT_GT(density, 0.9);
}

TEST(GenPairs, FullySensitizedPoolHasNoEdges) {
  PopulationModel m;
  m.cpra_bands = {{100, 100, 1.0}};
  const auto quotes = gen_pairs(40, m, 2);
  for (const auto& q : quotes)
    for (auto a : q.patient_antibodies) EXPECT_EQ(a, 1);
  EXPECT_EQ(compat::plain_graph(quotes, compat::PrioPolicy::constant_one()).edge_count(), 0u);
}

TEST(GenPairs, ImpossibleIncompatibilityThrows) {
  PopulationModel m;
  m.blood = {1, 0, 0, 0};
  m.cpra_bands = {{0, 0, 1.0}};
  m.max_attempts = 50;
  EXPECT_THROW(gen_pairs(1, m, 1), InvalidArgument);
}

TEST(AntibodyCount, MatchesRejectionProbability) {
  PopulationModel m;
  EXPECT_EQ(antibody_count(m, 0), 0u);
  EXPECT_EQ(antibody_count(m, 100), m.antigens);
  for (std::uint32_t cpra : {10u, 50u, 80u, 95u}) {
    const auto k = antibody_count(m, cpra);
    const double reject = 1 - std::pow(1 - m.antigen_frequency, static_cast<double>(k));
    // Rounding k moves the probability by at most one antigen's worth.
    const double step = m.antigen_frequency * std::pow(1 - m.antigen_frequency, k - 1.0);
    EXPECT_NEAR(reject, cpra / 100.0, step) << cpra;
  }
}

TEST(PopulationModel, Validation) {
  PopulationModel m;
  EXPECT_NO_THROW(m.validate());
  m.blood = {0.5, 0.5, 0.5, 0};
  EXPECT_THROW(m.validate(), InvalidArgument);
  m = {};
  m.cpra_bands = {{90, 80, 1.0}};
  EXPECT_THROW(m.validate(), InvalidArgument);
  m = {};
  m.antigen_frequency = 1.5;
  EXPECT_THROW(m.validate(), InvalidArgument);
  m = {};
  m.regions = 0;
  EXPECT_THROW(m.validate(), InvalidArgument);
}
