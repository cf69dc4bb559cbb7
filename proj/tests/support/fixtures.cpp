#include "fixtures.hpp"

#include <algorithm>

namespace kep::testing {

oracle::PlainGraph random_graph(std::mt19937_64& rng, std::size_t n, double density,
                                oracle::Weight max_weight) {
  oracle::PlainGraph g(n);
  std::bernoulli_distribution edge(density);
  std::uniform_int_distribution<oracle::Weight> weight(1, max_weight);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && edge(rng)) g.set_edge(i, j, weight(rng));
  return g;
}

compat::Quote random_quote(std::mt19937_64& rng, std::size_t antigens, double antigen_p,
                           double antibody_p) {
  std::uniform_int_distribution<int> type(0, 3);
  std::bernoulli_distribution antigen(antigen_p), antibody(antibody_p), flag(0.2);
  compat::Quote q;
  q.donor_blood = compat::one_hot(static_cast<compat::BloodType>(type(rng)));
  q.patient_accepts = compat::accepted_donors(static_cast<compat::BloodType>(type(rng)));
  for (std::size_t l = 0; l < antigens; ++l) {
    q.donor_antigens.push_back(antigen(rng));
    q.patient_antibodies.push_back(antibody(rng));
  }
  q.cpra = std::uniform_int_distribution<std::uint32_t>(0, 100)(rng);
  q.prio.age = std::uniform_int_distribution<std::uint32_t>(1, 80)(rng);
  q.prio.donor_age = std::uniform_int_distribution<std::uint32_t>(18, 75)(rng);
  q.prio.pediatric = flag(rng);
  q.prio.prior_living_donor = flag(rng);
  q.prio.region = std::uniform_int_distribution<std::uint32_t>(0, 3)(rng);
  return q;
}

std::vector<compat::SharedQuote> share_quotes(abb::Party& party,
                                              const std::vector<compat::Quote>& quotes,
                                              std::size_t antigens) {
  const std::size_t width = compat::flat_size(antigens);
  std::vector<abb::Ring> flat;
  for (const auto& q : quotes) {
    auto f = compat::flatten(q);
    flat.insert(flat.end(), f.begin(), f.end());
  }
  auto shares = party.input(0, flat, quotes.size() * width);
  std::vector<compat::SharedQuote> out;
  for (std::size_t i = 0; i < quotes.size(); ++i)
    out.push_back(compat::unflatten(std::span(shares).subspan(i * width, width), antigens));
  return out;
}

compat::CompatGraph share_graph(abb::Party& party, const oracle::PlainGraph& g) {
  const std::size_t n = g.size();
  std::vector<abb::Ring> flat(2 * n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (g.edge(i, j)) {
        flat[i * n + j] = 1;
        flat[n * n + i * n + j] = g.weight(i, j);
      }
  auto shares = party.input(0, flat, flat.size());
  compat::CompatGraph out{abb::ShareMatrix(n, n), abb::ShareMatrix(n, n)};
  std::copy_n(shares.begin(), n * n, out.m.data().begin());
  std::copy_n(shares.begin() + n * n, n * n, out.w.data().begin());
  return out;
}

}  // namespace kep::testing
