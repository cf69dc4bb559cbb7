#pragma once

#include <random>

#include <vector>

#include "kep/abb/party.hpp"
#include "kep/compat/compat.hpp"
#include "kep/compat/quote.hpp"
#include "kep/oracle/oracle.hpp"

namespace kep::testing {

/// Random directed graph: each ordered pair is an edge with probability
/// `density`, weights uniform in [1, max_weight].
oracle::PlainGraph random_graph(std::mt19937_64& rng, std::size_t n, double density,
                                oracle::Weight max_weight = 1);

/// Quote with uniform blood types and each antigen/antibody present with the
/// given probabilities. Attributes are uniform over small ranges.
compat::Quote random_quote(std::mt19937_64& rng, std::size_t antigens, double antigen_p = 0.1,
                           double antibody_p = 0.1);

/// Peer 0 deals every quote; the others receive shares.
std::vector<compat::SharedQuote> share_quotes(abb::Party& party,
                                              const std::vector<compat::Quote>& quotes,
                                              std::size_t antigens);

/// Peer 0 deals the adjacency and weight matrices of `g`.
compat::CompatGraph share_graph(abb::Party& party, const oracle::PlainGraph& g);

}  // namespace kep::testing
