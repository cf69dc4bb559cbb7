#pragma once

#include <array>
#include <span>
#include <vector>

#include "kep/abb/prg.hpp"
#include "kep/abb/share.hpp"

namespace kep::protocol {

/// Replicated sharing of `values` computed by an input client; element p is
/// the view sent to peer p.
std::array<abb::ShareVector, 3> deal(std::span<const abb::Ring> values, abb::Prg& prg);

/// Reconstructs from the three peer views, checking that the replicated
/// components agree. Throws InconsistentShares otherwise.
std::vector<abb::Ring> reconstruct(const std::array<abb::ShareVector, 3>& views,
                                   const abb::RingConfig& ring = {});

}  // namespace kep::protocol
