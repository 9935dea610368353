#pragma once

#include <array>
#include <cstdint>

#include "relbc/adversary.hpp"
#include "relbc/protocol.hpp"
#include "relbc/rational.hpp"

namespace relbc {

/// Exact verdict tallies over a finite input space. Slots follow
/// UnveilOutcome::slot(): revealed0, revealed1, ambiguous, cheat_detected.
struct OutcomeDistribution {
  std::array<std::uint64_t, 4> counts{};
  std::uint64_t total = 0;

  Rational probability(int slot) const;
  /// Per-slot exact probability equality.
  bool same_distribution(const OutcomeDistribution& o) const;
};

/// Brute-force enumeration of the unveil conditions over ALL input tuples
/// (keys x distinct challenge pairs), reimplemented on raw integers with no
/// code shared with the protocol engine. Throws TooLarge when the tuple
/// space exceeds ~2^28.
OutcomeDistribution exhaustive_oracle(ProtocolVariant variant, const AdversarySpec& strategy, int honest_b,
                                      std::uint32_t l);

}  // namespace relbc
