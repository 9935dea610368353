#include "relbc/oracle.hpp"

#include "relbc/errors.hpp"

namespace relbc {

Rational OutcomeDistribution::probability(int slot) const {
  if (total == 0) throw Error("distribution: empty");
  return Rational(static_cast<std::int64_t>(counts.at(static_cast<std::size_t>(slot))),
                  static_cast<std::int64_t>(total));
}

bool OutcomeDistribution::same_distribution(const OutcomeDistribution& o) const {
  for (int slot = 0; slot < 4; ++slot) {
    if (probability(slot) != o.probability(slot)) return false;
  }
  return true;
}

namespace {

constexpr std::uint64_t kTupleBound = 1ull << 28;

// Verdict slot from the raw unveil conditions; deliberately re-derived here
// rather than calling the engine's classifier.
int symmetric_slot(std::uint32_t lambda0, std::uint32_t lambda1, std::uint32_t zeta0, std::uint32_t zeta1) {
  bool eq0 = lambda0 == zeta0;
  bool eq1 = lambda1 == zeta1;
  if (eq0 && eq1) return 2;
  if (eq0) return 0;
  if (eq1) return 1;
  return 3;
}

int subordinate_slot(std::uint32_t key, std::uint32_t commitment, std::uint32_t n0, std::uint32_t n1) {
  std::uint32_t recovered = key ^ commitment;
  bool eq0 = recovered == n0;
  bool eq1 = recovered == n1;
  if (eq0 && eq1) return 2;
  if (eq0) return 0;
  if (eq1) return 1;
  return 3;
}

}  // namespace

OutcomeDistribution exhaustive_oracle(ProtocolVariant variant, const AdversarySpec& strategy, int honest_b,
                                      std::uint32_t l) {
  if (l < 1) throw ConfigError("oracle: l must be >= 1");
  if (honest_b != 0 && honest_b != 1) throw ConfigError("oracle: honest_b must be 0 or 1");
  strategy.validate();
  if (l > 14) throw TooLarge("oracle: 2^l value space too large to enumerate");

  const std::uint64_t space = 1ull << l;
  const std::uint64_t pairs = space * (space - 1);
  const bool symmetric = variant == ProtocolVariant::Symmetric;
  const bool diff_key = strategy.kind == StrategyKind::AliceDifferentKeys;
  const bool diff_bit = strategy.kind == StrategyKind::AliceDifferentBit;
  if (diff_bit && !symmetric) {
    throw ConfigError("oracle: alice-diff-bit is undefined for the subordinate variant");
  }

  std::uint64_t tuples = diff_key ? pairs : space;
  if (tuples > kTupleBound / pairs) throw TooLarge("oracle: tuple space too large");
  tuples *= pairs;  // n pairs
  if (symmetric) {
    if (tuples > kTupleBound / pairs) throw TooLarge("oracle: tuple space too large");
    tuples *= pairs;  // m pairs
  }
  if (tuples > kTupleBound) throw TooLarge("oracle: tuple space too large");

  const int b1 = diff_bit ? strategy.b1 : honest_b;
  const int b2 = diff_bit ? strategy.b2 : honest_b;

  OutcomeDistribution dist;
  const std::uint32_t n_values = static_cast<std::uint32_t>(space);

  for (std::uint32_t eta1 = 0; eta1 < n_values; ++eta1) {
    for (std::uint32_t eta2 = 0; eta2 < n_values; ++eta2) {
      if (diff_key) {
        if (eta1 == eta2) continue;
      } else if (eta2 != eta1) {
        continue;  // shared key: diagonal only
      }
      for (std::uint32_t n0 = 0; n0 < n_values; ++n0) {
        for (std::uint32_t n1 = 0; n1 < n_values; ++n1) {
          if (n1 == n0) continue;
          std::uint32_t commitment_n = eta1 ^ (b1 == 0 ? n0 : n1);
          if (!symmetric) {
            ++dist.counts[static_cast<std::size_t>(subordinate_slot(eta2, commitment_n, n0, n1))];
            ++dist.total;
            continue;
          }
          std::uint32_t lambda0 = commitment_n ^ n0;
          std::uint32_t lambda1 = commitment_n ^ n1;
          for (std::uint32_t m0 = 0; m0 < n_values; ++m0) {
            for (std::uint32_t m1 = 0; m1 < n_values; ++m1) {
              if (m1 == m0) continue;
              std::uint32_t commitment_m = eta2 ^ (b2 == 0 ? m0 : m1);
              int slot = symmetric_slot(lambda0, lambda1, commitment_m ^ m0, commitment_m ^ m1);
              ++dist.counts[static_cast<std::size_t>(slot)];
              ++dist.total;
            }
          }
        }
      }
    }
  }
  return dist;
}

}  // namespace relbc
