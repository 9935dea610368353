#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "relbc/adversary.hpp"
#include "relbc/bitchain.hpp"
#include "relbc/spacetime.hpp"

namespace relbc {

enum class ProtocolVariant : std::uint8_t {
  Symmetric,    // both sender stations commit independently
  Subordinate,  // the second sender station only relays the key
};

std::string_view variant_name(ProtocolVariant variant);
std::optional<ProtocolVariant> parse_variant(std::string_view name);

enum class OutcomeKind : std::uint8_t { Revealed, Ambiguous, CheatDetected };

/// Verdict of the unveil phase. Revealed carries the unveiled bit;
/// Ambiguous is the chance event where both bits satisfy the unveil
/// equality; CheatDetected is the case where neither does.
class UnveilOutcome {
 public:
  static UnveilOutcome revealed(int bit);
  static UnveilOutcome ambiguous() { return UnveilOutcome(OutcomeKind::Ambiguous, -1); }
  static UnveilOutcome cheat_detected() { return UnveilOutcome(OutcomeKind::CheatDetected, -1); }

  OutcomeKind kind() const { return kind_; }
  bool is_revealed() const { return kind_ == OutcomeKind::Revealed; }
  int bit() const;  // valid only for Revealed

  /// Tally slot: revealed(0) -> 0, revealed(1) -> 1, ambiguous -> 2,
  /// cheat-detected -> 3.
  int slot() const;
  static constexpr std::array<std::string_view, 4> kSlotNames{"revealed0", "revealed1", "ambiguous",
                                                              "cheat_detected"};

  std::string to_string() const;  // "revealed(0)", "ambiguous", "cheat-detected"

  bool operator==(const UnveilOutcome& o) const { return kind_ == o.kind_ && bit_ == o.bit_; }
  bool operator!=(const UnveilOutcome& o) const { return !(*this == o); }

 private:
  UnveilOutcome(OutcomeKind kind, int bit) : kind_(kind), bit_(bit) {}
  OutcomeKind kind_;
  int bit_;
};

/// key XOR challenge[b] — the one-time-pad encryption the sender returns.
BitChain commit_response(const BitChain& eta, int b, const ChainPair& challenge);

/// (commitment XOR challenge[0], commitment XOR challenge[1]) —  what each
/// receiver station forwards to the far side.
ChainPair derive_cross(const BitChain& commitment, const ChainPair& challenge);

/// Revealed(b) iff lambda[b] == zeta[b] and lambda[1-b] != zeta[1-b];
/// Ambiguous when both indices agree, CheatDetected when neither does.
UnveilOutcome unveil_verdict(const ChainPair& lambda_pair, const ChainPair& zeta_pair);

/// Subordinate unveil: Revealed(b) for the unique b with
/// challenge[b] == eta XOR commitment; CheatDetected when no b matches.
/// Challenge distinctness makes Ambiguous impossible here.
UnveilOutcome subordinate_unveil(const BitChain& eta, const BitChain& commitment, const ChainPair& challenge);

/// Test-only corruption of the verdict path; used as a negative control to
/// prove the statistical harness catches a broken engine.
enum class FaultInjection : std::uint8_t { None, FlipAmbiguousVerdict };

/// Explicit protocol inputs for full-space enumeration; bypasses the RNG.
struct ForcedChains {
  BitChain eta;
  std::optional<BitChain> eta2;  // AliceDifferentKeys second key
  ChainPair n_pair;
  std::optional<ChainPair> m_pair;  // absent for the subordinate variant
};

struct RunSpec {
  ProtocolVariant variant = ProtocolVariant::Symmetric;
  int honest_b = 0;
  Geometry geometry{};
  std::uint32_t l = 16;
  std::uint64_t seed = 1;
  AdversarySpec adversary{};
  Rational delta{0};  // commit deadline; 0 is the idealized regime
  std::array<Rational, 5> processing_delays{};
  std::optional<ForcedChains> forced;
  FaultInjection fault = FaultInjection::None;
  const AdversaryExtension* extension = nullptr;
};

struct RunResult {
  Transcript transcript;
  std::optional<UnveilOutcome> verdict_b1;
  std::optional<UnveilOutcome> verdict_b2;  // absent in the subordinate variant
  std::optional<int> intercept_bit;         // B3's early determination, when placed

  /// B1's verdict; present after every completed run.
  const UnveilOutcome& final_verdict() const;
};

/// Orchestrates one full commit/unveil run through the event scheduler and
/// returns the transcript together with the station verdicts.
RunResult run_protocol(const RunSpec& spec);

}  // namespace relbc
