#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "relbc/bitchain.hpp"
#include "relbc/rational.hpp"
#include "relbc/spacetime.hpp"

namespace relbc {

/// The cheating catalogue: the sender can split her committed bit or her
/// key across the two stations, and the receiver can plant an interception
/// station between his two endpoints. Everything else the stations could
/// try reduces to one of these or to honest play.
enum class StrategyKind : std::uint8_t {
  Honest,
  AliceDifferentBit,
  AliceDifferentKeys,
  BobMidpointStation,
};

std::string_view strategy_kind_name(StrategyKind kind);

struct AdversarySpec {
  StrategyKind kind = StrategyKind::Honest;

  // AliceDifferentBit: per-station committed bits, b1 != b2.
  int b1 = 0;
  int b2 = 1;

  // AliceDifferentKeys: explicit key pair; when absent the run draws a
  // uniformly random distinct pair from its key substream.
  std::optional<ChainPair> keys;

  // BobMidpointStation: interception position in meters; absent = midpoint d/2.
  std::optional<Rational> b3_position;

  /// "honest" | "alice-diff-bit:0,1" | "alice-diff-key" | "bob-b3:mid" | "bob-b3:<meters>"
  static AdversarySpec parse(std::string_view text);
  std::string to_string() const;
  void validate() const;

  bool operator==(const AdversarySpec& o) const;
  bool operator!=(const AdversarySpec& o) const { return !(*this == o); }
};

/// Resolved per-run sender behaviour: the bit and key each Alice station
/// actually uses at commit time.
struct AliceProgram {
  BitChain eta_a1;
  BitChain eta_a2;
  int b_a1 = 0;
  int b_a2 = 0;

  const BitChain& eta(StationId station) const;
  int bit(StationId station) const;
};

/// Instantiates the strategy for one run. For AliceDifferentKeys the pair
/// comes from spec.keys, then the forced values, then key_rng (which must
/// be non-null only in that fallback case).
AliceProgram resolve_alice_program(const AdversarySpec& spec, int honest_b, std::uint32_t l,
                                   const std::optional<BitChain>& forced_eta,
                                   const std::optional<BitChain>& forced_eta2, RngStream* key_rng);

/// Commitment chain the given sender station emits for `challenge`.
BitChain apply_alice_strategy(const AliceProgram& program, StationId station, const ChainPair& challenge);

/// Extension point for strategies beyond the built-in catalogue: override
/// the commitment a sender station would emit.
class AdversaryExtension {
 public:
  virtual ~AdversaryExtension() = default;
  virtual BitChain commitment(StationId station, const ChainPair& challenge,
                              const AliceProgram& honest_program) const = 0;
};

/// What the interception station concludes from the two cross pairs: the
/// unique index where they agree, or nothing when zero or both agree.
std::optional<int> b3_intercept(const ChainPair& lambda_pair, const ChainPair& zeta_pair);

/// Everything one observer (or observer set) holds at some instant,
/// bucketed by protocol role.
struct KnowledgeView {
  std::optional<ChainPair> n_pair;       // B1-side challenge
  std::optional<ChainPair> m_pair;       // B2-side challenge
  std::optional<ChainPair> lambda_pair;  // cross pair computed on the B1 side
  std::optional<ChainPair> zeta_pair;    // cross pair computed on the B2 side
  std::optional<BitChain> commitment_n;  // N, received at B1
  std::optional<BitChain> commitment_m;  // M, received at B2
  std::optional<BitChain> key;           // the encryption key, where delivered

  /// Adds the payload of a Local or Receive transcript event to the view.
  void ingest(const TranscriptEvent& ev);
};

struct ConsistentBits {
  bool b0 = false;
  bool b1 = false;
  int count() const { return (b0 ? 1 : 0) + (b1 ? 1 : 0); }
};

/// Which committed bits admit an assignment of the unknown chains that is
/// consistent with the view under honest protocol semantics. A view where
/// both bits remain feasible carries no information about the commitment.
ConsistentBits consistent_commit_bits(const KnowledgeView& view);

/// determined(b) iff exactly one bit is consistent with the view.
std::optional<int> single_station_decidability(const KnowledgeView& view);

}  // namespace relbc
