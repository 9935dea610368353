#include "relbc/protocol.hpp"

#include <utility>

#include "relbc/errors.hpp"

namespace relbc {

std::string_view variant_name(ProtocolVariant variant) {
  return variant == ProtocolVariant::Symmetric ? "symmetric" : "subordinate";
}

std::optional<ProtocolVariant> parse_variant(std::string_view name) {
  if (name == "symmetric") return ProtocolVariant::Symmetric;
  if (name == "subordinate") return ProtocolVariant::Subordinate;
  return std::nullopt;
}

UnveilOutcome UnveilOutcome::revealed(int bit) {
  if (bit != 0 && bit != 1) throw Error("unveil outcome: revealed bit must be 0 or 1");
  return UnveilOutcome(OutcomeKind::Revealed, bit);
}

int UnveilOutcome::bit() const {
  if (kind_ != OutcomeKind::Revealed) throw Error("unveil outcome: bit() on non-revealed verdict");
  return bit_;
}

int UnveilOutcome::slot() const {
  switch (kind_) {
    case OutcomeKind::Revealed: return bit_;
    case OutcomeKind::Ambiguous: return 2;
    case OutcomeKind::CheatDetected: return 3;
  }
  return 3;
}

std::string UnveilOutcome::to_string() const {
  switch (kind_) {
    case OutcomeKind::Revealed: return bit_ == 0 ? "revealed(0)" : "revealed(1)";
    case OutcomeKind::Ambiguous: return "ambiguous";
    case OutcomeKind::CheatDetected: return "cheat-detected";
  }
  return "?";
}

BitChain commit_response(const BitChain& eta, int b, const ChainPair& challenge) {
  if (b != 0 && b != 1) throw Error("commit_response: b must be 0 or 1");
  return eta ^ (b == 0 ? challenge.first : challenge.second);
}

ChainPair derive_cross(const BitChain& commitment, const ChainPair& challenge) {
  return {commitment ^ challenge.first, commitment ^ challenge.second};
}

UnveilOutcome unveil_verdict(const ChainPair& lambda_pair, const ChainPair& zeta_pair) {
  bool eq0 = lambda_pair.first == zeta_pair.first;
  bool eq1 = lambda_pair.second == zeta_pair.second;
  if (eq0 && eq1) return UnveilOutcome::ambiguous();
  if (eq0) return UnveilOutcome::revealed(0);
  if (eq1) return UnveilOutcome::revealed(1);
  return UnveilOutcome::cheat_detected();
}

UnveilOutcome subordinate_unveil(const BitChain& eta, const BitChain& commitment, const ChainPair& challenge) {
  BitChain recovered = eta ^ commitment;
  bool match0 = recovered == challenge.first;
  bool match1 = recovered == challenge.second;
  if (match0 && match1) return UnveilOutcome::ambiguous();  // unreachable for distinct challenges
  if (match0) return UnveilOutcome::revealed(0);
  if (match1) return UnveilOutcome::revealed(1);
  return UnveilOutcome::cheat_detected();
}

const UnveilOutcome& RunResult::final_verdict() const {
  if (!verdict_b1) throw Error("run result: no verdict recorded");
  return *verdict_b1;
}

namespace {

UnveilOutcome apply_fault(UnveilOutcome verdict, FaultInjection fault) {
  if (fault == FaultInjection::FlipAmbiguousVerdict && verdict.kind() == OutcomeKind::Ambiguous) {
    return UnveilOutcome::revealed(0);
  }
  return verdict;
}

// Per-run state of one receiver endpoint (B1 or B2).
struct BobEndpoint {
  StationId self;
  StationId far;
  ChainPair challenge;
  std::optional<BitChain> commitment;
  std::optional<ChainPair> own_cross;
  std::optional<ChainPair> received_cross;
  std::optional<UnveilOutcome> verdict;
};

// Per-run state of the interception station.
struct MidpointState {
  std::optional<ChainPair> lambda_pair;
  std::optional<ChainPair> zeta_pair;
  // subordinate variant: echoed B1 view plus the relayed key
  std::optional<ChainPair> n_pair;
  std::optional<BitChain> commitment;
  std::optional<BitChain> key;
  std::optional<int> determined;
};

void validate_spec(const RunSpec& spec) {
  if (spec.l < 1) throw ConfigError("run: bit-chain length l must be >= 1");
  if (spec.honest_b != 0 && spec.honest_b != 1) throw ConfigError("run: committed bit must be 0 or 1");
  spec.adversary.validate();
  if (spec.variant == ProtocolVariant::Subordinate && spec.adversary.kind == StrategyKind::AliceDifferentBit) {
    throw ConfigError("run: alice-diff-bit is undefined for the subordinate variant (only one station commits)");
  }
  if (spec.delta < Rational(0)) throw ConfigError("run: commit deadline delta must be non-negative");
  Rational light_time = spec.geometry.separation() / spec.geometry.signal_speed();
  if (!(spec.delta * Rational(10) < light_time)) {
    throw ConfigError("run: delta must satisfy delta < d/(10c); got delta=" + spec.delta.to_fraction_string() +
                      " with d/c=" + light_time.to_fraction_string());
  }
  if (spec.forced) {
    const ForcedChains& f = *spec.forced;
    if (f.eta.length() != spec.l || f.n_pair.first.length() != spec.l || f.n_pair.second.length() != spec.l) {
      throw ConfigError("run: forced chains must have length l");
    }
    if (f.n_pair.first == f.n_pair.second) throw ConfigError("run: forced challenge pair must be distinct");
    if (spec.variant == ProtocolVariant::Symmetric) {
      if (!f.m_pair) throw ConfigError("run: symmetric variant needs a forced m pair");
      if (f.m_pair->first == f.m_pair->second) throw ConfigError("run: forced challenge pair must be distinct");
    }
  }
}

}  // namespace

RunResult run_protocol(const RunSpec& spec) {
  validate_spec(spec);
  const std::uint32_t l = spec.l;

  Geometry geometry = spec.geometry;
  const bool b3_active = spec.adversary.kind == StrategyKind::BobMidpointStation;
  if (b3_active && !geometry.has(StationId::B3)) {
    Rational midpoint = geometry.separation() / Rational(2);
    geometry.place_b3(spec.adversary.b3_position.value_or(midpoint));
  }

  // Draw (or adopt) all random inputs before the clock starts.
  std::optional<BitChain> forced_eta, forced_eta2;
  ChainPair n_pair;
  std::optional<ChainPair> m_pair;
  if (spec.forced) {
    forced_eta = spec.forced->eta;
    forced_eta2 = spec.forced->eta2;
    n_pair = spec.forced->n_pair;
    m_pair = spec.forced->m_pair;
  } else {
    RngStream root(spec.seed);
    RngStream b1_rng = root.substream(rng_tag::kB1Challenge);
    auto n = BitChain::random_distinct(2, l, b1_rng);
    n_pair = {std::move(n[0]), std::move(n[1])};
    if (spec.variant == ProtocolVariant::Symmetric) {
      RngStream b2_rng = root.substream(rng_tag::kB2Challenge);
      auto m = BitChain::random_distinct(2, l, b2_rng);
      m_pair = ChainPair{std::move(m[0]), std::move(m[1])};
    }
    RngStream alice_rng = root.substream(rng_tag::kAliceKey);
    forced_eta = BitChain::random(l, alice_rng);
  }
  std::optional<RngStream> alt_key_rng;
  if (spec.adversary.kind == StrategyKind::AliceDifferentKeys && !spec.adversary.keys && !forced_eta2) {
    alt_key_rng.emplace(RngStream(spec.seed).substream(rng_tag::kAliceAltKeys));
  }
  AliceProgram program = resolve_alice_program(spec.adversary, spec.honest_b, l, forced_eta, forced_eta2,
                                               alt_key_rng ? &*alt_key_rng : nullptr);

  Scheduler scheduler(geometry);
  for (std::size_t i = 0; i < spec.processing_delays.size(); ++i) {
    scheduler.set_processing_delay(static_cast<StationId>(i), spec.processing_delays[i]);
  }

  BobEndpoint b1{StationId::B1, StationId::B2, n_pair, {}, {}, {}, {}};
  BobEndpoint b2{StationId::B2, StationId::B1, m_pair ? *m_pair : ChainPair{}, {}, {}, {}, {}};
  MidpointState b3;

  const Rational delta = spec.delta;
  const ProtocolVariant variant = spec.variant;
  const FaultInjection fault = spec.fault;

  // --- sender stations -------------------------------------------------
  auto alice_handler = [&](const TranscriptEvent& ev, Scheduler& sched) {
    if (ev.step != StepTag::ChallengeIssue) return;
    ChainPair challenge{ev.payload.at(0), ev.payload.at(1)};
    BitChain commitment = spec.extension
                              ? spec.extension->commitment(ev.station, challenge, program)
                              : apply_alice_strategy(program, ev.station, challenge);
    Rational ready = sched.now() + sched.processing_delay(ev.station);
    Rational send_time = ready < delta ? delta : ready;
    StationId receiver = ev.station == StationId::A1 ? StationId::B1 : StationId::B2;
    sched.post_message(ev.station, receiver, std::move(send_time), StepTag::CommitResponse,
                       {std::move(commitment)});
  };
  scheduler.on_receive(StationId::A1, alice_handler);
  scheduler.on_receive(StationId::A2, alice_handler);

  // --- receiver endpoints ----------------------------------------------
  auto endpoint_handler = [&](BobEndpoint& me) {
    return [&](const TranscriptEvent& ev, Scheduler& sched) {
      Rational ready = sched.now() + sched.processing_delay(me.self);
      switch (ev.step) {
        case StepTag::CommitResponse: {
          me.commitment = ev.payload.at(0);
          if (variant == ProtocolVariant::Symmetric) {
            me.own_cross = derive_cross(*me.commitment, me.challenge);
            sched.post_message(me.self, me.far, ready, StepTag::CrossPair,
                               {me.own_cross->first, me.own_cross->second});
            if (b3_active) {
              sched.post_message(me.self, StationId::B3, ready, StepTag::CrossPair,
                                 {me.own_cross->first, me.own_cross->second});
            }
          } else if (b3_active && me.self == StationId::B1) {
            // the receiver is free to tee everything he holds to his own station
            sched.post_message(me.self, StationId::B3, ready, StepTag::CommitEcho,
                               {me.challenge.first, me.challenge.second, *me.commitment});
          }
          break;
        }
        case StepTag::CrossPair: {
          me.received_cross = ChainPair{ev.payload.at(0), ev.payload.at(1)};
          const ChainPair& lambda = me.self == StationId::B1 ? *me.own_cross : *me.received_cross;
          const ChainPair& zeta = me.self == StationId::B1 ? *me.received_cross : *me.own_cross;
          me.verdict = apply_fault(unveil_verdict(lambda, zeta), fault);
          sched.post_local(me.self, ready, StepTag::Verdict, {}, me.verdict->to_string());
          break;
        }
        case StepTag::KeyDelivery: {  // B2, subordinate variant
          sched.post_message(me.self, StationId::B1, ready, StepTag::KeyRelay, {ev.payload.at(0)});
          if (b3_active) {
            sched.post_message(me.self, StationId::B3, ready, StepTag::KeyRelay, {ev.payload.at(0)});
          }
          break;
        }
        case StepTag::KeyRelay: {  // B1, subordinate variant
          me.verdict = apply_fault(subordinate_unveil(ev.payload.at(0), *me.commitment, me.challenge), fault);
          sched.post_local(me.self, ready, StepTag::Verdict, {}, me.verdict->to_string());
          break;
        }
        default: break;
      }
    };
  };
  scheduler.on_receive(StationId::B1, endpoint_handler(b1));
  scheduler.on_receive(StationId::B2, endpoint_handler(b2));

  // --- interception station ----------------------------------------------
  scheduler.on_receive(StationId::B3, [&](const TranscriptEvent& ev, Scheduler& sched) {
    switch (ev.step) {
      case StepTag::CrossPair:
        if (ev.peer == StationId::B1) {
          b3.lambda_pair = ChainPair{ev.payload.at(0), ev.payload.at(1)};
        } else {
          b3.zeta_pair = ChainPair{ev.payload.at(0), ev.payload.at(1)};
        }
        break;
      case StepTag::CommitEcho:
        b3.n_pair = ChainPair{ev.payload.at(0), ev.payload.at(1)};
        b3.commitment = ev.payload.at(2);
        break;
      case StepTag::KeyRelay: b3.key = ev.payload.at(0); break;
      default: return;
    }
    std::optional<int> bit;
    bool complete = false;
    if (b3.lambda_pair && b3.zeta_pair) {
      bit = b3_intercept(*b3.lambda_pair, *b3.zeta_pair);
      complete = true;
    } else if (b3.n_pair && b3.commitment && b3.key) {
      UnveilOutcome v = subordinate_unveil(*b3.key, *b3.commitment, *b3.n_pair);
      if (v.is_revealed()) bit = v.bit();
      complete = true;
    }
    if (complete && !b3.determined) {
      b3.determined = bit;
      Rational when = sched.now() + sched.processing_delay(StationId::B3);
      sched.post_local(StationId::B3, when, StepTag::Intercept, {},
                       bit ? (*bit == 0 ? "b=0" : "b=1") : "indeterminate");
    }
  });

  // --- seed the timeline --------------------------------------------------
  scheduler.post_local(StationId::A1, Rational(0), StepTag::KeyEstablished, {program.eta_a1});
  scheduler.post_local(StationId::A2, Rational(0), StepTag::KeyEstablished, {program.eta_a2});
  scheduler.post_local(StationId::B1, Rational(0), StepTag::ChallengeGenerated,
                       {n_pair.first, n_pair.second});
  scheduler.post_message(StationId::B1, StationId::A1, Rational(0), StepTag::ChallengeIssue,
                         {n_pair.first, n_pair.second});
  if (variant == ProtocolVariant::Symmetric) {
    scheduler.post_local(StationId::B2, Rational(0), StepTag::ChallengeGenerated,
                         {m_pair->first, m_pair->second});
    scheduler.post_message(StationId::B2, StationId::A2, Rational(0), StepTag::ChallengeIssue,
                           {m_pair->first, m_pair->second});
  } else {
    scheduler.post_message(StationId::A2, StationId::B2, delta, StepTag::KeyDelivery, {program.eta_a2});
  }

  RunResult result;
  result.transcript = scheduler.run();
  result.verdict_b1 = b1.verdict;
  result.verdict_b2 = b2.verdict;
  result.intercept_bit = b3.determined;
  if (!result.verdict_b1) throw Error("run: protocol completed without a B1 verdict");
  if (variant == ProtocolVariant::Symmetric && !result.verdict_b2) {
    throw Error("run: symmetric protocol completed without a B2 verdict");
  }
  return result;
}

}  // namespace relbc
