#include "relbc/adversary.hpp"

#include <utility>

#include "relbc/errors.hpp"
#include "relbc/protocol.hpp"

namespace relbc {

std::string_view strategy_kind_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::Honest: return "honest";
    case StrategyKind::AliceDifferentBit: return "alice-diff-bit";
    case StrategyKind::AliceDifferentKeys: return "alice-diff-key";
    case StrategyKind::BobMidpointStation: return "bob-b3";
  }
  return "?";
}

AdversarySpec AdversarySpec::parse(std::string_view text) {
  AdversarySpec spec;
  std::string_view name = text;
  std::string_view args;
  auto colon = text.find(':');
  if (colon != std::string_view::npos) {
    name = text.substr(0, colon);
    args = text.substr(colon + 1);
  }

  if (name == "honest") {
    if (!args.empty()) throw ParseError("adversary: 'honest' takes no arguments");
    spec.kind = StrategyKind::Honest;
  } else if (name == "alice-diff-bit") {
    spec.kind = StrategyKind::AliceDifferentBit;
    if (args.empty()) {
      spec.b1 = 0;
      spec.b2 = 1;
    } else {
      if (args.size() != 3 || args[1] != ',' || (args[0] != '0' && args[0] != '1') ||
          (args[2] != '0' && args[2] != '1')) {
        throw ParseError("adversary: expected alice-diff-bit:b1,b2 with bits 0/1");
      }
      spec.b1 = args[0] - '0';
      spec.b2 = args[2] - '0';
    }
  } else if (name == "alice-diff-key") {
    if (!args.empty()) throw ParseError("adversary: 'alice-diff-key' takes no arguments");
    spec.kind = StrategyKind::AliceDifferentKeys;
  } else if (name == "bob-b3") {
    spec.kind = StrategyKind::BobMidpointStation;
    if (!args.empty() && args != "mid") {
      spec.b3_position = Rational::parse(args);
    }
  } else {
    throw ParseError("adversary: unknown strategy '" + std::string(text) + "'");
  }
  spec.validate();
  return spec;
}

std::string AdversarySpec::to_string() const {
  switch (kind) {
    case StrategyKind::Honest: return "honest";
    case StrategyKind::AliceDifferentBit:
      return "alice-diff-bit:" + std::to_string(b1) + "," + std::to_string(b2);
    case StrategyKind::AliceDifferentKeys: return "alice-diff-key";
    case StrategyKind::BobMidpointStation:
      return b3_position ? "bob-b3:" + b3_position->to_fraction_string() : "bob-b3:mid";
  }
  return "?";
}

void AdversarySpec::validate() const {
  if (kind == StrategyKind::AliceDifferentBit) {
    if ((b1 != 0 && b1 != 1) || (b2 != 0 && b2 != 1)) {
      throw ConfigError("adversary: alice-diff-bit bits must be 0 or 1");
    }
    if (b1 == b2) throw ConfigError("adversary: alice-diff-bit requires b1 != b2");
  }
  if (kind == StrategyKind::AliceDifferentKeys && keys) {
    if (keys->first == keys->second) throw ConfigError("adversary: alice-diff-key requires distinct keys");
  }
  if (kind == StrategyKind::BobMidpointStation && b3_position && b3_position->is_negative()) {
    throw ConfigError("adversary: B3 position must be non-negative");
  }
}

bool AdversarySpec::operator==(const AdversarySpec& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case StrategyKind::Honest: return true;
    case StrategyKind::AliceDifferentBit: return b1 == o.b1 && b2 == o.b2;
    case StrategyKind::AliceDifferentKeys: {
      if (keys.has_value() != o.keys.has_value()) return false;
      if (!keys) return true;
      return keys->first == o.keys->first && keys->second == o.keys->second;
    }
    case StrategyKind::BobMidpointStation: {
      if (b3_position.has_value() != o.b3_position.has_value()) return false;
      return !b3_position || *b3_position == *o.b3_position;
    }
  }
  return false;
}

const BitChain& AliceProgram::eta(StationId station) const {
  if (station == StationId::A1) return eta_a1;
  if (station == StationId::A2) return eta_a2;
  throw Error("alice program: not a sender station");
}

int AliceProgram::bit(StationId station) const {
  if (station == StationId::A1) return b_a1;
  if (station == StationId::A2) return b_a2;
  throw Error("alice program: not a sender station");
}

AliceProgram resolve_alice_program(const AdversarySpec& spec, int honest_b, std::uint32_t l,
                                   const std::optional<BitChain>& forced_eta,
                                   const std::optional<BitChain>& forced_eta2, RngStream* key_rng) {
  spec.validate();
  AliceProgram program;
  program.b_a1 = honest_b;
  program.b_a2 = honest_b;

  if (spec.kind == StrategyKind::AliceDifferentKeys) {
    if (spec.keys) {
      program.eta_a1 = spec.keys->first;
      program.eta_a2 = spec.keys->second;
    } else if (forced_eta && forced_eta2) {
      program.eta_a1 = *forced_eta;
      program.eta_a2 = *forced_eta2;
    } else {
      if (key_rng == nullptr) throw Error("alice program: key stream required for random distinct keys");
      auto pair = BitChain::random_distinct(2, l, *key_rng);
      program.eta_a1 = std::move(pair[0]);
      program.eta_a2 = std::move(pair[1]);
    }
    if (program.eta_a1 == program.eta_a2) {
      throw ConfigError("adversary: alice-diff-key requires distinct keys");
    }
    return program;
  }

  if (!forced_eta) throw Error("alice program: missing key");
  program.eta_a1 = *forced_eta;
  program.eta_a2 = *forced_eta;
  if (spec.kind == StrategyKind::AliceDifferentBit) {
    program.b_a1 = spec.b1;
    program.b_a2 = spec.b2;
  }
  return program;
}

BitChain apply_alice_strategy(const AliceProgram& program, StationId station, const ChainPair& challenge) {
  return commit_response(program.eta(station), program.bit(station), challenge);
}

std::optional<int> b3_intercept(const ChainPair& lambda_pair, const ChainPair& zeta_pair) {
  bool eq0 = lambda_pair.first == zeta_pair.first;
  bool eq1 = lambda_pair.second == zeta_pair.second;
  if (eq0 == eq1) return std::nullopt;  // zero or two matches: indeterminate
  return eq0 ? 0 : 1;
}

void KnowledgeView::ingest(const TranscriptEvent& ev) {
  if (ev.kind == EventKind::Send) return;  // sends carry only already-held data
  switch (ev.step) {
    case StepTag::ChallengeGenerated:
      if (ev.station == StationId::B1) {
        n_pair = ChainPair{ev.payload.at(0), ev.payload.at(1)};
      } else if (ev.station == StationId::B2) {
        m_pair = ChainPair{ev.payload.at(0), ev.payload.at(1)};
      }
      break;
    case StepTag::CommitResponse:
      if (ev.kind != EventKind::Receive) break;
      if (ev.station == StationId::B1) {
        commitment_n = ev.payload.at(0);
      } else if (ev.station == StationId::B2) {
        commitment_m = ev.payload.at(0);
      }
      break;
    case StepTag::CrossPair:
      if (ev.kind != EventKind::Receive) break;
      if (ev.peer == StationId::B1) {
        lambda_pair = ChainPair{ev.payload.at(0), ev.payload.at(1)};
      } else if (ev.peer == StationId::B2) {
        zeta_pair = ChainPair{ev.payload.at(0), ev.payload.at(1)};
      }
      break;
    case StepTag::CommitEcho:
      if (ev.kind != EventKind::Receive) break;
      n_pair = ChainPair{ev.payload.at(0), ev.payload.at(1)};
      commitment_n = ev.payload.at(2);
      break;
    case StepTag::KeyDelivery:
    case StepTag::KeyRelay:
      if (ev.kind != EventKind::Receive) break;
      key = ev.payload.at(0);
      break;
    case StepTag::KeyEstablished: key = ev.payload.at(0); break;
    default: break;
  }
}

namespace {

// Collects the key values a candidate bit forces; the bit stays feasible
// iff all of them coincide and the structural facts hold.
bool bit_consistent(const KnowledgeView& view, int b) {
  // structural facts that hold for every honest-form view, independent of b
  if (view.n_pair && view.n_pair->first == view.n_pair->second) return false;
  if (view.m_pair && view.m_pair->first == view.m_pair->second) return false;
  if (view.lambda_pair && view.lambda_pair->first == view.lambda_pair->second) return false;
  if (view.zeta_pair && view.zeta_pair->first == view.zeta_pair->second) return false;
  // a held cross pair must match the pair derivable from held inputs
  if (view.lambda_pair && view.commitment_n && view.n_pair) {
    if (!(view.lambda_pair->first == (*view.commitment_n ^ view.n_pair->first)) ||
        !(view.lambda_pair->second == (*view.commitment_n ^ view.n_pair->second))) {
      return false;
    }
  }
  if (view.zeta_pair && view.commitment_m && view.m_pair) {
    if (!(view.zeta_pair->first == (*view.commitment_m ^ view.m_pair->first)) ||
        !(view.zeta_pair->second == (*view.commitment_m ^ view.m_pair->second))) {
      return false;
    }
  }

  std::optional<BitChain> eta;
  auto constrain = [&eta](BitChain candidate) {
    if (!eta) {
      eta = std::move(candidate);
      return true;
    }
    return *eta == candidate;
  };

  if (view.commitment_n && view.n_pair) {
    if (!constrain(*view.commitment_n ^ (b == 0 ? view.n_pair->first : view.n_pair->second))) return false;
  }
  if (view.commitment_m && view.m_pair) {
    if (!constrain(*view.commitment_m ^ (b == 0 ? view.m_pair->first : view.m_pair->second))) return false;
  }
  if (view.lambda_pair) {
    if (!constrain(b == 0 ? view.lambda_pair->first : view.lambda_pair->second)) return false;
  }
  if (view.zeta_pair) {
    if (!constrain(b == 0 ? view.zeta_pair->first : view.zeta_pair->second)) return false;
  }
  if (view.key) {
    if (!constrain(*view.key)) return false;
  }
  return true;
}

}  // namespace

ConsistentBits consistent_commit_bits(const KnowledgeView& view) {
  return ConsistentBits{bit_consistent(view, 0), bit_consistent(view, 1)};
}

std::optional<int> single_station_decidability(const KnowledgeView& view) {
  ConsistentBits bits = consistent_commit_bits(view);
  if (bits.count() != 1) return std::nullopt;
  return bits.b0 ? 0 : 1;
}

}  // namespace relbc
