#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <vector>

#include "relbc/errors.hpp"
#include "relbc/protocol.hpp"
#include "relbc/rng.hpp"

using namespace relbc;

namespace {

Geometry one_second_geometry() { return Geometry(Rational(300000000), Rational(300000000)); }

ChainPair pair_of(std::uint64_t a, std::uint64_t b, std::uint32_t l) {
  return {BitChain::from_uint(a, l), BitChain::from_uint(b, l)};
}

const TranscriptEvent* find_event(const Transcript& t, StationId station, StepTag step, EventKind kind) {
  for (const auto& ev : t.events) {
    if (ev.station == station && ev.step == step && ev.kind == kind) return &ev;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("commit_response encrypts the chosen challenge") {
  CHECK(commit_response(BitChain::parse("0000"), 0, pair_of(0b1010, 0b0101, 4)) == BitChain::parse("1010"));
  CHECK(commit_response(BitChain::parse("1111"), 1, pair_of(0b1010, 0b0101, 4)) == BitChain::parse("1010"));

  RngStream rng(11);
  for (int i = 0; i < 200; ++i) {
    BitChain eta = BitChain::random(8, rng);
    auto challenge = BitChain::random_distinct(2, 8, rng);
    ChainPair pair{challenge[0], challenge[1]};
    CHECK((commit_response(eta, 0, pair) ^ pair.first) == eta);
    CHECK((commit_response(eta, 1, pair) ^ pair.second) == eta);
  }
  CHECK_THROWS_AS(commit_response(BitChain::parse("111"), 0, pair_of(0b1010, 0b0101, 4)), LengthMismatch);
  CHECK_THROWS_AS(commit_response(BitChain::parse("1111"), 2, pair_of(0b1010, 0b0101, 4)), Error);
}

TEST_CASE("derive_cross recovers the key at the committed index") {
  RngStream rng(12);
  BitChain eta = BitChain::random(8, rng);
  auto n = BitChain::random_distinct(2, 8, rng);
  ChainPair challenge{n[0], n[1]};
  ChainPair cross = derive_cross(commit_response(eta, 0, challenge), challenge);
  CHECK(cross.first == eta);

  CHECK(derive_cross(BitChain::parse("0000"), pair_of(0b0001, 0b0010, 4)) == pair_of(0b0001, 0b0010, 4));

  // injective in the commitment for a fixed challenge
  for (int i = 0; i < 100; ++i) {
    BitChain c1 = BitChain::random(8, rng);
    BitChain c2 = BitChain::random(8, rng);
    if (c1 == c2) continue;
    CHECK(derive_cross(c1, challenge) != derive_cross(c2, challenge));
  }
}

TEST_CASE("unveil_verdict covers its four cases") {
  RngStream rng(13);
  BitChain eta = BitChain::random(8, rng);
  BitChain x = BitChain::random(8, rng);
  BitChain y = x ^ BitChain::from_uint(1, 8);

  CHECK(unveil_verdict({eta, x}, {eta, y}) == UnveilOutcome::revealed(0));
  CHECK(unveil_verdict({x, eta}, {y, eta}) == UnveilOutcome::revealed(1));
  CHECK(unveil_verdict({eta, x}, {eta, x}) == UnveilOutcome::ambiguous());
  CHECK(unveil_verdict({eta, x}, {y, eta}) == UnveilOutcome::cheat_detected());
  CHECK_THROWS_AS(unveil_verdict({eta, x}, {BitChain::parse("111"), y}), LengthMismatch);
}

TEST_CASE("unveil_verdict partitions all inputs at l <= 3") {
  for (std::uint32_t l = 1; l <= 3; ++l) {
    const std::uint64_t space = 1ull << l;
    std::uint64_t classified = 0;
    std::array<std::uint64_t, 4> per_kind{};
    for (std::uint64_t l0 = 0; l0 < space; ++l0) {
      for (std::uint64_t l1 = 0; l1 < space; ++l1) {
        for (std::uint64_t z0 = 0; z0 < space; ++z0) {
          for (std::uint64_t z1 = 0; z1 < space; ++z1) {
            UnveilOutcome v = unveil_verdict(pair_of(l0, l1, l), pair_of(z0, z1, l));
            // independent re-derivation of the conditions
            bool eq0 = l0 == z0;
            bool eq1 = l1 == z1;
            UnveilOutcome expected = eq0 && eq1 ? UnveilOutcome::ambiguous()
                                    : eq0       ? UnveilOutcome::revealed(0)
                                    : eq1       ? UnveilOutcome::revealed(1)
                                                : UnveilOutcome::cheat_detected();
            CHECK(v == expected);
            ++classified;
            ++per_kind[static_cast<std::size_t>(v.slot())];
          }
        }
      }
    }
    CHECK(classified == space * space * space * space);
    for (auto count : per_kind) CHECK(count > 0);
  }
}

TEST_CASE("different committed bits always classify as cheating (exhaustive l=4)") {
  const std::uint32_t l = 4;
  const std::uint64_t space = 1 << l;
  std::uint64_t checked = 0;
  for (std::uint64_t eta = 0; eta < space; ++eta) {
    for (std::uint64_t n0 = 0; n0 < space; ++n0) {
      for (std::uint64_t n1 = 0; n1 < space; ++n1) {
        if (n1 == n0) continue;
        std::uint64_t commit_n = eta ^ n0;  // A1 commits b=0
        for (std::uint64_t m0 = 0; m0 < space; ++m0) {
          for (std::uint64_t m1 = 0; m1 < space; ++m1) {
            if (m1 == m0) continue;
            std::uint64_t commit_m = eta ^ m1;  // A2 commits b=1
            UnveilOutcome v = unveil_verdict(pair_of(commit_n ^ n0, commit_n ^ n1, l),
                                             pair_of(commit_m ^ m0, commit_m ^ m1, l));
            REQUIRE(v == UnveilOutcome::cheat_detected());
            ++checked;
          }
        }
      }
    }
  }
  const std::uint64_t pairs = space * (space - 1);
  CHECK(checked == space * pairs * pairs);
}

TEST_CASE("subordinate_unveil matches a brute-force reference at l=2") {
  const std::uint32_t l = 2;
  const std::uint64_t space = 1 << l;
  for (std::uint64_t eta = 0; eta < space; ++eta) {
    for (std::uint64_t n0 = 0; n0 < space; ++n0) {
      for (std::uint64_t n1 = 0; n1 < space; ++n1) {
        if (n1 == n0) continue;
        for (std::uint64_t commitment = 0; commitment < space; ++commitment) {
          UnveilOutcome v =
              subordinate_unveil(BitChain::from_uint(eta, l), BitChain::from_uint(commitment, l),
                                 pair_of(n0, n1, l));
          // reference: which b satisfies n_b == eta XOR commitment?
          std::uint64_t recovered = eta ^ commitment;
          if (recovered == n0) {
            CHECK(v == UnveilOutcome::revealed(0));
          } else if (recovered == n1) {
            CHECK(v == UnveilOutcome::revealed(1));
          } else {
            CHECK(v == UnveilOutcome::cheat_detected());
          }
        }
      }
    }
  }

  RngStream rng(14);
  BitChain eta = BitChain::random(8, rng);
  auto n = BitChain::random_distinct(2, 8, rng);
  ChainPair challenge{n[0], n[1]};
  CHECK(subordinate_unveil(eta, eta ^ challenge.second, challenge) == UnveilOutcome::revealed(1));
}

TEST_CASE("subordinate_unveil is never ambiguous for distinct challenges (exhaustive l <= 3)") {
  for (std::uint32_t l = 1; l <= 3; ++l) {
    const std::uint64_t space = 1ull << l;
    for (std::uint64_t eta = 0; eta < space; ++eta) {
      for (std::uint64_t n0 = 0; n0 < space; ++n0) {
        for (std::uint64_t n1 = 0; n1 < space; ++n1) {
          if (n1 == n0) continue;
          for (std::uint64_t commitment = 0; commitment < space; ++commitment) {
            UnveilOutcome v =
                subordinate_unveil(BitChain::from_uint(eta, l), BitChain::from_uint(commitment, l),
                                   pair_of(n0, n1, l));
            REQUIRE(v != UnveilOutcome::ambiguous());
          }
        }
      }
    }
  }
}

TEST_CASE("honest symmetric run: both verdicts reveal the bit at t=d/c") {
  for (int b : {0, 1}) {
    RunSpec spec;
    spec.variant = ProtocolVariant::Symmetric;
    spec.honest_b = b;
    spec.geometry = one_second_geometry();
    spec.l = 8;
    spec.seed = 21 + static_cast<std::uint64_t>(b);
    RunResult result = run_protocol(spec);
    REQUIRE(result.verdict_b1.has_value());
    REQUIRE(result.verdict_b2.has_value());
    CHECK(*result.verdict_b1 == *result.verdict_b2);
    CHECK(*result.verdict_b1 == UnveilOutcome::revealed(b));

    const TranscriptEvent* verdict_b1 = find_event(result.transcript, StationId::B1, StepTag::Verdict,
                                                   EventKind::Local);
    REQUIRE(verdict_b1 != nullptr);
    CHECK(verdict_b1->time == Rational(1));
    const TranscriptEvent* verdict_b2 = find_event(result.transcript, StationId::B2, StepTag::Verdict,
                                                   EventKind::Local);
    REQUIRE(verdict_b2 != nullptr);
    CHECK(verdict_b2->time == Rational(1));
  }
}

TEST_CASE("honest subordinate run: B1 reveals when the key arrives at t=d/c") {
  RunSpec spec;
  spec.variant = ProtocolVariant::Subordinate;
  spec.honest_b = 0;
  spec.geometry = one_second_geometry();
  spec.l = 8;
  spec.seed = 33;
  RunResult result = run_protocol(spec);
  REQUIRE(result.verdict_b1.has_value());
  CHECK_FALSE(result.verdict_b2.has_value());
  CHECK(*result.verdict_b1 == UnveilOutcome::revealed(0));
  const TranscriptEvent* verdict = find_event(result.transcript, StationId::B1, StepTag::Verdict,
                                              EventKind::Local);
  REQUIRE(verdict != nullptr);
  CHECK(verdict->time == Rational(1));
  // the relay hop B2 -> B1 exists and closes the loop
  CHECK(find_event(result.transcript, StationId::B1, StepTag::KeyRelay, EventKind::Receive) != nullptr);
}

TEST_CASE("run_protocol rejects inconsistent parameters") {
  RunSpec spec;
  spec.geometry = one_second_geometry();

  SUBCASE("l = 0") {
    spec.l = 0;
    CHECK_THROWS_AS(run_protocol(spec), ConfigError);
  }
  SUBCASE("delta too close to the light time") {
    spec.delta = Rational(1, 5);  // d/c = 1, bound is 1/10
    CHECK_THROWS_AS(run_protocol(spec), ConfigError);
  }
  SUBCASE("negative delta") {
    spec.delta = Rational(-1, 100);
    CHECK_THROWS_AS(run_protocol(spec), ConfigError);
  }
  SUBCASE("diff-bit under the subordinate variant") {
    spec.variant = ProtocolVariant::Subordinate;
    spec.adversary = AdversarySpec::parse("alice-diff-bit:0,1");
    CHECK_THROWS_AS(run_protocol(spec), ConfigError);
  }
  SUBCASE("forced chains of the wrong length") {
    ForcedChains forced;
    forced.eta = BitChain::from_uint(0, 4);
    forced.n_pair = pair_of(0, 1, 4);
    forced.m_pair = pair_of(0, 1, 4);
    spec.l = 8;
    spec.forced = forced;
    CHECK_THROWS_AS(run_protocol(spec), ConfigError);
  }
  SUBCASE("forced challenge pair must be distinct") {
    ForcedChains forced;
    forced.eta = BitChain::from_uint(0, 4);
    forced.n_pair = pair_of(3, 3, 4);
    forced.m_pair = pair_of(0, 1, 4);
    spec.l = 4;
    spec.forced = forced;
    CHECK_THROWS_AS(run_protocol(spec), ConfigError);
  }
}

TEST_CASE("forced chains drive the run reproducibly") {
  RunSpec spec;
  spec.geometry = one_second_geometry();
  spec.l = 4;
  spec.honest_b = 0;
  ForcedChains forced;
  forced.eta = BitChain::from_uint(0b1111, 4);
  forced.n_pair = pair_of(0b1010, 0b0101, 4);
  forced.m_pair = pair_of(0b0011, 0b0110, 4);  // xor differs from the n pair's
  spec.forced = forced;
  RunResult result = run_protocol(spec);
  const TranscriptEvent* commit = find_event(result.transcript, StationId::B1, StepTag::CommitResponse,
                                             EventKind::Receive);
  REQUIRE(commit != nullptr);
  CHECK(commit->payload.at(0) == BitChain::parse("0101"));  // 1111 XOR 1010
  CHECK(*result.verdict_b1 == UnveilOutcome::revealed(0));
}

TEST_CASE("verdict symmetry holds across strategies and seeds") {
  for (const char* strategy : {"honest", "alice-diff-bit:0,1", "alice-diff-key", "bob-b3:mid"}) {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
      RunSpec spec;
      spec.variant = ProtocolVariant::Symmetric;
      spec.honest_b = static_cast<int>(seed & 1);
      spec.geometry = one_second_geometry();
      spec.l = 6;
      spec.seed = seed;
      spec.adversary = AdversarySpec::parse(strategy);
      RunResult result = run_protocol(spec);
      REQUIRE(result.verdict_b1.has_value());
      REQUIRE(result.verdict_b2.has_value());
      CHECK(*result.verdict_b1 == *result.verdict_b2);
    }
  }
}

TEST_CASE("honest completeness: revealed or ambiguous, with the exact ambiguity condition") {
  int ambiguous_seen = 0;
  for (std::uint64_t seed = 1; seed <= 3000; ++seed) {
    RunSpec spec;
    spec.variant = ProtocolVariant::Symmetric;
    spec.honest_b = static_cast<int>(seed % 2);
    spec.geometry = one_second_geometry();
    spec.l = 4;
    spec.seed = seed;
    RunResult result = run_protocol(spec);
    const UnveilOutcome& v = *result.verdict_b1;
    CHECK(v != UnveilOutcome::cheat_detected());

    const TranscriptEvent* n_gen = find_event(result.transcript, StationId::B1, StepTag::ChallengeGenerated,
                                              EventKind::Local);
    const TranscriptEvent* m_gen = find_event(result.transcript, StationId::B2, StepTag::ChallengeGenerated,
                                              EventKind::Local);
    REQUIRE(n_gen != nullptr);
    REQUIRE(m_gen != nullptr);
    bool xors_collide = (n_gen->payload.at(0) ^ n_gen->payload.at(1)) ==
                        (m_gen->payload.at(0) ^ m_gen->payload.at(1));
    CHECK((v == UnveilOutcome::ambiguous()) == xors_collide);
    if (v == UnveilOutcome::ambiguous()) ++ambiguous_seen;
    if (v.is_revealed()) CHECK(v.bit() == spec.honest_b);
  }
  // p = 1/15 at l=4, so 3000 trials should show plenty of both
  CHECK(ambiguous_seen > 100);
  CHECK(ambiguous_seen < 400);
}

TEST_CASE("alice is passive after the commit deadline") {
  for (const char* strategy : {"honest", "alice-diff-key"}) {
    for (const char* delta_text : {"0", "1/100"}) {
      RunSpec spec;
      spec.geometry = one_second_geometry();
      spec.l = 8;
      spec.seed = 77;
      spec.delta = Rational::parse(delta_text);
      spec.adversary = AdversarySpec::parse(strategy);
      RunResult result = run_protocol(spec);
      for (const auto& ev : result.transcript.events) {
        if (ev.station != StationId::A1 && ev.station != StationId::A2) continue;
        if (ev.kind == EventKind::Receive) continue;  // arrivals are not Alice actions
        CHECK(ev.time <= spec.delta);
      }
    }
  }
}

TEST_CASE("commit deadline shifts the whole unveiling by delta") {
  RunSpec spec;
  spec.geometry = one_second_geometry();
  spec.l = 8;
  spec.seed = 5;
  spec.delta = Rational(1, 20);
  RunResult result = run_protocol(spec);

  const TranscriptEvent* commit_send = find_event(result.transcript, StationId::A1, StepTag::CommitResponse,
                                                  EventKind::Send);
  REQUIRE(commit_send != nullptr);
  CHECK(commit_send->time == Rational(1, 20));
  const TranscriptEvent* verdict = find_event(result.transcript, StationId::B1, StepTag::Verdict,
                                              EventKind::Local);
  REQUIRE(verdict != nullptr);
  CHECK(verdict->time == Rational(1, 20) + Rational(1));
}

TEST_CASE("processing delays defer responses") {
  RunSpec spec;
  spec.geometry = one_second_geometry();
  spec.l = 8;
  spec.seed = 6;
  spec.processing_delays[static_cast<std::size_t>(StationId::A1)] = Rational(1, 50);
  RunResult result = run_protocol(spec);
  const TranscriptEvent* commit_send = find_event(result.transcript, StationId::A1, StepTag::CommitResponse,
                                                  EventKind::Send);
  REQUIRE(commit_send != nullptr);
  CHECK(commit_send->time == Rational(1, 50));
  // B2's side is unaffected
  const TranscriptEvent* other = find_event(result.transcript, StationId::A2, StepTag::CommitResponse,
                                            EventKind::Send);
  REQUIRE(other != nullptr);
  CHECK(other->time == Rational(0));
}

TEST_CASE("no receiver sees a payload before its arrival time") {
  RunSpec spec;
  spec.geometry = one_second_geometry();
  spec.l = 8;
  spec.seed = 8;
  spec.adversary = AdversarySpec::parse("bob-b3:mid");
  RunResult result = run_protocol(spec);

  // every receive pairs with exactly one earlier send at distance/c
  for (const auto& ev : result.transcript.events) {
    if (ev.kind != EventKind::Receive) continue;
    const TranscriptEvent* matching_send = nullptr;
    for (const auto& other : result.transcript.events) {
      if (other.kind == EventKind::Send && other.message_id == ev.message_id) {
        matching_send = &other;
        break;
      }
    }
    REQUIRE(matching_send != nullptr);
    CHECK(ev.time ==
          matching_send->time + result.transcript.geometry.travel_time(matching_send->station, ev.station));
    CHECK(ev.time >= matching_send->time);
  }
}

namespace {

// extension-point check: corrupt one bit of the honest commitment
struct BitFlipExtension : AdversaryExtension {
  BitChain commitment(StationId station, const ChainPair& challenge,
                      const AliceProgram& honest_program) const override {
    BitChain honest = apply_alice_strategy(honest_program, station, challenge);
    if (station == StationId::A2) {
      return honest ^ BitChain::from_uint(1, honest.length());
    }
    return honest;
  }
};

}  // namespace

TEST_CASE("adversary extension point overrides commitments") {
  BitFlipExtension extension;
  RunSpec spec;
  spec.geometry = one_second_geometry();
  spec.l = 16;
  spec.seed = 404;
  spec.extension = &extension;
  RunResult result = run_protocol(spec);
  CHECK(*result.verdict_b1 == UnveilOutcome::cheat_detected());
}

TEST_CASE("identical seeds give bit-identical transcripts") {
  auto run_text = [](std::uint64_t seed) {
    RunSpec spec;
    spec.geometry = one_second_geometry();
    spec.l = 12;
    spec.seed = seed;
    spec.adversary = AdversarySpec::parse("bob-b3:mid");
    return run_protocol(spec).transcript.to_text();
  };
  CHECK(run_text(31) == run_text(31));
  CHECK(run_text(31) != run_text(32));
}
