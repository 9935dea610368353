#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>

#include "relbc/errors.hpp"
#include "relbc/scenario.hpp"

using namespace relbc;

TEST_CASE("defaults are the physical constants") {
  ScenarioConfig config;
  CHECK(config.c == Rational(299792458));
  CHECK(config.d == Rational(300000000));
  CHECK(config.d / config.c > Rational(1));
  CHECK_NOTHROW(config.validate());
}

TEST_CASE("kv serialization round-trips to an equal config") {
  ScenarioConfig config;
  config.variant = ProtocolVariant::Subordinate;
  config.l = 12;
  config.d = Rational::parse("1.5e7");
  config.c = Rational(299792458);
  config.delta = Rational(1, 1000);
  config.adversary = AdversarySpec::parse("bob-b3:mid");
  config.b = CommitBitMode::One;
  config.seed = 424242;
  config.trials = 777;
  config.output = OutputFormat::Csv;
  config.emit_transcript = true;

  ScenarioConfig parsed = ScenarioConfig::from_kv(config.to_kv());
  CHECK(parsed == config);

  config.adversary = AdversarySpec::parse("bob-b3:7.5e6");
  config.variant = ProtocolVariant::Symmetric;
  CHECK(ScenarioConfig::from_kv(config.to_kv()) == config);

  config.adversary = AdversarySpec::parse("alice-diff-bit:1,0");
  CHECK(ScenarioConfig::from_kv(config.to_kv()) == config);
}

TEST_CASE("kv parsing accepts comments and blank lines, rejects junk") {
  ScenarioConfig parsed = ScenarioConfig::from_kv("# comment\n\n l = 8 \nseed=9\n");
  CHECK(parsed.l == 8);
  CHECK(parsed.seed == 9);

  CHECK_THROWS_AS(ScenarioConfig::from_kv("nonsense\n"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::from_kv("unknown_key=1\n"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::from_kv("l=abc\n"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::from_kv("b=2\n"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::from_kv("output=xml\n"), ConfigError);
}

TEST_CASE("validation enforces the documented bounds") {
  ScenarioConfig config;
  config.l = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = ScenarioConfig{};
  config.trials = 0;
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = ScenarioConfig{};
  config.delta = Rational(1, 2);  // d/c ~ 1.0007, bound is ~0.10007
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config.delta = Rational(1, 20);
  CHECK_NOTHROW(config.validate());

  config = ScenarioConfig{};
  config.adversary = AdversarySpec::parse("bob-b3:4e8");  // beyond d
  CHECK_THROWS_AS(config.validate(), ConfigError);

  config = ScenarioConfig{};
  config.variant = ProtocolVariant::Subordinate;
  config.adversary = AdversarySpec::parse("alice-diff-bit:0,1");
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("geometry places B3 from the adversary spec") {
  ScenarioConfig config;
  config.adversary = AdversarySpec::parse("bob-b3:mid");
  Geometry g = config.make_geometry();
  CHECK(g.position(StationId::B3) == config.d / Rational(2));

  config.adversary = AdversarySpec::parse("bob-b3:1e8");
  CHECK(config.make_geometry().position(StationId::B3) == Rational(100000000));

  config.adversary = AdversarySpec{};
  CHECK_FALSE(config.make_geometry().has(StationId::B3));
}

TEST_CASE("per-trial bits and seeds are deterministic functions of the master seed") {
  ScenarioConfig config;
  config.seed = 500;

  CHECK(config.commit_bit_for_trial(3) == config.commit_bit_for_trial(3));
  int bits_seen = 0;
  for (std::uint64_t i = 0; i < 64; ++i) bits_seen += config.commit_bit_for_trial(i);
  CHECK(bits_seen > 10);
  CHECK(bits_seen < 54);

  config.b = CommitBitMode::Zero;
  for (std::uint64_t i = 0; i < 8; ++i) CHECK(config.commit_bit_for_trial(i) == 0);
  config.b = CommitBitMode::One;
  for (std::uint64_t i = 0; i < 8; ++i) CHECK(config.commit_bit_for_trial(i) == 1);

  RunSpec t0 = config.run_spec_for_trial(0);
  RunSpec t1 = config.run_spec_for_trial(1);
  CHECK(t0.seed != t1.seed);
  CHECK(t0.seed == config.run_spec_for_trial(0).seed);

  ScenarioConfig other = config;
  other.seed = 501;
  CHECK(other.run_spec_for_trial(0).seed != t0.seed);
}

TEST_CASE("RELBC_SEED fallback") {
  unsetenv("RELBC_SEED");
  CHECK_FALSE(seed_from_env().has_value());

  setenv("RELBC_SEED", "12345", 1);
  CHECK(seed_from_env() == 12345);

  setenv("RELBC_SEED", "not-a-number", 1);
  CHECK_THROWS_AS(seed_from_env(), ConfigError);

  unsetenv("RELBC_SEED");
}
