#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relbc/oracle.hpp"
#include "relbc/protocol.hpp"
#include "relbc/scenario.hpp"

namespace relbc {

/// A probability with its provenance ("exact", "paper-approximation", ...).
struct TaggedRate {
  std::optional<Rational> value;  // exact form when representable in int64
  double decimal = 0.0;
  std::string derivation;
};

/// Closed-form outcome probabilities for a scenario. The exact array is
/// present whenever the rationals fit in 64 bits (all l <= 31); the double
/// form is always valid.
struct ExpectedDistribution {
  std::array<double, 4> p{};
  std::optional<std::array<Rational, 4>> exact;
};

ExpectedDistribution expected_distribution(ProtocolVariant variant, const AdversarySpec& strategy,
                                           CommitBitMode bit_mode, std::uint32_t l);

/// Per-outcome binomial z-scores of observed counts against expected
/// probabilities; consistent iff every |z| <= threshold (cells with p in
/// {0,1} must match exactly).
struct Comparison {
  std::array<double, 4> z{};
  double max_abs_z = 0.0;
  bool consistent = false;
};

Comparison compare(const std::array<std::uint64_t, 4>& counts, std::uint64_t trials,
                   const std::array<double, 4>& expected, double z_threshold = 4.0);

/// Knowledge-time aggregate for one observer over a batch: the (unique)
/// determination time of the trials that determined the bit, and how many
/// never did.
struct KnowledgeSummary {
  std::optional<Rational> time;
  std::uint64_t undetermined_trials = 0;
};

/// Execution knobs that do not change scenario semantics; kept out of the
/// embedded config so reports are byte-identical across worker layouts.
struct RunOptions {
  unsigned jobs = 1;
  FaultInjection fault = FaultInjection::None;
};

struct TrialReport {
  ScenarioConfig config;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::array<std::uint64_t, 4> outcome_counts{};
  double ambiguity_rate = 0.0;
  TaggedRate expected_rate;       // exact ambiguity probability for the scenario
  TaggedRate paper_approx_rate;   // the 1/2^l approximation, for reference
  ExpectedDistribution expected;  // full outcome distribution
  Comparison comparison;
  double z_score = 0.0;  // max |z| over outcomes
  std::map<std::string, KnowledgeSummary> knowledge_times;
  std::vector<Transcript> transcripts;  // retained when config.emit_transcript
  FaultInjection fault = FaultInjection::None;

  std::string to_json() const;
  std::string to_csv_row() const;
  static std::string csv_header();
  std::string to_text() const;
};

/// Runs config.trials independent seeded protocol runs and aggregates
/// verdicts, knowledge times and consistency statistics. Deterministic for
/// a fixed master seed, byte-for-byte, regardless of options.jobs.
TrialReport run_trials(const ScenarioConfig& config, const RunOptions& options = {});

/// Runs the real protocol engine over EVERY input tuple of the same space
/// the exhaustive oracle enumerates and tallies the verdicts. The geometry
/// defaults to d = c (one light-second separation).
OutcomeDistribution engine_exhaustive_distribution(ProtocolVariant variant, const AdversarySpec& strategy,
                                                   int honest_b, std::uint32_t l,
                                                   FaultInjection fault = FaultInjection::None,
                                                   unsigned jobs = 1);

}  // namespace relbc
