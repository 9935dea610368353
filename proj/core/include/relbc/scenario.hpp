#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "relbc/adversary.hpp"
#include "relbc/protocol.hpp"
#include "relbc/rational.hpp"

namespace relbc {

enum class OutputFormat : std::uint8_t { Text, Json, Csv };
std::string_view output_format_name(OutputFormat f);
std::optional<OutputFormat> parse_output_format(std::string_view name);

/// How the sender picks the committed bit per trial.
enum class CommitBitMode : std::uint8_t { Random, Zero, One };
std::string_view commit_bit_mode_name(CommitBitMode m);
std::optional<CommitBitMode> parse_commit_bit_mode(std::string_view name);

/// One scenario: fully determines every trial of a batch. Serializes to a
/// flat key=value block that re-parses to an equal config.
struct ScenarioConfig {
  ProtocolVariant variant = ProtocolVariant::Symmetric;
  std::uint32_t l = 16;
  Rational d{300000000};   // meters; d/c just over one second by default
  Rational c{299792458};   // meters/second
  Rational delta{0};       // commit deadline, seconds
  AdversarySpec adversary{};
  CommitBitMode b = CommitBitMode::Random;
  std::uint64_t seed = 1;
  std::uint64_t trials = 1;
  OutputFormat output = OutputFormat::Text;
  bool emit_transcript = false;

  void validate() const;  // throws ConfigError

  Geometry make_geometry() const;

  /// Trial-level RNG stream, derived from the master seed and the index
  /// only; independent of execution order and worker layout.
  RngStream trial_stream(std::uint64_t trial_index) const;
  int commit_bit_for_trial(std::uint64_t trial_index) const;
  RunSpec run_spec_for_trial(std::uint64_t trial_index) const;

  std::string to_kv() const;
  static ScenarioConfig from_kv(std::string_view text);
  /// Applies one key=value assignment; unknown keys throw ConfigError.
  void set_kv(std::string_view key, std::string_view value);

  bool operator==(const ScenarioConfig& o) const;
  bool operator!=(const ScenarioConfig& o) const { return !(*this == o); }
};

/// RELBC_SEED, when set and numeric; the CLI falls back to it when neither
/// flag nor config file provides a seed.
std::optional<std::uint64_t> seed_from_env();

}  // namespace relbc
