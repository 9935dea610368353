#include "relbc/scenario.hpp"

#include <cstdlib>
#include <sstream>

#include "relbc/errors.hpp"

namespace relbc {

std::string_view output_format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::Text: return "text";
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
  }
  return "?";
}

std::optional<OutputFormat> parse_output_format(std::string_view name) {
  if (name == "text") return OutputFormat::Text;
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  return std::nullopt;
}

std::string_view commit_bit_mode_name(CommitBitMode m) {
  switch (m) {
    case CommitBitMode::Random: return "random";
    case CommitBitMode::Zero: return "0";
    case CommitBitMode::One: return "1";
  }
  return "?";
}

std::optional<CommitBitMode> parse_commit_bit_mode(std::string_view name) {
  if (name == "random") return CommitBitMode::Random;
  if (name == "0") return CommitBitMode::Zero;
  if (name == "1") return CommitBitMode::One;
  return std::nullopt;
}

void ScenarioConfig::validate() const {
  if (l < 1) throw ConfigError("config: l must be >= 1");
  if (l > 4096) throw ConfigError("config: l out of range (max 4096)");
  if (!(d > Rational(0))) throw ConfigError("config: d must be positive");
  if (!(c > Rational(0))) throw ConfigError("config: c must be positive");
  if (delta < Rational(0)) throw ConfigError("config: delta must be non-negative");
  if (!(delta * Rational(10) < d / c)) {
    throw ConfigError("config: delta must satisfy delta < d/(10c)");
  }
  if (trials < 1) throw ConfigError("config: trials must be >= 1");
  adversary.validate();
  if (variant == ProtocolVariant::Subordinate && adversary.kind == StrategyKind::AliceDifferentBit) {
    throw ConfigError("config: alice-diff-bit is undefined for the subordinate variant");
  }
  if (adversary.kind == StrategyKind::BobMidpointStation && adversary.b3_position &&
      (*adversary.b3_position < Rational(0) || *adversary.b3_position > d)) {
    throw ConfigError("config: B3 position must lie in [0, d]");
  }
}

Geometry ScenarioConfig::make_geometry() const {
  Geometry g(d, c);
  if (adversary.kind == StrategyKind::BobMidpointStation) {
    g.place_b3(adversary.b3_position.value_or(d / Rational(2)));
  }
  return g;
}

RngStream ScenarioConfig::trial_stream(std::uint64_t trial_index) const {
  return RngStream(seed).substream(rng_tag::kTrialBase + trial_index);
}

int ScenarioConfig::commit_bit_for_trial(std::uint64_t trial_index) const {
  switch (b) {
    case CommitBitMode::Zero: return 0;
    case CommitBitMode::One: return 1;
    case CommitBitMode::Random: break;
  }
  RngStream bit_stream = trial_stream(trial_index).substream(rng_tag::kCommitBit);
  return bit_stream.next_bit() ? 1 : 0;
}

RunSpec ScenarioConfig::run_spec_for_trial(std::uint64_t trial_index) const {
  RunSpec spec;
  spec.variant = variant;
  spec.honest_b = commit_bit_for_trial(trial_index);
  spec.geometry = make_geometry();
  spec.l = l;
  spec.seed = trial_stream(trial_index).seed();
  spec.adversary = adversary;
  spec.delta = delta;
  return spec;
}

std::string ScenarioConfig::to_kv() const {
  std::ostringstream os;
  os << "variant=" << variant_name(variant) << "\n";
  os << "l=" << l << "\n";
  os << "d=" << d.to_fraction_string() << "\n";
  os << "c=" << c.to_fraction_string() << "\n";
  os << "delta=" << delta.to_fraction_string() << "\n";
  os << "adversary=" << adversary.to_string() << "\n";
  os << "b=" << commit_bit_mode_name(b) << "\n";
  os << "seed=" << seed << "\n";
  os << "trials=" << trials << "\n";
  os << "output=" << output_format_name(output) << "\n";
  os << "emit_transcript=" << (emit_transcript ? "true" : "false") << "\n";
  return os.str();
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
  if (value.empty()) throw ConfigError("config: empty value for " + std::string(key));
  std::uint64_t out = 0;
  for (char ch : value) {
    if (ch < '0' || ch > '9') throw ConfigError("config: non-numeric value for " + std::string(key));
    std::uint64_t next = out * 10 + static_cast<std::uint64_t>(ch - '0');
    if (next < out) throw ConfigError("config: value out of range for " + std::string(key));
    out = next;
  }
  return out;
}

}  // namespace

void ScenarioConfig::set_kv(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "variant") {
    auto v = parse_variant(value);
    if (!v) throw ConfigError("config: unknown variant '" + std::string(value) + "'");
    variant = *v;
  } else if (key == "l") {
    l = static_cast<std::uint32_t>(parse_u64(key, value));
  } else if (key == "d") {
    d = Rational::parse(value);
  } else if (key == "c") {
    c = Rational::parse(value);
  } else if (key == "delta") {
    delta = Rational::parse(value);
  } else if (key == "adversary") {
    adversary = AdversarySpec::parse(value);
  } else if (key == "b") {
    auto m = parse_commit_bit_mode(value);
    if (!m) throw ConfigError("config: b must be random, 0 or 1");
    b = *m;
  } else if (key == "seed") {
    seed = parse_u64(key, value);
  } else if (key == "trials") {
    trials = parse_u64(key, value);
  } else if (key == "output") {
    auto f = parse_output_format(value);
    if (!f) throw ConfigError("config: unknown output format '" + std::string(value) + "'");
    output = *f;
  } else if (key == "emit_transcript") {
    if (value == "true" || value == "1") {
      emit_transcript = true;
    } else if (value == "false" || value == "0") {
      emit_transcript = false;
    } else {
      throw ConfigError("config: emit_transcript must be true or false");
    }
  } else {
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
  }
}

ScenarioConfig ScenarioConfig::from_kv(std::string_view text) {
  ScenarioConfig config;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config: expected key=value, got '" + std::string(line) + "'");
    }
    config.set_kv(line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return variant == o.variant && l == o.l && d == o.d && c == o.c && delta == o.delta &&
         adversary == o.adversary && b == o.b && seed == o.seed && trials == o.trials && output == o.output &&
         emit_transcript == o.emit_transcript;
}

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("RELBC_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    return parse_u64("RELBC_SEED", raw);
  } catch (const ConfigError&) {
    throw ConfigError("RELBC_SEED must be a non-negative integer");
  }
}

}  // namespace relbc
