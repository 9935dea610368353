// relbc — scenario runner for the causally separated commitment simulator.
//
//   relbc run    — execute one scenario (single run or Monte Carlo batch)
//   relbc verify — engine-vs-oracle exhaustive suite + Monte Carlo checks
//
// Exit codes: 0 success/consistent, 1 usage or configuration error,
// 2 a consistency check failed.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "relbc/errors.hpp"
#include "relbc/harness.hpp"
#include "relbc/knowledge.hpp"
#include "relbc/oracle.hpp"
#include "relbc/scenario.hpp"

namespace {

using namespace relbc;

struct CliFlags {
  std::optional<std::string> config_file;
  std::optional<std::string> variant;
  std::optional<std::uint32_t> l;
  std::optional<std::string> d;
  std::optional<std::string> c;
  std::optional<std::string> delta;
  std::optional<std::string> adversary;
  std::optional<std::string> b;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::string> output;
  bool emit_transcript = false;
  unsigned jobs = 1;
  std::string inject_fault = "none";
};

void add_scenario_flags(CLI::App* cmd, CliFlags& f) {
  cmd->add_option("--config", f.config_file, "flat key=value scenario file; flags override it");
  cmd->add_option("--variant", f.variant, "symmetric | subordinate");
  cmd->add_option("--l", f.l, "bit-chain length");
  cmd->add_option("--d", f.d, "station separation, meters (decimal or fraction)");
  cmd->add_option("--c", f.c, "signal speed, meters/second");
  cmd->add_option("--delta", f.delta, "commit deadline, seconds");
  cmd->add_option("--adversary", f.adversary,
                  "honest | alice-diff-bit:b1,b2 | alice-diff-key | bob-b3:mid | bob-b3:<meters>");
  cmd->add_option("--b", f.b, "committed bit: random | 0 | 1");
  cmd->add_option("--seed", f.seed, "master seed (fallback: RELBC_SEED, then 1)");
  cmd->add_option("--trials", f.trials, "number of independent runs");
  cmd->add_option("--output", f.output, "text | json | csv");
  cmd->add_flag("--emit-transcript", f.emit_transcript, "include per-run transcripts in the report");
  cmd->add_option("--jobs", f.jobs, "worker threads (result is identical for any value)");
  cmd->add_option("--inject-fault", f.inject_fault,
                  "none | flip-ambiguous (testing aid: corrupts the verdict path)");
}

FaultInjection parse_fault(const std::string& name) {
  if (name == "none") return FaultInjection::None;
  if (name == "flip-ambiguous") return FaultInjection::FlipAmbiguousVerdict;
  throw ConfigError("unknown --inject-fault value '" + name + "'");
}

std::string strip(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

ScenarioConfig build_config(const CliFlags& f) {
  ScenarioConfig config;
  bool file_has_seed = false;
  if (f.config_file) {
    std::ifstream in(*f.config_file);
    if (!in) throw ConfigError("cannot open config file '" + *f.config_file + "'");
    std::string line;
    while (std::getline(in, line)) {
      std::string text = strip(line);
      if (text.empty() || text.front() == '#') continue;
      auto eq = text.find('=');
      if (eq == std::string::npos) throw ConfigError("config: expected key=value, got '" + text + "'");
      std::string key = strip(text.substr(0, eq));
      config.set_kv(key, text.substr(eq + 1));
      if (key == "seed") file_has_seed = true;
    }
  }
  if (f.variant) config.set_kv("variant", *f.variant);
  if (f.l) config.set_kv("l", std::to_string(*f.l));
  if (f.d) config.set_kv("d", *f.d);
  if (f.c) config.set_kv("c", *f.c);
  if (f.delta) config.set_kv("delta", *f.delta);
  if (f.adversary) config.set_kv("adversary", *f.adversary);
  if (f.b) config.set_kv("b", *f.b);
  if (f.trials) config.set_kv("trials", std::to_string(*f.trials));
  if (f.output) config.set_kv("output", *f.output);
  if (f.emit_transcript) config.emit_transcript = true;

  if (f.seed) {
    config.seed = *f.seed;
  } else if (!file_has_seed) {
    if (auto env = seed_from_env()) config.seed = *env;
  }
  config.validate();
  return config;
}

int cmd_run(const CliFlags& flags) {
  ScenarioConfig config = build_config(flags);
  RunOptions options;
  options.jobs = flags.jobs;
  options.fault = parse_fault(flags.inject_fault);

  TrialReport report = run_trials(config, options);
  switch (config.output) {
    case OutputFormat::Text: std::cout << report.to_text(); break;
    case OutputFormat::Json: std::cout << report.to_json() << "\n"; break;
    case OutputFormat::Csv: std::cout << TrialReport::csv_header() << "\n" << report.to_csv_row() << "\n"; break;
  }
  return report.comparison.consistent ? 0 : 2;
}

struct CheckTable {
  bool all_pass = true;
  void row(const std::string& name, bool pass, const std::string& detail = {}) {
    std::printf("[%s] %s%s%s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.empty() ? "" : " — ",
                detail.c_str());
    all_pass = all_pass && pass;
  }
};

int cmd_verify(const CliFlags& flags, std::uint32_t max_l, std::uint64_t base_trials) {
  FaultInjection fault = parse_fault(flags.inject_fault);
  unsigned jobs = flags.jobs;
  std::uint64_t seed = flags.seed ? *flags.seed : seed_from_env().value_or(1);
  CheckTable table;

  if (fault != FaultInjection::None) {
    std::printf("note: fault injection active (flip-ambiguous); the suite is expected to fail\n");
  }

  struct Combo {
    ProtocolVariant variant;
    const char* adversary;
    int honest_b;
  };
  const std::vector<Combo> combos = {
      {ProtocolVariant::Symmetric, "honest", 0},
      {ProtocolVariant::Symmetric, "honest", 1},
      {ProtocolVariant::Symmetric, "alice-diff-bit:0,1", 0},
      {ProtocolVariant::Symmetric, "alice-diff-bit:1,0", 0},
      {ProtocolVariant::Symmetric, "alice-diff-key", 0},
      {ProtocolVariant::Symmetric, "alice-diff-key", 1},
      {ProtocolVariant::Symmetric, "bob-b3:mid", 0},
      {ProtocolVariant::Symmetric, "bob-b3:mid", 1},
      {ProtocolVariant::Subordinate, "honest", 0},
      {ProtocolVariant::Subordinate, "honest", 1},
      {ProtocolVariant::Subordinate, "alice-diff-key", 0},
      {ProtocolVariant::Subordinate, "alice-diff-key", 1},
      {ProtocolVariant::Subordinate, "bob-b3:mid", 0},
      {ProtocolVariant::Subordinate, "bob-b3:mid", 1},
  };

  for (std::uint32_t l = 1; l <= max_l; ++l) {
    for (const auto& combo : combos) {
      AdversarySpec adversary = AdversarySpec::parse(combo.adversary);
      OutcomeDistribution engine =
          engine_exhaustive_distribution(combo.variant, adversary, combo.honest_b, l, fault, jobs);
      OutcomeDistribution oracle = exhaustive_oracle(combo.variant, adversary, combo.honest_b, l);
      std::ostringstream name;
      name << "exhaustive l=" << l << " " << variant_name(combo.variant) << " " << combo.adversary
           << " b=" << combo.honest_b;
      std::ostringstream detail;
      detail << "engine";
      for (int s = 0; s < 4; ++s) detail << " " << engine.counts[static_cast<std::size_t>(s)];
      detail << " of " << engine.total << ", oracle";
      for (int s = 0; s < 4; ++s) detail << " " << oracle.counts[static_cast<std::size_t>(s)];
      detail << " of " << oracle.total;
      table.row(name.str(), engine.total == oracle.total && engine.same_distribution(oracle), detail.str());
    }
  }

  struct McCase {
    const char* name;
    ProtocolVariant variant;
    const char* adversary;
    std::uint32_t l;
    std::uint64_t trials;
  };
  // the two l=16 rows watch a ~1.5e-5 probability cell; they need enough
  // trials for the binomial z approximation to hold (n*p >~ 5)
  const std::uint64_t rare_cell_floor = 330000;
  const std::vector<McCase> mc_cases = {
      {"monte-carlo symmetric honest l=8", ProtocolVariant::Symmetric, "honest", 8, base_trials},
      {"monte-carlo symmetric honest l=16", ProtocolVariant::Symmetric, "honest", 16,
       std::max(base_trials, rare_cell_floor)},
      {"monte-carlo alice-diff-bit l=16", ProtocolVariant::Symmetric, "alice-diff-bit:0,1", 16,
       base_trials / 2},
      {"monte-carlo alice-diff-key l=16", ProtocolVariant::Symmetric, "alice-diff-key", 16,
       std::max(base_trials, rare_cell_floor)},
      {"monte-carlo subordinate honest l=8", ProtocolVariant::Subordinate, "honest", 8, base_trials / 2},
  };
  for (const auto& mc : mc_cases) {
    ScenarioConfig config;
    config.variant = mc.variant;
    config.adversary = AdversarySpec::parse(mc.adversary);
    config.l = mc.l;
    config.trials = std::max<std::uint64_t>(1000, mc.trials);
    config.seed = seed;
    RunOptions options;
    options.jobs = jobs;
    options.fault = fault;
    TrialReport report = run_trials(config, options);
    std::ostringstream detail;
    detail << "max|z|=" << report.z_score << " over " << report.trials << " trials";
    bool pass = report.comparison.consistent;
    if (config.adversary.kind == StrategyKind::AliceDifferentBit) {
      pass = pass && report.outcome_counts[3] == report.trials;
    }
    table.row(mc.name, pass, detail.str());
  }

  std::printf("%s\n", table.all_pass ? "verify: all checks passed" : "verify: FAILURES detected");
  return table.all_pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relativistic bit-commitment simulator"};
  app.require_subcommand(1);

  CliFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run one scenario and print its report");
  add_scenario_flags(run_cmd, run_flags);

  CliFlags verify_flags;
  std::uint32_t max_l = 3;
  std::uint64_t verify_trials = 200000;
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the engine-vs-oracle and Monte Carlo suites");
  verify_cmd->add_option("--max-l", max_l, "largest chain length for the exhaustive sweep (default 3)");
  verify_cmd->add_option("--trials", verify_trials, "base Monte Carlo trial count (default 200000)");
  verify_cmd->add_option("--seed", verify_flags.seed, "master seed for the Monte Carlo suite");
  verify_cmd->add_option("--jobs", verify_flags.jobs, "worker threads");
  verify_cmd->add_option("--inject-fault", verify_flags.inject_fault, "none | flip-ambiguous");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_flags);
    if (verify_cmd->parsed()) return cmd_verify(verify_flags, max_l, verify_trials);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
