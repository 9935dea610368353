#include "relbc/harness.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "relbc/errors.hpp"
#include "relbc/knowledge.hpp"

namespace relbc {

namespace {

// z magnitude reported when an impossible cell (p = 0 or 1) is violated;
// keeps the report JSON-serializable where infinity would not be.
constexpr double kImpossibleZ = 9e99;

double pow2_double(std::uint32_t l) { return std::ldexp(1.0, static_cast<int>(l)); }

struct RateSet {
  double ambiguous = 0.0;
  double success = 0.0;  // revealed(honest b) for honest runs
  double flipped = 0.0;  // revealed(1 - honest b), diff-key chance event
  double cheat = 0.0;
};

RateSet closed_form_rates(ProtocolVariant variant, StrategyKind kind, std::uint32_t l) {
  RateSet r;
  const double P = pow2_double(l);
  const bool finite = std::isfinite(P);
  switch (kind) {
    case StrategyKind::Honest:
    case StrategyKind::BobMidpointStation:
      if (variant == ProtocolVariant::Symmetric) {
        r.ambiguous = finite ? 1.0 / (P - 1.0) : 0.0;
      }
      r.success = 1.0 - r.ambiguous;
      break;
    case StrategyKind::AliceDifferentBit: r.cheat = 1.0; break;
    case StrategyKind::AliceDifferentKeys: {
      double q = 0.0;
      if (finite) {
        q = variant == ProtocolVariant::Symmetric ? (P - 2.0) / ((P - 1.0) * (P - 1.0)) : 1.0 / (P - 1.0);
      }
      r.flipped = q;
      r.cheat = 1.0 - q;
      break;
    }
  }
  return r;
}

struct ExactRateSet {
  Rational ambiguous{0};
  Rational success{0};
  Rational flipped{0};
  Rational cheat{0};
};

std::optional<ExactRateSet> closed_form_rates_exact(ProtocolVariant variant, StrategyKind kind,
                                                    std::uint32_t l) {
  if (l > 62) return std::nullopt;
  try {
    ExactRateSet r;
    const Rational P(static_cast<std::int64_t>(1) << l);
    const Rational one(1);
    switch (kind) {
      case StrategyKind::Honest:
      case StrategyKind::BobMidpointStation:
        if (variant == ProtocolVariant::Symmetric) r.ambiguous = one / (P - one);
        r.success = one - r.ambiguous;
        break;
      case StrategyKind::AliceDifferentBit: r.cheat = one; break;
      case StrategyKind::AliceDifferentKeys: {
        Rational q = variant == ProtocolVariant::Symmetric
                         ? (P - Rational(2)) / ((P - one) * (P - one))
                         : one / (P - one);
        r.flipped = q;
        r.cheat = one - q;
        break;
      }
    }
    return r;
  } catch (const OverflowError&) {
    return std::nullopt;
  }
}

template <typename T>
std::array<T, 4> split_by_bit_mode(CommitBitMode mode, T success, T flipped, T ambiguous, T cheat, T half) {
  // slots: revealed0, revealed1, ambiguous, cheat
  std::array<T, 4> p{};
  switch (mode) {
    case CommitBitMode::Zero:
      p[0] = success;
      p[1] = flipped;
      break;
    case CommitBitMode::One:
      p[0] = flipped;
      p[1] = success;
      break;
    case CommitBitMode::Random:
      p[0] = (success + flipped) * half;
      p[1] = p[0];
      break;
  }
  p[2] = ambiguous;
  p[3] = cheat;
  return p;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ExpectedDistribution expected_distribution(ProtocolVariant variant, const AdversarySpec& strategy,
                                           CommitBitMode bit_mode, std::uint32_t l) {
  strategy.validate();
  ExpectedDistribution out;
  RateSet rates = closed_form_rates(variant, strategy.kind, l);
  out.p = split_by_bit_mode<double>(bit_mode, rates.success, rates.flipped, rates.ambiguous, rates.cheat, 0.5);

  if (strategy.kind == StrategyKind::AliceDifferentBit) {
    // per-station bits are strategy parameters; the bit mode plays no role
    out.p = {0.0, 0.0, 0.0, 1.0};
  }

  if (auto exact = closed_form_rates_exact(variant, strategy.kind, l)) {
    try {
      if (strategy.kind == StrategyKind::AliceDifferentBit) {
        out.exact = std::array<Rational, 4>{Rational(0), Rational(0), Rational(0), Rational(1)};
      } else {
        out.exact = split_by_bit_mode<Rational>(bit_mode, exact->success, exact->flipped, exact->ambiguous,
                                                exact->cheat, Rational(1, 2));
      }
    } catch (const OverflowError&) {
      out.exact.reset();
    }
  }
  return out;
}

Comparison compare(const std::array<std::uint64_t, 4>& counts, std::uint64_t trials,
                   const std::array<double, 4>& expected, double z_threshold) {
  if (trials == 0) throw Error("compare: no trials");
  Comparison cmp;
  cmp.consistent = true;
  const double n = static_cast<double>(trials);
  for (int slot = 0; slot < 4; ++slot) {
    const double p = expected[static_cast<std::size_t>(slot)];
    const double observed = static_cast<double>(counts[static_cast<std::size_t>(slot)]);
    double z = 0.0;
    if (p <= 0.0) {
      z = observed == 0.0 ? 0.0 : kImpossibleZ;
    } else if (p >= 1.0) {
      z = observed == n ? 0.0 : -kImpossibleZ;
    } else {
      z = (observed - n * p) / std::sqrt(n * p * (1.0 - p));
    }
    cmp.z[static_cast<std::size_t>(slot)] = z;
    cmp.max_abs_z = std::max(cmp.max_abs_z, std::abs(z));
  }
  cmp.consistent = cmp.max_abs_z <= z_threshold;
  return cmp;
}

namespace {

struct KnowledgeAccumulator {
  std::optional<Rational> time;
  bool conflict = false;
  std::uint64_t undetermined = 0;

  void add(const std::optional<Rational>& t) {
    if (!t) {
      ++undetermined;
      return;
    }
    if (!time) {
      time = *t;
    } else if (*time != *t) {
      conflict = true;
    }
  }

  void merge(const KnowledgeAccumulator& o) {
    undetermined += o.undetermined;
    conflict = conflict || o.conflict;
    if (o.time) add(o.time);
  }
};

struct WorkerPartial {
  std::array<std::uint64_t, 4> counts{};
  std::vector<KnowledgeAccumulator> knowledge;
};

}  // namespace

TrialReport run_trials(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  const std::uint64_t trials = config.trials;
  const unsigned jobs = std::max(1u, options.jobs);

  std::vector<StationId> observers{StationId::B1, StationId::B2};
  if (config.adversary.kind == StrategyKind::BobMidpointStation) observers.push_back(StationId::B3);

  std::vector<Transcript> transcripts;
  if (config.emit_transcript) transcripts.resize(trials);

  const unsigned worker_count = static_cast<unsigned>(std::min<std::uint64_t>(jobs, trials));
  std::vector<WorkerPartial> partials(worker_count);
  for (auto& p : partials) p.knowledge.resize(observers.size());
  std::vector<std::exception_ptr> failures(worker_count);

  auto work = [&](unsigned worker, std::uint64_t lo, std::uint64_t hi) {
    try {
      WorkerPartial& partial = partials[worker];
      for (std::uint64_t i = lo; i < hi; ++i) {
        RunSpec spec = config.run_spec_for_trial(i);
        spec.fault = options.fault;
        RunResult result = run_protocol(spec);
        if (config.variant == ProtocolVariant::Symmetric && *result.verdict_b1 != *result.verdict_b2) {
          throw Error("harness: B1 and B2 verdicts disagree");
        }
        ++partial.counts[static_cast<std::size_t>(result.final_verdict().slot())];
        for (std::size_t obs = 0; obs < observers.size(); ++obs) {
          partial.knowledge[obs].add(earliest_knowledge_time(result.transcript, observers[obs]));
        }
        if (config.emit_transcript) transcripts[i] = std::move(result.transcript);
      }
    } catch (...) {
      failures[worker] = std::current_exception();
    }
  };

  if (worker_count <= 1) {
    work(0, 0, trials);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    const std::uint64_t chunk = (trials + worker_count - 1) / worker_count;
    for (unsigned w = 0; w < worker_count; ++w) {
      std::uint64_t lo = chunk * w;
      std::uint64_t hi = std::min<std::uint64_t>(trials, lo + chunk);
      pool.emplace_back(work, w, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  for (auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  TrialReport report;
  report.config = config;
  report.trials = trials;
  report.seed = config.seed;
  report.fault = options.fault;
  std::vector<KnowledgeAccumulator> knowledge(observers.size());
  for (const auto& partial : partials) {
    for (int slot = 0; slot < 4; ++slot) {
      report.outcome_counts[static_cast<std::size_t>(slot)] += partial.counts[static_cast<std::size_t>(slot)];
    }
    for (std::size_t obs = 0; obs < observers.size(); ++obs) {
      knowledge[obs].merge(partial.knowledge[obs]);
    }
  }
  for (std::size_t obs = 0; obs < observers.size(); ++obs) {
    if (knowledge[obs].conflict) {
      throw Error("harness: knowledge time varies across trials for observer " +
                  std::string(station_name(observers[obs])));
    }
    report.knowledge_times[std::string(station_name(observers[obs]))] =
        KnowledgeSummary{knowledge[obs].time, knowledge[obs].undetermined};
  }

  report.ambiguity_rate = static_cast<double>(report.outcome_counts[2]) / static_cast<double>(trials);
  report.expected = expected_distribution(config.variant, config.adversary, config.b, config.l);

  RateSet rates = closed_form_rates(config.variant, config.adversary.kind, config.l);
  report.expected_rate.decimal = rates.ambiguous;
  report.expected_rate.derivation = "exact";
  if (auto exact = closed_form_rates_exact(config.variant, config.adversary.kind, config.l)) {
    report.expected_rate.value = exact->ambiguous;
  }
  report.paper_approx_rate.decimal = std::isfinite(pow2_double(config.l)) ? 1.0 / pow2_double(config.l) : 0.0;
  report.paper_approx_rate.derivation = "paper-approximation";
  if (config.l <= 62) {
    report.paper_approx_rate.value = Rational(1, static_cast<std::int64_t>(1) << config.l);
  }

  report.comparison = compare(report.outcome_counts, trials, report.expected.p);
  report.z_score = report.comparison.max_abs_z;
  report.transcripts = std::move(transcripts);
  return report;
}

namespace {

// index -> ordered distinct pair over [0, space)
std::pair<std::uint32_t, std::uint32_t> decode_pair(std::uint64_t idx, std::uint64_t space) {
  std::uint64_t first = idx / (space - 1);
  std::uint64_t rest = idx % (space - 1);
  std::uint64_t second = rest < first ? rest : rest + 1;
  return {static_cast<std::uint32_t>(first), static_cast<std::uint32_t>(second)};
}

}  // namespace

OutcomeDistribution engine_exhaustive_distribution(ProtocolVariant variant, const AdversarySpec& strategy,
                                                   int honest_b, std::uint32_t l, FaultInjection fault,
                                                   unsigned jobs) {
  if (l < 1 || l > 14) throw TooLarge("engine sweep: l out of enumerable range");
  strategy.validate();
  const std::uint64_t space = 1ull << l;
  const std::uint64_t pairs = space * (space - 1);
  const bool symmetric = variant == ProtocolVariant::Symmetric;
  const bool diff_key = strategy.kind == StrategyKind::AliceDifferentKeys;

  const std::uint64_t key_count = diff_key ? pairs : space;
  const std::uint64_t m_count = symmetric ? pairs : 1;
  constexpr std::uint64_t kBound = 1ull << 28;
  if (key_count > kBound / pairs || key_count * pairs > kBound / m_count) {
    throw TooLarge("engine sweep: tuple space too large");
  }
  const std::uint64_t total = key_count * pairs * m_count;

  const Geometry geometry(Rational(299792458), Rational(299792458));  // one light-second
  const unsigned worker_count = static_cast<unsigned>(
      std::min<std::uint64_t>(std::max(1u, jobs), total));

  std::vector<OutcomeDistribution> partials(worker_count);
  std::vector<std::exception_ptr> failures(worker_count);

  auto work = [&](unsigned worker, std::uint64_t lo, std::uint64_t hi) {
    try {
      OutcomeDistribution& dist = partials[worker];
      for (std::uint64_t idx = lo; idx < hi; ++idx) {
        std::uint64_t key_idx = idx / (pairs * m_count);
        std::uint64_t rest = idx % (pairs * m_count);
        std::uint64_t n_idx = rest / m_count;
        std::uint64_t m_idx = rest % m_count;

        ForcedChains forced;
        if (diff_key) {
          auto [k1, k2] = decode_pair(key_idx, space);
          forced.eta = BitChain::from_uint(k1, l);
          forced.eta2 = BitChain::from_uint(k2, l);
        } else {
          forced.eta = BitChain::from_uint(static_cast<std::uint64_t>(key_idx), l);
        }
        auto [n0, n1] = decode_pair(n_idx, space);
        forced.n_pair = {BitChain::from_uint(n0, l), BitChain::from_uint(n1, l)};
        if (symmetric) {
          auto [m0, m1] = decode_pair(m_idx, space);
          forced.m_pair = ChainPair{BitChain::from_uint(m0, l), BitChain::from_uint(m1, l)};
        }

        RunSpec spec;
        spec.variant = variant;
        spec.honest_b = honest_b;
        spec.geometry = geometry;
        spec.l = l;
        spec.adversary = strategy;
        spec.forced = std::move(forced);
        spec.fault = fault;
        RunResult result = run_protocol(spec);
        ++dist.counts[static_cast<std::size_t>(result.final_verdict().slot())];
        ++dist.total;
      }
    } catch (...) {
      failures[worker] = std::current_exception();
    }
  };

  if (worker_count <= 1) {
    work(0, 0, total);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    const std::uint64_t chunk = (total + worker_count - 1) / worker_count;
    for (unsigned w = 0; w < worker_count; ++w) {
      std::uint64_t lo = chunk * w;
      std::uint64_t hi = std::min<std::uint64_t>(total, lo + chunk);
      pool.emplace_back(work, w, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  for (auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  OutcomeDistribution out;
  for (const auto& partial : partials) {
    out.total += partial.total;
    for (int slot = 0; slot < 4; ++slot) {
      out.counts[static_cast<std::size_t>(slot)] += partial.counts[static_cast<std::size_t>(slot)];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// report serialization
// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json config_json(const ScenarioConfig& c) {
  nlohmann::ordered_json j;
  j["variant"] = std::string(variant_name(c.variant));
  j["l"] = c.l;
  j["d"] = c.d.to_fraction_string();
  j["c"] = c.c.to_fraction_string();
  j["delta"] = c.delta.to_fraction_string();
  j["adversary"] = c.adversary.to_string();
  j["b"] = std::string(commit_bit_mode_name(c.b));
  j["seed"] = c.seed;
  j["trials"] = c.trials;
  j["output"] = std::string(output_format_name(c.output));
  j["emit_transcript"] = c.emit_transcript;
  return j;
}

nlohmann::ordered_json rate_json(const TaggedRate& rate) {
  nlohmann::ordered_json j;
  if (rate.value) {
    j["value"] = rate.value->to_fraction_string();
  } else {
    j["value"] = nullptr;
  }
  j["decimal"] = rate.decimal;
  j["derivation"] = rate.derivation;
  return j;
}

}  // namespace

std::string TrialReport::to_json() const {
  nlohmann::ordered_json root;
  root["config"] = config_json(config);
  root["trials"] = trials;
  root["seed"] = seed;
  nlohmann::ordered_json counts;
  for (int slot = 0; slot < 4; ++slot) {
    counts[std::string(UnveilOutcome::kSlotNames[static_cast<std::size_t>(slot)])] =
        outcome_counts[static_cast<std::size_t>(slot)];
  }
  root["outcome_counts"] = std::move(counts);

  nlohmann::ordered_json ambiguity;
  ambiguity["rate"] = ambiguity_rate;
  ambiguity["expected_exact"] = rate_json(expected_rate);
  ambiguity["expected_paper"] = rate_json(paper_approx_rate);
  ambiguity["z"] = comparison.z[2];
  root["ambiguity"] = std::move(ambiguity);

  nlohmann::ordered_json expected_json;
  for (int slot = 0; slot < 4; ++slot) {
    nlohmann::ordered_json cell;
    cell["p"] = expected.p[static_cast<std::size_t>(slot)];
    if (expected.exact) {
      cell["exact"] = (*expected.exact)[static_cast<std::size_t>(slot)].to_fraction_string();
    } else {
      cell["exact"] = nullptr;
    }
    expected_json[std::string(UnveilOutcome::kSlotNames[static_cast<std::size_t>(slot)])] = std::move(cell);
  }
  root["expected_distribution"] = std::move(expected_json);

  nlohmann::ordered_json zs;
  for (int slot = 0; slot < 4; ++slot) {
    zs[std::string(UnveilOutcome::kSlotNames[static_cast<std::size_t>(slot)])] =
        comparison.z[static_cast<std::size_t>(slot)];
  }
  root["z_scores"] = std::move(zs);
  root["z_max_abs"] = comparison.max_abs_z;
  root["consistent"] = comparison.consistent;

  nlohmann::ordered_json kt;
  for (const auto& [name, summary] : knowledge_times) {
    nlohmann::ordered_json cell;
    if (summary.time) {
      cell["seconds"] = summary.time->to_fraction_string();
      cell["decimal"] = summary.time->to_decimal_string();
    } else {
      cell["seconds"] = nullptr;
      cell["decimal"] = nullptr;
    }
    cell["undetermined_trials"] = summary.undetermined_trials;
    kt[name] = std::move(cell);
  }
  root["knowledge_times"] = std::move(kt);

  if (fault != FaultInjection::None) root["fault"] = "flip-ambiguous";

  if (config.emit_transcript) {
    nlohmann::ordered_json ts = nlohmann::ordered_json::array();
    for (const auto& t : transcripts) ts.push_back(nlohmann::ordered_json::parse(t.to_json()));
    root["transcripts"] = std::move(ts);
  }
  return root.dump(2);
}

std::string TrialReport::csv_header() {
  return "variant,l,d,c,delta,adversary,b,seed,trials,"
         "revealed0,revealed1,ambiguous,cheat_detected,"
         "ambiguity_rate,expected_ambiguity_exact,expected_ambiguity_paper,"
         "z_revealed0,z_revealed1,z_ambiguous,z_cheat_detected,z_max_abs,consistent,"
         "kt_B1,kt_B1_undetermined,kt_B2,kt_B2_undetermined,kt_B3,kt_B3_undetermined";
}

std::string TrialReport::to_csv_row() const {
  std::ostringstream os;
  os << variant_name(config.variant) << ',' << config.l << ',' << config.d.to_fraction_string() << ','
     << config.c.to_fraction_string() << ',' << config.delta.to_fraction_string() << ','
     << config.adversary.to_string() << ',' << commit_bit_mode_name(config.b) << ',' << config.seed << ','
     << trials;
  for (int slot = 0; slot < 4; ++slot) os << ',' << outcome_counts[static_cast<std::size_t>(slot)];
  os << ',' << format_double(ambiguity_rate) << ',' << format_double(expected_rate.decimal) << ','
     << format_double(paper_approx_rate.decimal);
  for (int slot = 0; slot < 4; ++slot) os << ',' << format_double(comparison.z[static_cast<std::size_t>(slot)]);
  os << ',' << format_double(comparison.max_abs_z) << ',' << (comparison.consistent ? "true" : "false");
  for (const char* name : {"B1", "B2", "B3"}) {
    auto it = knowledge_times.find(name);
    if (it == knowledge_times.end()) {
      os << ",,";
      continue;
    }
    os << ',' << (it->second.time ? it->second.time->to_decimal_string() : "") << ','
       << it->second.undetermined_trials;
  }
  return os.str();
}

std::string TrialReport::to_text() const {
  std::ostringstream os;
  os << "scenario: variant=" << variant_name(config.variant) << " l=" << config.l
     << " d=" << config.d.to_fraction_string() << " c=" << config.c.to_fraction_string()
     << " delta=" << config.delta.to_fraction_string() << " adversary=" << config.adversary.to_string()
     << " b=" << commit_bit_mode_name(config.b) << " seed=" << seed << " trials=" << trials << "\n";
  if (fault != FaultInjection::None) os << "fault injection: flip-ambiguous (testing aid)\n";
  os << "outcomes:\n";
  for (int slot = 0; slot < 4; ++slot) {
    double rate = static_cast<double>(outcome_counts[static_cast<std::size_t>(slot)]) /
                  static_cast<double>(trials);
    os << "  " << UnveilOutcome::kSlotNames[static_cast<std::size_t>(slot)] << " "
       << outcome_counts[static_cast<std::size_t>(slot)] << " (" << format_double(rate) << ")\n";
  }
  os << "ambiguity: rate=" << format_double(ambiguity_rate) << " expected["
     << expected_rate.derivation << "]=" << (expected_rate.value ? expected_rate.value->to_fraction_string()
                                                                 : format_double(expected_rate.decimal))
     << " (" << format_double(expected_rate.decimal) << ")"
     << " expected[" << paper_approx_rate.derivation << "]="
     << (paper_approx_rate.value ? paper_approx_rate.value->to_fraction_string()
                                 : format_double(paper_approx_rate.decimal))
     << " (" << format_double(paper_approx_rate.decimal) << ")\n";
  os << "z: ";
  for (int slot = 0; slot < 4; ++slot) {
    os << UnveilOutcome::kSlotNames[static_cast<std::size_t>(slot)] << "="
       << format_double(comparison.z[static_cast<std::size_t>(slot)]) << " ";
  }
  os << "max|z|=" << format_double(comparison.max_abs_z) << "\n";
  os << "consistent: " << (comparison.consistent ? "yes" : "no") << "\n";
  os << "knowledge times:\n";
  for (const auto& [name, summary] : knowledge_times) {
    os << "  " << name << ": ";
    if (summary.time) {
      os << summary.time->to_decimal_string() << " s (exact " << summary.time->to_fraction_string() << ")";
    } else {
      os << "never determined";
    }
    os << ", undetermined in " << summary.undetermined_trials << " trial(s)\n";
  }
  if (config.emit_transcript) {
    for (std::size_t i = 0; i < transcripts.size(); ++i) {
      os << "transcript[" << i << "]:\n" << transcripts[i].to_text();
    }
  }
  return os.str();
}

}  // namespace relbc
