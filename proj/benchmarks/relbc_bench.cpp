#include <benchmark/benchmark.h>

#include "relbc/bitchain.hpp"
#include "relbc/harness.hpp"
#include "relbc/oracle.hpp"
#include "relbc/protocol.hpp"

namespace {

using namespace relbc;

void BM_ChainXor(benchmark::State& state) {
  RngStream rng(1);
  const std::uint32_t l = static_cast<std::uint32_t>(state.range(0));
  BitChain a = BitChain::random(l, rng);
  BitChain b = BitChain::random(l, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(a ^ b);
  }
}
BENCHMARK(BM_ChainXor)->Arg(16)->Arg(64)->Arg(256);

void BM_SingleRun(benchmark::State& state) {
  RunSpec spec;
  spec.geometry = Geometry(Rational(299792458), Rational(299792458));
  spec.l = static_cast<std::uint32_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    spec.seed = seed++;
    benchmark::DoNotOptimize(run_protocol(spec));
  }
}
BENCHMARK(BM_SingleRun)->Arg(8)->Arg(16)->Arg(64);

void BM_RunTrialsBatch(benchmark::State& state) {
  ScenarioConfig config;
  config.l = 16;
  config.trials = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    config.seed++;
    benchmark::DoNotOptimize(run_trials(config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunTrialsBatch)->Arg(100)->Arg(1000);

void BM_ExhaustiveOracle(benchmark::State& state) {
  const std::uint32_t l = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(exhaustive_oracle(ProtocolVariant::Symmetric, AdversarySpec{}, 0, l));
  }
}
BENCHMARK(BM_ExhaustiveOracle)->Arg(3)->Arg(4);

void BM_EngineSweep(benchmark::State& state) {
  const std::uint32_t l = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        engine_exhaustive_distribution(ProtocolVariant::Symmetric, AdversarySpec{}, 0, l));
  }
}
BENCHMARK(BM_EngineSweep)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
