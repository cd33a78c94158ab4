#include <benchmark/benchmark.h>

#include "lossguard/analytics.hpp"
#include "lossguard/chainsim.hpp"
#include "lossguard/channel.hpp"
#include "lossguard/losscode.hpp"

using namespace lossguard;

namespace {

PureState sample_codeword() {
  RandomStream rng(1);
  return losscode::encode(PureState::random(2, rng));
}

void BM_RecoverDensityMatrix(benchmark::State& state) {
  const auto damaged = partial_trace(DensityMatrix::from_pure(sample_codeword()), 2);
  RandomStream rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(losscode::recover(damaged, 2, rng));
}
BENCHMARK(BM_RecoverDensityMatrix);

void BM_RecoverPurified(benchmark::State& state) {
  const auto encoded = sample_codeword();
  RandomStream rng(3);
  for (auto _ : state) benchmark::DoNotOptimize(losscode::recover_purified(encoded, 2, rng));
}
BENCHMARK(BM_RecoverPurified);

void BM_DeriveCorrectionTable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(losscode::derive_correction_table(3));
}
BENCHMARK(BM_DeriveCorrectionTable);

void BM_Stage(benchmark::State& state) {
  const auto encoded = sample_codeword();
  const channel::SegmentModel segment(1.0 / 30.0, 10.0);
  channel::GateModel gates;
  gates.params.n = 160;
  gates.params.eta = 1.0 - 1e-5;
  gates.mode = state.range(0) == 0 ? channel::GateFailureMode::aggregate : channel::GateFailureMode::per_gate;
  RandomStream rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(channel::stage(encoded, segment, gates, rng));
}
BENCHMARK(BM_Stage)->Arg(0)->Arg(1)->ArgName("per_gate");

void BM_MinROverX(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(analytics::min_r_over_x(0.9));
}
BENCHMARK(BM_MinROverX);

void BM_ThresholdSearch(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(analytics::threshold_n());
}
BENCHMARK(BM_ThresholdSearch);

void BM_RunChain(benchmark::State& state) {
  chainsim::ChainConfig c;
  c.trials = 10'000;
  c.num_stages = 5;
  c.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(chainsim::run_chain(c));
  state.SetItemsProcessed(state.iterations() * c.trials);
}
BENCHMARK(BM_RunChain)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
