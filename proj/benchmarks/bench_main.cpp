#include "nearcomm/berg_normalizer.hpp"
#include "nearcomm/exchange_process.hpp"
#include "nearcomm/ogata_pipeline.hpp"
#include "nearcomm/shift_algebra.hpp"
#include "nearcomm/spin_core.hpp"
#include "nearcomm/tensor_verifier.hpp"

#include <benchmark/benchmark.h>

using namespace nearcomm;

namespace {

ShiftSystem motivation_system() {
  std::vector<IrrepSpec> spins;
  for (long long l = 1900; l <= 4900; l += 500) spins.push_back(IrrepSpec{HalfInt{2 * l}});
  return build_system(spins, 4900).second;
}

void BM_MultiplicityTable(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(multiplicity_table(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_MultiplicityTable)->Arg(64)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_NormalizeShift(benchmark::State& state) {
  const BilateralShift s = davidson_profile(static_cast<int>(state.range(0)), 0.55);
  for (auto _ : state) benchmark::DoNotOptimize(normalize_shift(s, 16));
}
BENCHMARK(BM_NormalizeShift)->Arg(4096)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

void BM_NearestNormal(benchmark::State& state) {
  const BilateralShift s = random_smooth_profile(static_cast<int>(state.range(0)), 1e-5, 1);
  for (auto _ : state) benchmark::DoNotOptimize(nearest_normal(s));
}
BENCHMARK(BM_NearestNormal)->Arg(4096)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

void BM_GepMotivation(benchmark::State& state) {
  const ShiftSystem s = motivation_system();
  const WindowPartition p = uniform_partition(s, 99);
  for (auto _ : state) benchmark::DoNotOptimize(gep(s, p));
}
BENCHMARK(BM_GepMotivation)->Unit(benchmark::kMillisecond);

void BM_SnearbyMotivation(benchmark::State& state) {
  SnearbyParams p;
  for (long long l = 1900; l <= 4900; l += 500) p.spins.push_back(HalfInt{2 * l});
  p.N = 4900;
  p.delta = 99.0 / 4900;
  p.ell = 500;
  for (auto _ : state) benchmark::DoNotOptimize(snearby(p));
}
BENCHMARK(BM_SnearbyMotivation)->Unit(benchmark::kMillisecond);

void BM_OgataConstruct(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ogata_construct(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_OgataConstruct)->Arg(11)->Arg(1001)->Arg(100001)->Unit(benchmark::kMillisecond);

void BM_DecompositionUnitary(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(decomposition_unitary(static_cast<int>(state.range(0))));
}
BENCHMARK(BM_DecompositionUnitary)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_VerifyFull(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const OgataResult r = ogata_construct(N);
  const DecompositionUnitary u = decomposition_unitary(N);
  for (auto _ : state) benchmark::DoNotOptimize(verify_full(r, u));
}
BENCHMARK(BM_VerifyFull)->Arg(7)->Arg(9)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
