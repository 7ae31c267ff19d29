#include <benchmark/benchmark.h>

#include "einsym/determining.hpp"
#include "einsym/geometry.hpp"
#include "einsym/liealg.hpp"
#include "einsym/oracle.hpp"
#include "einsym/prolongation.hpp"

using namespace einsym;

namespace {

void BM_EinsteinSystem(benchmark::State& state) {
  const MetricContext ctx(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(einstein_system(ctx));
}
BENCHMARK(BM_EinsteinSystem)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_ExactInverse(benchmark::State& state) {
  const MetricContext ctx(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(exact_inverse(ctx));
}
BENCHMARK(BM_ExactInverse)->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);

void BM_ProlongationTables(benchmark::State& state) {
  const MetricContext ctx(static_cast<int>(state.range(0)));
  const VectorField vf = generic_field(ctx);
  const auto route = state.range(1) == 0 ? Route::Expanded : Route::Total;
  for (auto _ : state) benchmark::DoNotOptimize(ProlongationTables(ctx, vf, route));
}
BENCHMARK(BM_ProlongationTables)->ArgsProduct({{2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ProlongEinstein(benchmark::State& state) {
  const MetricContext ctx(static_cast<int>(state.range(0)));
  const ProlongationTables tables(ctx, generic_field(ctx));
  for (auto _ : state) benchmark::DoNotOptimize(prolong_einstein(ctx, tables));
}
BENCHMARK(BM_ProlongEinstein)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

void BM_ExtractDgDdg(benchmark::State& state) {
  const MetricContext ctx(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(extract_dg_ddg(ctx));
}
BENCHMARK(BM_ExtractDgDdg)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

// The two-dimensional Einstein tensor R_11 - 1/2 g_11 g^{ab} R_ab.
void BM_ZeroModInverse(benchmark::State& state) {
  const MetricContext ctx(2);
  Expr scalar;
  for (int a = 1; a <= 2; ++a) {
    for (int b = 1; b <= 2; ++b) scalar += sym::gi(a, b) * ricci(ctx, a, b);
  }
  const Expr g = ricci(ctx, 1, 1) - Rational(1, 2) * sym::g(1, 1) * scalar;
  for (auto _ : state) benchmark::DoNotOptimize(is_zero_mod_inverse(ctx, g));
}
BENCHMARK(BM_ZeroModInverse)->Unit(benchmark::kMillisecond);

void BM_GctResidual(benchmark::State& state) {
  const MetricContext ctx(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(verify_gct_symmetry(ctx, 1, {{1, 1}}));
}
BENCHMARK(BM_GctResidual)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

void BM_OracleSample(benchmark::State& state) {
  const MetricContext ctx(static_cast<int>(state.range(0)));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample(ctx, seed++));
}
BENCHMARK(BM_OracleSample)->DenseRange(2, 4)->Unit(benchmark::kMicrosecond);

void BM_OracleRicci(benchmark::State& state) {
  const MetricContext ctx(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_oracle(ctx, "ricci", 10, 1, 1));
}
BENCHMARK(BM_OracleRicci)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
