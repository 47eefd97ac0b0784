#include <benchmark/benchmark.h>

#include "qtrace/geodesics.hpp"
#include "qtrace/kloosterman.hpp"
#include "qtrace/modforms.hpp"
#include "qtrace/quadforms.hpp"
#include "qtrace/spectral.hpp"

using namespace qtrace;

static void BM_SPlusFast(benchmark::State& state) {
  const auto q = KloostermanQuery::make(Weight::plus_half(), 1, 5, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(s_plus_fast(q));
}
BENCHMARK(BM_SPlusFast)->Arg(1024)->Arg(65536)->Arg(1 << 20);

static void BM_SPlusNaive(benchmark::State& state) {
  const auto q = KloostermanQuery::make(Weight::plus_half(), 1, 5, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(s_plus(q));
}
BENCHMARK(BM_SPlusNaive)->Arg(1024)->Arg(65536);

static void BM_WeylSum(benchmark::State& state) {
  const auto spec = GenusCharacterSpec::make(21, -3);
  for (auto _ : state) benchmark::DoNotOptimize(weyl_sum(1, spec, state.range(0)));
}
BENCHMARK(BM_WeylSum)->Arg(1024)->Arg(65536)->Arg(1 << 20);

static void BM_PartialSums(benchmark::State& state) {
  const auto fam = SumFamily::kloosterman(Weight::plus_half(), 1, 5);
  StreamOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(partial_sums(fam, static_cast<double>(state.range(0)), opts));
}
BENCHMARK(BM_PartialSums)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_ClassCycleIntegral(benchmark::State& state) {
  const auto cycle = zagier_cycles(state.range(0)).front();
  QuadratureSpec spec;
  // Past sqrt(D) = 6 double evaluation cannot reach 1e-8; the horoball route is timed there instead.
  const bool extended = state.range(0) > 36;
  spec.abs_tol = extended ? 1e-7 : 1e-8;
  if (extended) spec.precision_mode = PrecisionMode::extended;
  for (auto _ : state) benchmark::DoNotOptimize(class_cycle_integral(cycle, 1, spec));
}
BENCHMARK(BM_ClassCycleIntegral)->Arg(5)->Arg(17)->Arg(61)->Unit(benchmark::kMillisecond);

static void BM_TraceSeries(benchmark::State& state) {
  TraceSettings s;
  s.cutoff = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(trace_cycle(229, 1, 1, TraceMethod::series, s));
}
BENCHMARK(BM_TraceSeries)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_CmTrace(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cm_trace(-state.range(0), 1));
}
BENCHMARK(BM_CmTrace)->Arg(23)->Arg(2999)->Unit(benchmark::kMicrosecond);

static void BM_PhiPlusSeries(benchmark::State& state) {
  const auto q = PhiPlusQuery::make(5, 1.25, static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(phi_plus_series(q));
}
BENCHMARK(BM_PhiPlusSeries)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
