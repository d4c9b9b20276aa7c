#include <benchmark/benchmark.h>

#include "boolperc/connectivity.hpp"
#include "boolperc/estimators.hpp"
#include "boolperc/geometry.hpp"
#include "boolperc/measure.hpp"

namespace bp = boolperc;

namespace {

void BM_SampleBoolean(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0));
  bp::RadiusMeasure mu = bp::RadiusMeasure::delta(1.0, 0.35);
  bp::StreamKey key = bp::master_stream(99);
  std::uint64_t i = 0;
  for (auto _ : state) {
    bp::Realization r = bp::sample_boolean(mu, a, 2, key.child(i++));
    benchmark::DoNotOptimize(r.size());
  }
}
BENCHMARK(BM_SampleBoolean)->Arg(8)->Arg(32)->Arg(128);

void BM_ComponentsGrid(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0));
  bp::RadiusMeasure mu = bp::RadiusMeasure::delta(1.0, 0.35);
  bp::Realization r = bp::sample_boolean(mu, a, 2, bp::master_stream(7));
  for (auto _ : state) {
    bp::ComponentStructure cs = bp::ComponentStructure::build(r);
    benchmark::DoNotOptimize(cs.crossing_event(0.5 * a, a));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(r.size()));
}
BENCHMARK(BM_ComponentsGrid)->Arg(16)->Arg(64)->Arg(256);

void BM_ComponentsBrute(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0));
  bp::RadiusMeasure mu = bp::RadiusMeasure::delta(1.0, 0.35);
  bp::Realization r = bp::sample_boolean(mu, a, 2, bp::master_stream(7));
  for (auto _ : state) {
    bp::ComponentStructure cs = bp::ComponentStructure::build_brute_force(r);
    benchmark::DoNotOptimize(cs.crossing_event(0.5 * a, a));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(r.size()));
}
BENCHMARK(BM_ComponentsBrute)->Arg(16)->Arg(64);

void BM_MultiscaleSample(benchmark::State& state) {
  const int levels = static_cast<int>(state.range(0));
  bp::MultiscaleSpec spec{bp::RadiusMeasure::delta(1.0), 2.0, levels};
  bp::StreamKey key = bp::master_stream(3);
  std::uint64_t i = 0;
  for (auto _ : state) {
    bp::Realization r = bp::sample_multiscale(spec, 0.08, 16.0, 2, key.child(i++));
    benchmark::DoNotOptimize(r.size());
  }
}
BENCHMARK(BM_MultiscaleSample)->Arg(1)->Arg(3)->Arg(5);

void BM_MultiscaleTailMoment(benchmark::State& state) {
  bp::RadiusMeasure mu = bp::RadiusMeasure::atomic(
      {{0.5, 2.0, 0, 0}, {1.0, 1.0, 0, 0}, {3.0, 0.25, 0, 0}});
  for (auto _ : state)
    benchmark::DoNotOptimize(bp::multiscale_tail_moment(mu, 2.0, 1.0, 2));
}
BENCHMARK(BM_MultiscaleTailMoment);

}  // namespace

BENCHMARK_MAIN();
