// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "dpsn/features.hpp"
#include "dpsn/graphlets.hpp"
#include "dpsn/psn.hpp"
#include "dpsn/static_graphlets.hpp"

namespace {

const dpsn::DynamicOrbitTable& table() {
  static const auto t = dpsn::DynamicOrbitTable::enumerate({});
  return t;
}

const std::vector<dpsn::ProteinDomain>& corpus() {
  static const auto c = dpsn::generate_synthetic_corpus({7, 3, 30, 120, 200, 30, 0.15});
  return c;
}

const dpsn::EventStream& stream() {
  static const auto s = dpsn::derive_event_stream(dpsn::build_dynamic_psn(corpus().front(), 5));
  return s;
}

void BM_DynamicSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(dpsn::count_dynamic_orbits_serial(stream(), table()));
}
void BM_DynamicParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(dpsn::count_dynamic_orbits(stream(), table()));
}

void BM_StaticSerial(benchmark::State& st) {
  static const auto t = dpsn::StaticOrbitTable::enumerate(5);
  const auto g = dpsn::build_static_psn(corpus().front());
  for (auto _ : st) benchmark::DoNotOptimize(dpsn::count_static_orbits_serial(g, t));
}
void BM_StaticParallel(benchmark::State& st) {
  static const auto t = dpsn::StaticOrbitTable::enumerate(5);
  const auto g = dpsn::build_static_psn(corpus().front());
  for (auto _ : st) benchmark::DoNotOptimize(dpsn::count_static_orbits(g, t));
}

std::vector<dpsn::Gdvm> gdvms() {
  std::vector<dpsn::Gdvm> out;
  for (std::size_t i = 0; i < 24; ++i)
    out.push_back(dpsn::count_dynamic_orbits(dpsn::derive_event_stream(dpsn::build_dynamic_psn(corpus()[i], 5)), table()));
  return out;
}

void BM_GcmSerial(benchmark::State& st) {
  static const auto g = gdvms();
  static const auto f = dpsn::fit_column_filter(g);
  for (auto _ : st) benchmark::DoNotOptimize(dpsn::gcm_features_serial(g, f, dpsn::CorrelationKind::kSpearman));
}
void BM_GcmParallel(benchmark::State& st) {
  static const auto g = gdvms();
  static const auto f = dpsn::fit_column_filter(g);
  for (auto _ : st) benchmark::DoNotOptimize(dpsn::gcm_features(g, f, dpsn::CorrelationKind::kSpearman));
}

}  // namespace

BENCHMARK(BM_DynamicSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DynamicParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StaticSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StaticParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GcmSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GcmParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
