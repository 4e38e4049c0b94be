// Serial vs OpenMP kernels: the property suites and the seed sweep.

#include <benchmark/benchmark.h>

#include "ppfpose/sim.hpp"
#include "ppfpose/verify.hpp"

using namespace ppfpose;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::kSerial : Execution::kParallel;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "openmp");
}

template <const char* Suite>
void BM_Suite(benchmark::State& state) {
  const auto trials = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    const SuiteResult r = run_suite(Suite, trials, 1, mode(state));
    benchmark::DoNotOptimize(r.worst);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(1));
  label(state);
}

constexpr char kLemma1[] = "lemma1";
constexpr char kTrace[] = "trace";
constexpr char kTransform[] = "transform";
constexpr char kWahba[] = "wahba";

BENCHMARK_TEMPLATE(BM_Suite, kLemma1)->Args({0, 100000})->Args({1, 100000})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Suite, kTrace)->Args({0, 10000})->Args({1, 10000})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Suite, kTransform)->Args({0, 10000})->Args({1, 10000})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Suite, kWahba)->Args({0, 1000})->Args({1, 1000})->Unit(benchmark::kMillisecond);

void BM_SeedSweep(benchmark::State& state) {
  std::vector<ScenarioConfig> cfgs;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    ScenarioConfig c = paper_scenario();
    c.seed = seed;
    c.duration = 2.0;
    cfgs.push_back(c);
  }
  for (auto _ : state) {
    const auto recs = run_scenarios(cfgs, mode(state));
    benchmark::DoNotOptimize(recs.data());
  }
  label(state);
}
BENCHMARK(BM_SeedSweep)->Args({0})->Args({1})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
