#include <benchmark/benchmark.h>

#include "labandit/asymptotic_value.hpp"
#include "labandit/exact_dp.hpp"
#include "labandit/montecarlo.hpp"
#include "labandit/obm.hpp"

using namespace labandit;

namespace {

Environment reference_env() {
  return NoLearningEnv::make({
      ArmSpec{"narrow", {make_rational(-1, 2), make_rational(1, 2)}, {0.5, 0.5}},
      ArmSpec{"wide", {make_rational(-1, 1), make_rational(1, 1)}, {0.5, 0.5}},
  });
}

const UtilityIndex& reference_utility() {
  static const UtilityIndex u = make_utility(Phi1Spec::exponential(), 0.0, 0.5);
  return u;
}

void BM_ValueNoLearning(benchmark::State& state) {
  const auto env = reference_env();
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(value_n(env, reference_utility(), n).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ValueNoLearning)->RangeMultiplier(4)->Range(256, 16384)->Complexity()
    ->Unit(benchmark::kMillisecond);

void BM_ValueLearning(benchmark::State& state) {
  const Environment env = TwoArmedEnv::make(0.2, 0.8, 0.5);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(value_n(env, reference_utility(), n).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ValueLearning)->RangeMultiplier(2)->Range(16, 128)->Complexity()
    ->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const auto env = reference_env();
  SimOptions options;
  options.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        simulate_paths(env, Strategy::s_star_no_learn(), reference_utility(), 1000, 1000, 7, options)
            .value_estimate);
  }
  state.SetItemsProcessed(state.iterations() * 1000 * 1000);
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

void BM_ValueQuadrature(benchmark::State& state) {
  const auto params = ObmParams::make(0.5, 1.0, 0.0);
  const auto u = make_utility(Phi1Spec::exponential(), 0.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(value_by_quadrature(u, params).v);
}
BENCHMARK(BM_ValueQuadrature);

void BM_Time1Pdf(benchmark::State& state) {
  const auto params = ObmParams::make(0.5, 1.0, 0.3);
  double y = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(time1_pdf(params, y));
    y = y > 3.0 ? -3.0 : y + 1e-3;
  }
}
BENCHMARK(BM_Time1Pdf);

}  // namespace

BENCHMARK_MAIN();
