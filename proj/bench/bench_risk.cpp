#include "fbmjs/drift_girsanov.hpp"
#include "fbmjs/risk_engine.hpp"

#include <benchmark/benchmark.h>

using namespace fbmjs;

namespace {

ExecPolicy policy_of(const benchmark::State& state) {
  return state.range(0) == 0 ? ExecPolicy::serial : ExecPolicy::parallel;
}

void BM_QuadraticRisk(benchmark::State& state) {
  const FbmModel model{3, 0.25, 1.0, 256};
  const auto estimator = make_estimator({"js"}, model.H);
  const auto drift = builtin_drift(DriftKind::linear, model);
  const McSettings mc{SimMethod::circulant, 4000, 7, policy_of(state)};
  for (auto _ : state) benchmark::DoNotOptimize(quadratic_risk_mc(estimator, drift, model, mc));
  state.SetItemsProcessed(state.iterations() * mc.n_reps);
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_DominanceBatch(benchmark::State& state) {
  const FbmModel model{3, 0.25, 1.0, 256};
  const auto cases = standard_sweep_cases(model);
  const McSettings mc{SimMethod::circulant, 2000, 7, policy_of(state)};
  for (auto _ : state) benchmark::DoNotOptimize(risk_difference_batch(cases, model, mc));
  state.SetItemsProcessed(state.iterations() * mc.n_reps);
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_GirsanovMeanOne(benchmark::State& state) {
  const FbmModel model{1, 0.25, 1.0, 512};
  const auto drift = builtin_drift(DriftKind::power2H, model, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(girsanov_mean_one_check(drift, model, 4000, 7, policy_of(state)));
  state.SetItemsProcessed(state.iterations() * 4000);
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

}  // namespace

BENCHMARK(BM_QuadraticRisk)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_DominanceBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_GirsanovMeanOne)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
