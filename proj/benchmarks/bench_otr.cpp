#include <benchmark/benchmark.h>

#include "otr/inference.hpp"
#include "otr/objective.hpp"
#include "otr/optimizer.hpp"
#include "otr/oracle.hpp"
#include "otr/simulate.hpp"

namespace {

otr::Dataset sample(otr::Setting setting, Eigen::Index n, Eigen::Index columns = 4) {
  otr::SimulationSpec spec;
  spec.setting = setting;
  spec.n = n;
  auto rng = otr::make_stream(17);
  auto data = otr::generate_dataset(spec, rng).data;
  if (columns == 4) return data;
  return otr::Dataset(data.covariates().leftCols(columns), data.treatment(), data.outcome(), {}, 1, true);
}

void BM_ObjectiveAndGradient(benchmark::State& state) {
  const auto data = sample(otr::Setting::s1, state.range(0));
  const otr::ObjectiveContext ctx(data, otr::SmoothingKernel{}, 0.5);
  const Eigen::Vector4d beta{-1, -1, 1, 1};
  for (auto _ : state) benchmark::DoNotOptimize(otr::evaluate_objective(ctx, beta));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ObjectiveAndGradient)->Arg(300)->Arg(1000)->Arg(10000);

void BM_EstimateRegime(benchmark::State& state) {
  const auto data = sample(otr::Setting::s1, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(otr::estimate_regime(data, otr::SmoothingKernel{}, {}));
}
BENCHMARK(BM_EstimateRegime)->Arg(300)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Bootstrap(benchmark::State& state) {
  const auto data = sample(otr::Setting::s2, 500);
  otr::BootstrapConfig boot;
  boot.replicates = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(otr::run_bootstrap(data, otr::SmoothingKernel{}, {}, boot));
}
BENCHMARK(BM_Bootstrap)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Oracle(benchmark::State& state) {
  const auto data = sample(otr::Setting::s1, state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(otr::exact_nonsmooth_argmax(data));
}
BENCHMARK(BM_Oracle)->Arg(30)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
