#include <benchmark/benchmark.h>

#include "pilot/conjugate.hpp"
#include "pilot/hierarchical.hpp"
#include "pilot/mcmc.hpp"
#include "pilot/oc_engine.hpp"
#include "pilot/special.hpp"

namespace {

void BM_BetaCdf(benchmark::State& state) {
  double x = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pilot::beta_cdf(x, 41.0, 21.0));
    x = x > 0.98 ? 0.01 : x + 0.0137;
  }
}
BENCHMARK(BM_BetaCdf);

void BM_ExactPG(benchmark::State& state) {
  pilot::ConjugateScenario s;
  int x = 0;
  for (auto _ : state) {
    const pilot::ConjugateData d{40 + x % 20, 60, 20 + x % 10, 30};
    benchmark::DoNotOptimize(pilot::exact_pG(d, s));
    ++x;
  }
}
BENCHMARK(BM_ExactPG);

void BM_ConjugateMatrix(benchmark::State& state) {
  const pilot::Scenario s = pilot::ConjugateScenario{};
  for (auto _ : state) {
    benchmark::DoNotOptimize(pilot::build_matrix(s, state.range(0), 7, 1));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConjugateMatrix)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_OcsForLoss(benchmark::State& state) {
  const pilot::Scenario s = pilot::ConjugateScenario{};
  const auto m = pilot::build_matrix(s, state.range(0), 11, 1);
  const auto c = pilot::binary_loss(0.2);
  for (auto _ : state) benchmark::DoNotOptimize(pilot::ocs_for_loss(m, c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OcsForLoss)->Arg(10000)->Arg(100000);

void BM_HierPosterior(benchmark::State& state) {
  pilot::HierDesignPrior design;
  pilot::RngStream rng(3, 0);
  const pilot::HierParams theta = pilot::draw_design_prior(design, rng);
  const pilot::HierDataset data = pilot::simulate_trial(theta, static_cast<int>(state.range(0)), rng);
  const auto prior = pilot::make_analysis_prior(pilot::AnalysisPreset::WI, design);
  pilot::McmcConfig mcmc;
  mcmc.iterations = 1000;
  mcmc.burnin = 500;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pilot::posterior_sample(data, prior, mcmc, pilot::RngStream(5, 1)));
  }
}
BENCHMARK(BM_HierPosterior)->Arg(6)->Arg(18)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
