#include <benchmark/benchmark.h>

#include "levelgauss/coupling.hpp"
#include "levelgauss/gaussian_identities.hpp"
#include "levelgauss/levelset.hpp"
#include "levelgauss/transport.hpp"

namespace lg = levelgauss;

namespace {

void BM_GridEvaluation(benchmark::State& state) {
  const auto field = lg::SampledField::sample(lg::rpw_circle(64), 1);
  const lg::Domain dom{5.0, 2, static_cast<int>(state.range(0))};
  const auto nodes = dom.nodes();
  const auto order = static_cast<lg::JetOrder>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(field.sample_grid(nodes, nodes, order));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_GridEvaluation)->Args({128, 0})->Args({512, 0})->Args({512, 2})->Unit(benchmark::kMillisecond);

void BM_LevelLength(benchmark::State& state) {
  const auto field = lg::SampledField::sample(lg::rpw_circle(64), 2);
  const lg::Domain dom{5.0, 2, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(lg::level_length(field, dom, 0.0));
}
BENCHMARK(BM_LevelLength)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_IdentityReport(benchmark::State& state) {
  const auto field = lg::SampledField::sample(lg::rpw_circle(64), 3);
  const lg::Domain dom{4.0, 2, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(lg::identity_report(field, dom, 0.0, 0.5));
}
BENCHMARK(BM_IdentityReport)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_OptimalCoupling(benchmark::State& state) {
  const auto m1 = lg::rpw_circle(static_cast<int>(state.range(0)));
  const auto m2 = lg::angular_jitter(m1, 0.05, 7);
  for (auto _ : state) benchmark::DoNotOptimize(lg::optimal_coupling(m1, m2));
}
BENCHMARK(BM_OptimalCoupling)->Arg(16)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_CouplingDiagnostics(benchmark::State& state) {
  const auto m1 = lg::rpw_circle(64);
  const auto m2 = lg::dilate(m1, 1.01);
  const auto plan = lg::optimal_coupling(m1, m2);
  const auto cp = lg::couple(m1, m2, plan, 4);
  const lg::Domain dom{4.0, 2, 128};
  for (auto _ : state) benchmark::DoNotOptimize(lg::diagnostics(cp, dom));
}
BENCHMARK(BM_CouplingDiagnostics)->Unit(benchmark::kMillisecond);

void BM_ExpectedGradientNormMc(benchmark::State& state) {
  Eigen::Matrix2d lambda;
  lambda << 0.7, 0.1, 0.1, 0.3;
  for (auto _ : state)
    benchmark::DoNotOptimize(lg::expected_gradient_norm(lambda, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_ExpectedGradientNormMc)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
