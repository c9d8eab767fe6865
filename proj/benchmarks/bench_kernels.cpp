#include "elastowave/scenario.hpp"
#include "elastowave/spectral_basis.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace ew = elastowave;

namespace {

ew::ScenarioConfig box_config(double h, int degree) {
  auto c = ew::preset("verification-matching");
  c = ew::with_meshsize(c, h);
  return ew::with_degree(c, degree);
}

}  // namespace

static void BM_GllRule(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ew::gll_rule(n));
}
BENCHMARK(BM_GllRule)->DenseRange(2, 10, 4);

static void BM_ElasticStiffnessApply(benchmark::State& state) {
  const auto d = ew::discretize(box_config(0.2, static_cast<int>(state.range(0))));
  const auto& k = *d.operators.stiffness_e;
  std::vector<double> x(static_cast<std::size_t>(k.cols()), 1.0);
  std::vector<double> y(static_cast<std::size_t>(k.rows()));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.1 * static_cast<double>(i));
  for (auto _ : state) {
    k.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_ElasticStiffnessApply)->DenseRange(2, 6, 2)->Unit(benchmark::kMicrosecond);

static void BM_AcousticStiffnessApply(benchmark::State& state) {
  const auto d = ew::discretize(box_config(0.2, static_cast<int>(state.range(0))));
  const auto& k = *d.operators.stiffness_a;
  std::vector<double> x(static_cast<std::size_t>(k.cols()));
  std::vector<double> y(static_cast<std::size_t>(k.rows()));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::cos(0.1 * static_cast<double>(i));
  for (auto _ : state) {
    k.apply(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.size()));
}
BENCHMARK(BM_AcousticStiffnessApply)->DenseRange(2, 6, 2)->Unit(benchmark::kMicrosecond);

static void BM_NewmarkStep(benchmark::State& state) {
  const auto cfg = box_config(0.2, static_cast<int>(state.range(0)));
  const auto d = ew::discretize(cfg);
  const auto model = ew::make_model(cfg);
  auto loads = std::make_shared<ew::LoadAssembler>(*d.mesh, *d.elastic, *d.acoustic, d.faces, d.materials, model,
                                                   std::vector<ew::RickerSource>{});
  const ew::DiscreteForcing forcing(loads, d.elastic, d.acoustic, model);
  auto s = ew::interpolate_state(d, *model, 0.0);
  ew::initial_accelerations(d.operators, forcing, s);
  ew::NewmarkStepper stepper(d.operators, forcing);
  for (auto _ : state) stepper.step(s, 1e-5);
}
BENCHMARK(BM_NewmarkStep)->DenseRange(2, 4, 1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
