#include <benchmark/benchmark.h>

#include "fqhe/curvature.hpp"

using namespace fqhe;

static void BM_OneParticleGram(benchmark::State& state) {
    const TorusParams torus{cplx(0.0, 1.0)};
    const LineBundleSpec spec{torus, 3, 0.2, 0.1, false};
    const GridSpec grid{static_cast<int>(state.range(0)), 2};
    for (auto _ : state)
        benchmark::DoNotOptimize(one_particle_gram(spec, grid));
    state.SetItemsProcessed(state.iterations() * grid.points_per_axis * grid.points_per_axis);
}
BENCHMARK(BM_OneParticleGram)->Arg(32)->Arg(64);

static void BM_SlaterNormGrid(benchmark::State& state) {
    const TorusParams torus{cplx(0.0, 1.0)};
    const LineBundleSpec spec{torus, 2, 0.0, 0.0, false};
    IntegrationBudget budget;
    budget.grid_points_per_axis = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(slater_norm_squared(2, spec, budget));
}
BENCHMARK(BM_SlaterNormGrid)->Arg(8)->Arg(16);

static void BM_QmcManybody(benchmark::State& state) {
    const TorusParams torus{cplx(0.0, 1.0)};
    OneLayerModel model(2, 2, torus, 0.3, 0.1);
    IntegrationBudget budget;
    budget.backend = IntegrationBackend::lowdiscrepancy;
    budget.samples = state.range(0);
    budget.replicates = 2;
    budget.seed = 11;
    for (auto _ : state)
        benchmark::DoNotOptimize(manybody_inner(model, 1, 1, budget));
    state.SetItemsProcessed(state.iterations() * budget.samples * budget.replicates);
}
BENCHMARK(BM_QmcManybody)->Arg(1 << 10)->Arg(1 << 13);

static void BM_CenterMassGram(benchmark::State& state) {
    const TorusParams torus{cplx(0.0, 1.0)};
    IntMatrix km(2, 2);
    km << 2, 1, 1, 2;
    const KMatrix k = KMatrix::validate(km);
    const std::vector<double> zero{0.0, 0.0};
    const GridSpec grid{static_cast<int>(state.range(0)), 4, 1'000'000'000LL};
    for (auto _ : state)
        benchmark::DoNotOptimize(center_mass_gram(k, torus, zero, zero, grid));
}
BENCHMARK(BM_CenterMassGram)->Arg(8)->Arg(12);

static void BM_CurvatureTraceForm(benchmark::State& state) {
    const TorusParams torus{cplx(0.0, 1.0)};
    OneLayerModel model(2, 2, torus);
    const GramField field =
        gram_field_one_layer_closed(model, 1.0, static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(trace_form_and_degree(field));
}
BENCHMARK(BM_CurvatureTraceForm)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
