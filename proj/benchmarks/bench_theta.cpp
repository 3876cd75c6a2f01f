#include <benchmark/benchmark.h>

#include "fqhe/theta.hpp"
#include "fqhe/torus.hpp"

using namespace fqhe;

static void BM_Theta1dPointwise(benchmark::State& state) {
    const cplx tau(0.3, 1.0);
    const Tolerance tol(std::pow(10.0, -state.range(0)));
    const cplx z(0.37, 0.42);
    for (auto _ : state)
        benchmark::DoNotOptimize(theta1d({0.25, 0.5}, z, tau, tol));
}
BENCHMARK(BM_Theta1dPointwise)->Arg(6)->Arg(10)->Arg(13);

static void BM_Theta1SeriesEval(benchmark::State& state) {
    const cplx tau(0.3, 1.0);
    const Theta1Series series({0.25, 0.5}, tau, Tolerance(1e-12), 1.0);
    cplx z(0.37, 0.42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(series.eval(z));
        z += cplx(1e-6, 0.0); // defeat value caching
    }
    state.counters["terms"] = static_cast<double>(series.term_count());
}
BENCHMARK(BM_Theta1SeriesEval);

static void BM_ThetaGSeriesEval(benchmark::State& state) {
    Eigen::MatrixXcd omega(2, 2);
    omega << cplx(0.0, 2.0), cplx(0.0, 1.0), cplx(0.0, 1.0), cplx(0.0, 2.0);
    const PeriodMatrix pm(omega);
    const std::vector<double> a{1.0 / 3.0, 1.0 / 3.0}, b{0.0, 0.0};
    const double bound = static_cast<double>(state.range(0));
    const ThetaGSeries series(a, b, pm, Tolerance(1e-12), bound, bound / 2.0);
    std::vector<cplx> arg{cplx(0.2, 0.3), cplx(0.5, -0.4)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(series.eval(arg));
        arg[0] += cplx(1e-6, 0.0);
    }
    state.counters["terms"] = static_cast<double>(series.term_count());
}
BENCHMARK(BM_ThetaGSeriesEval)->Arg(1)->Arg(3)->Arg(6);

static void BM_SectionBasisEval(benchmark::State& state) {
    const TorusParams torus{cplx(0.0, 1.0)};
    const LineBundleSpec spec{torus, state.range(0), 0.2, 0.1, false};
    const SectionBasis basis(spec, Tolerance(1e-12), 0.5);
    cplx z(0.3, 0.2);
    for (auto _ : state) {
        for (int j = 1; j <= spec.k; ++j) benchmark::DoNotOptimize(basis.eval(j, z));
        z += cplx(1e-6, 0.0);
    }
}
BENCHMARK(BM_SectionBasisEval)->Arg(1)->Arg(3)->Arg(6);

BENCHMARK_MAIN();
