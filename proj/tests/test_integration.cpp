#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>

#include "fqhe/integration.hpp"
#include "fqhe/laughlin.hpp"

using namespace fqhe;

namespace {

constexpr double kPi = std::numbers::pi;

// |s_1|^2 h weight for the degree-k bundle: the scalar-product integrand of
// the one-particle Gram matrix.
ScalarIntegrand gram_integrand(const LineBundleSpec& spec, const SectionBasis& basis) {
    return [&spec, &basis](std::span<const double> u) -> cplx {
        const double y = u[1] < 0.5 ? u[1] : u[1] - 1.0;
        const cplx z = from_lattice_coords(u[0], y, spec.torus.tau);
        return std::norm(basis.eval(1, z)) * metric_h(spec, y);
    };
}

} // namespace

TEST_CASE("constant integrand is exact") {
    auto f = [](std::span<const double>) -> cplx { return 1.0; };
    const auto res = torus_quadrature(f, GridSpec{16, 3});
    CHECK(res.value.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(res.error_estimate == 0.0);
    CHECK(res.error_reliable);
    CHECK(res.evaluations == 16 * 16 * 16);
}

TEST_CASE("pure Fourier mode integrates to zero below aliasing") {
    auto f = [](std::span<const double> u) -> cplx {
        return std::exp(cplx(0.0, 2.0 * kPi) * u[0]);
    };
    const auto res = torus_quadrature(f, GridSpec{16, 1});
    CHECK(std::abs(res.value) < 1e-15);
}

TEST_CASE("odd grid flags the error estimate as unreliable") {
    auto f = [](std::span<const double> u) -> cplx { return u[0]; };
    const auto res = torus_quadrature(f, GridSpec{15, 1});
    CHECK(!res.error_reliable);
    CHECK(res.error_estimate == 0.0);
}

TEST_CASE("grid cap rejects oversized requests") {
    auto f = [](std::span<const double>) -> cplx { return 0.0; };
    CHECK_THROWS_AS(torus_quadrature(f, GridSpec{100, 5}), GridTooLarge);
    CHECK_THROWS_AS(torus_quadrature(f, GridSpec{1, 2}), InvalidInput);
}

TEST_CASE("one-particle Gram integrand: values agree at N=32 and N=64") {
    const TorusParams torus{cplx(0.0, 1.0)};
    const LineBundleSpec spec{torus, 1, 0.0, 0.0, false};
    const SectionBasis basis(spec, Tolerance(1e-13), 0.5);
    const auto f = gram_integrand(spec, basis);
    const auto coarse = torus_quadrature(f, GridSpec{32, 2});
    const auto fine = torus_quadrature(f, GridSpec{64, 2});
    CHECK(std::abs(coarse.value - fine.value) <= 1e-12);
    CHECK(fine.value.real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(fine.value.real() == doctest::Approx(0.70710678).epsilon(1e-8));
}

TEST_CASE("spectral convergence: error ratio collapses once N >= 16") {
    // Degree-4 bundle on a thin torus keeps the N=16 rule away from the
    // round-off floor so the decay is observable.
    const TorusParams torus{cplx(0.25, 0.2)};
    const LineBundleSpec spec{torus, 4, 0.3, 0.1, false};
    const SectionBasis basis(spec, Tolerance(1e-14), 0.5);
    const auto f = gram_integrand(spec, basis);
    const auto n16 = torus_quadrature(f, GridSpec{16, 2});
    const auto n32 = torus_quadrature(f, GridSpec{32, 2});
    REQUIRE(n16.error_estimate > 1e-8); // not yet converged at N=8
    CHECK(n32.error_estimate < 0.1 * n16.error_estimate);
}

TEST_CASE("QMC: constants and separable closed forms") {
    auto constant = [](std::span<const double>) -> cplx { return cplx(2.5, -1.0); };
    const auto res = qmc_integrate(constant, 3, 1 << 10, 7, 4);
    CHECK(res.value == cplx(2.5, -1.0));
    CHECK(res.error_estimate == 0.0);
    CHECK(res.evaluations == (1 << 10) * 4);

    auto separable = [](std::span<const double> u) -> cplx {
        double prod = 1.0;
        for (double x : u) prod *= std::exp(-x);
        return prod;
    };
    const double closed = std::pow(1.0 - std::exp(-1.0), 4.0);
    const auto qmc = qmc_integrate(separable, 4, 1 << 14, 123, 8);
    CHECK(std::abs(qmc.value.real() - closed) <= 3.0 * qmc.error_estimate);
    CHECK(std::abs(qmc.value.real() - closed) < 1e-4);
}

TEST_CASE("QMC determinism: identical seeds give bit-identical results") {
    auto f = [](std::span<const double> u) -> cplx {
        return std::cos(2.0 * kPi * u[0]) * u[1] + u[2];
    };
    const auto a = qmc_integrate(f, 3, 1 << 12, 99, 6);
    const auto b = qmc_integrate(f, 3, 1 << 12, 99, 6);
    CHECK(a.value.real() == b.value.real());
    CHECK(a.value.imag() == b.value.imag());
    CHECK(a.error_estimate == b.error_estimate);

    const auto c = qmc_integrate(f, 3, 1 << 12, 100, 6);
    CHECK(a.value != c.value);
}

TEST_CASE("QMC error bars are statistically consistent") {
    // known-value integrand; count how often the truth lands within 4 sigma
    auto f = [](std::span<const double> u) -> cplx {
        return (u[0] + 0.5) * (u[1] + 0.5) * (u[2] + 0.5);
    };
    const double truth = 1.0;
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto res = qmc_integrate(f, 3, 1 << 9, seed, 6);
        if (std::abs(res.value.real() - truth) <= 4.0 * res.error_estimate) ++hits;
    }
    CHECK(hits >= 95);
}

TEST_CASE("QMC input validation") {
    auto f = [](std::span<const double>) -> cplx { return 0.0; };
    CHECK_THROWS_AS(qmc_integrate(f, 0, 100, 1, 4), InvalidInput);
    CHECK_THROWS_AS(qmc_integrate(f, 17, 100, 1, 4), InvalidInput);
    CHECK_THROWS_AS(qmc_integrate(f, 3, 1, 1, 4), InvalidInput);
    CHECK_THROWS_AS(qmc_integrate(f, 3, 100, 1, 1), InvalidInput);
}

TEST_CASE("reduction is deterministic for any worker count") {
    const TorusParams torus{cplx(0.0, 1.0)};
    const LineBundleSpec spec{torus, 2, 0.3, 0.4, false};
    const SectionBasis basis(spec, Tolerance(1e-12), 0.5);
    const auto f = gram_integrand(spec, basis);

    setenv("FQHE_THREADS", "1", 1);
    const auto serial = torus_quadrature(f, GridSpec{32, 2});
    const auto serial_qmc = qmc_integrate(f, 2, 1 << 13, 5, 4);
    setenv("FQHE_THREADS", "3", 1);
    const auto threaded = torus_quadrature(f, GridSpec{32, 2});
    const auto threaded_qmc = qmc_integrate(f, 2, 1 << 13, 5, 4);
    unsetenv("FQHE_THREADS");

    CHECK(serial.value.real() == threaded.value.real());
    CHECK(serial.value.imag() == threaded.value.imag());
    CHECK(serial.error_estimate == threaded.error_estimate);
    CHECK(serial_qmc.value.real() == threaded_qmc.value.real());
    CHECK(serial_qmc.error_estimate == threaded_qmc.error_estimate);
}
