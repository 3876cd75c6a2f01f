#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fqhe/torus.hpp"

using namespace fqhe;

namespace {

constexpr double kPi = std::numbers::pi;
std::mt19937_64 rng(777);
double u01() { return detail::canonical_u01(rng); }

} // namespace

TEST_CASE("lattice coordinates: generators and rectangular case") {
    {
        const cplx tau(0.3, 0.8);
        const LatticePoint p = to_lattice_coords(tau, tau);
        CHECK(p.x == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(p.y == doctest::Approx(1.0).epsilon(1e-15));
        const LatticePoint q = to_lattice_coords(1.0, tau);
        CHECK(q.x == doctest::Approx(1.0));
        CHECK(q.y == doctest::Approx(0.0));
    }
    {
        const LatticePoint p = to_lattice_coords(cplx(0.5, 0.4), cplx(0.0, 1.0));
        CHECK(p.x == doctest::Approx(0.5));
        CHECK(p.y == doctest::Approx(0.4));
    }
}

TEST_CASE("chart round trip") {
    for (int trial = 0; trial < 100; ++trial) {
        const cplx tau(2.0 * u01() - 1.0, 0.2 + 2.0 * u01());
        const cplx z(4.0 * u01() - 2.0, 4.0 * u01() - 2.0);
        const LatticePoint p = to_lattice_coords(z, tau);
        const cplx back = from_lattice_coords(p.x, p.y, tau);
        CHECK(std::abs(back - z) <= 1e-14 * (1.0 + std::abs(z)));
        CHECK(p.u == z.real());
        CHECK(p.v == z.imag());
    }
}

TEST_CASE("metric weight: worked values") {
    const TorusParams torus{cplx(0.0, 1.0)};
    const LineBundleSpec k1{torus, 1, 0.0, 0.0, false};
    CHECK(metric_h(k1, 0.0) == 1.0);
    CHECK(metric_h(k1, 0.5) == doctest::Approx(std::exp(-kPi / 2.0)).epsilon(1e-14));
    CHECK(metric_h(k1, 0.5) == doctest::Approx(0.2078795763507619).epsilon(1e-12));

    const LineBundleSpec spec{torus, 5, 0.7, 0.2, false};
    CHECK(metric_h(spec, 0.0) == 1.0); // independent of k and a at y = 0
}

TEST_CASE("metric weight: translation law") {
    const TorusParams torus{cplx(0.0, 1.0)};
    const LineBundleSpec spec{torus, 2, 0.3, 0.0, false};
    const double y = 0.1, t = 1.0;
    const double lhs = metric_h(spec, y + 1.0) / metric_h(spec, y);
    const double rhs = std::exp(-2.0 * kPi * t * (2.0 * spec.k * y + 2.0 * spec.a + spec.k));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("metric weight is log-quadratic in y") {
    const TorusParams torus{cplx(-0.4, 1.7)};
    const LineBundleSpec spec{torus, 3, 0.45, 0.2, false};
    const double h = 1e-3;
    for (double y : {-0.7, 0.0, 0.33, 1.2}) {
        const double second = (std::log(metric_h(spec, y + h)) - 2.0 * std::log(metric_h(spec, y)) +
                               std::log(metric_h(spec, y - h))) /
                              (h * h);
        CHECK(std::abs(second - (-4.0 * kPi * spec.k * torus.t)) < 1e-9 * std::abs(second) + 1e-6);
    }
}

TEST_CASE("basis sections: values and periodicity") {
    const TorusParams torus{cplx(0.0, 1.0)};
    {
        const LineBundleSpec spec{torus, 1, 0.0, 0.0, false};
        const cplx v = section_basis_eval(spec, 1, 0.0);
        CHECK(v.real() == doctest::Approx(1.086434811213308).epsilon(1e-12));
    }
    {
        const LineBundleSpec spec{torus, 3, 0.21, 0.13, false};
        for (int trial = 0; trial < 10; ++trial) {
            const cplx z = from_lattice_coords(u01(), u01(), torus.tau);
            const cplx a = section_basis_eval(spec, 2, z);
            const cplx b = section_basis_eval(spec, 2, z + 1.0);
            CHECK(std::abs(a - b) < 1e-10 * (1.0 + std::abs(a)));
        }
    }
    {
        const LineBundleSpec spec{torus, 2, 0.4, 0.7, false};
        const cplx z = from_lattice_coords(0.37, 0.22, torus.tau);
        const cplx lhs = section_basis_eval(spec, 1, z + torus.tau);
        const cplx factor = std::exp(cplx(0.0, -2.0 * kPi) * spec.xi()) *
                            std::exp(2.0 * (cplx(0.0, -kPi) * torus.tau + cplx(0.0, -2.0 * kPi) * z));
        const cplx rhs = factor * section_basis_eval(spec, 1, z);
        CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("quasi-periodicity defect harness") {
    const TorusParams torus{cplx(0.0, 1.0)};
    {
        const LineBundleSpec spec{torus, 1, 0.2, 0.1, false};
        auto f = [&](cplx z) { return section_basis_eval(spec, 1, z); };
        CHECK(quasi_periodicity_defect(f, spec, 25, 42) <= 1e-10);
    }
    {
        // constants are not sections unless both factors are 1
        const LineBundleSpec spec{torus, 1, 0.0, 0.5, false};
        auto f = [&](cplx) { return cplx(1.0, 0.0); };
        CHECK(quasi_periodicity_defect(f, spec, 25, 42) > 0.01);
    }
}

TEST_CASE("sharp bundle basis satisfies the sign-flipped laws") {
    const TorusParams torus{cplx(0.2, 0.9)};
    const LineBundleSpec sharp{torus, 2, 0.15, 0.65, true};
    auto f = [&](cplx z) { return section_basis_eval(sharp, 1, z); };
    CHECK(quasi_periodicity_defect(f, sharp, 25, 7) <= 1e-10);

    // and it genuinely fails the plain laws
    const LineBundleSpec plain{torus, 2, 0.15, 0.65, false};
    CHECK(quasi_periodicity_defect(f, plain, 25, 7) > 0.01);
}

TEST_CASE("full basis obeys both automorphy laws at random points") {
    const TorusParams torus{cplx(-0.3, 1.4)};
    const LineBundleSpec spec{torus, 4, 0.81, 0.37, false};
    for (int j = 1; j <= 4; ++j) {
        auto f = [&, j](cplx z) { return section_basis_eval(spec, j, z, Tolerance(1e-12)); };
        CHECK(quasi_periodicity_defect(f, spec, 100, 1000 + j) <= 1e-10);
    }
}

TEST_CASE("SectionBasis plan equals the pointwise evaluation") {
    const TorusParams torus{cplx(0.1, 0.8)};
    for (bool sharp : {false, true}) {
        const LineBundleSpec spec{torus, 3, 0.3, 0.6, sharp};
        const SectionBasis basis(spec, Tolerance(1e-12), 1.0);
        for (int j = 1; j <= 3; ++j)
            for (int trial = 0; trial < 10; ++trial) {
                const cplx z = from_lattice_coords(u01(), u01(), torus.tau);
                CHECK(std::abs(basis.eval(j, z) - section_basis_eval(spec, j, z)) < 1e-11);
            }
    }
}

TEST_CASE("argument validation") {
    const TorusParams torus{cplx(0.0, 1.0)};
    const LineBundleSpec spec{torus, 3, 0.0, 0.0, false};
    CHECK_THROWS_AS(section_basis_eval(spec, 0, 0.0), InvalidInput);
    CHECK_THROWS_AS(section_basis_eval(spec, 4, 0.0), InvalidInput);
    const LineBundleSpec bad{torus, 0, 0.0, 0.0, false};
    CHECK_THROWS_AS(section_basis_eval(bad, 1, 0.0), InvalidInput);
    CHECK_THROWS_AS(TorusParams{cplx(0.0, -1.0)}, NonconvergentDomain);
}
