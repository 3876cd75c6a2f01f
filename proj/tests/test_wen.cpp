#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "fqhe/wen.hpp"

using namespace fqhe;

namespace {

constexpr double kPi = std::numbers::pi;
std::mt19937_64 rng(31337);
double u01() { return detail::canonical_u01(rng); }

IntMatrix mat2(long long a, long long b, long long c, long long d) {
    IntMatrix m(2, 2);
    m << a, b, c, d;
    return m;
}

// Float brute-force oracle for Pi: K^{-1} v reduced mod 1, deduplicated with
// tolerance 1e-9.
std::vector<std::vector<double>> pi_oracle(const IntMatrix& k) {
    const int g = static_cast<int>(k.rows());
    Eigen::MatrixXd kd = k.cast<double>();
    Eigen::MatrixXd kinv = kd.inverse();
    const long long delta = std::llround(kd.determinant());
    std::vector<std::vector<double>> classes;
    std::vector<long long> v(static_cast<std::size_t>(g), 0);
    const long long box = delta;
    for (long long code = 0; code < std::llround(std::pow(box, g)); ++code) {
        long long rest = code;
        Eigen::VectorXd vv(g);
        for (int i = 0; i < g; ++i) {
            vv(i) = static_cast<double>(rest % box);
            rest /= box;
        }
        Eigen::VectorXd c = kinv * vv;
        std::vector<double> rep(static_cast<std::size_t>(g));
        for (int i = 0; i < g; ++i) rep[static_cast<std::size_t>(i)] = c(i) - std::floor(c(i) + 1e-12);
        bool found = false;
        for (const auto& other : classes) {
            double dist = 0.0;
            for (int i = 0; i < g; ++i) {
                double d = std::abs(rep[static_cast<std::size_t>(i)] - other[static_cast<std::size_t>(i)]);
                d = std::min(d, 1.0 - d);
                dist = std::max(dist, d);
            }
            if (dist < 1e-9) {
                found = true;
                break;
            }
        }
        if (!found) classes.push_back(rep);
    }
    return classes;
}

LayeredPoint random_layered(const WenDatum& datum, const TorusParams& torus) {
    std::vector<std::vector<cplx>> layers(static_cast<std::size_t>(datum.g()));
    for (int k = 0; k < datum.g(); ++k)
        for (long long p = 0; p < datum.n_vec[static_cast<std::size_t>(k)]; ++p)
            layers[static_cast<std::size_t>(k)].push_back(
                from_lattice_coords(u01(), u01(), torus.tau));
    return LayeredPoint(layers, torus);
}

cplx theta_oracle(double a, double b, cplx z, cplx tau, int range = 40) {
    cplx sum = 0.0;
    for (int n = -range; n <= range; ++n) {
        const double v = n + a;
        sum += std::exp(cplx(0.0, kPi) * tau * (v * v) +
                        cplx(0.0, 2.0 * kPi) * v * (z + b));
    }
    return sum;
}

} // namespace

TEST_CASE("validate_wen: worked examples") {
    {
        IntMatrix k(1, 1);
        k << 2;
        const std::vector<long long> n{3};
        const WenDatum datum = validate_wen(k, n);
        CHECK(datum.d == 6);
        CHECK(datum.delta == 2);
        CHECK(datum.n_delta_over_d == 1);
        CHECK(datum.u_vec[0] == Rational(1, 2));
        CHECK(datum.cyclic);
        CHECK(datum.epsilon_k == 1);
    }
    {
        const WenDatum datum = validate_wen(mat2(2, 1, 1, 2), std::vector<long long>{1, 1});
        CHECK(datum.d == 3);
        CHECK(datum.delta == 3);
        CHECK(datum.n == 2);
        CHECK(datum.n_delta_over_d == 2);
        CHECK(datum.cyclic);
        CHECK(datum.u_vec[0] == Rational(1, 3));
    }
    {
        IntMatrix k(1, 1);
        k << 3;
        const WenDatum datum = validate_wen(k, std::vector<long long>{1});
        CHECK(datum.epsilon_k == -1); // odd diagonal: fermionic
    }
}

TEST_CASE("validate_wen: every rejection path") {
    const std::vector<long long> ones{1, 1};
    CHECK_THROWS_AS(validate_wen(mat2(2, 1, 0, 2), ones), NotSymmetric);
    CHECK_THROWS_AS(validate_wen(mat2(1, 2, 2, 1), ones), NotPositiveDefinite);
    CHECK_THROWS_AS(validate_wen(mat2(2, 0, 0, 3), ones), MixedParityDiagonal);
    CHECK_THROWS_AS(validate_wen(mat2(2, 1, 1, 4), ones), NoUniformD);
    CHECK_THROWS_AS(validate_wen(mat2(2, 1, 1, 2), std::vector<long long>{1, -1}),
                    InvalidInput);
    CHECK_THROWS_AS(validate_wen(mat2(2, 1, 1, 2), std::vector<long long>{1}), InvalidInput);
}

TEST_CASE("enumerate_pi: explicit groups") {
    {
        IntMatrix k(1, 1);
        k << 3;
        const auto pi = enumerate_pi(KMatrix::validate(k));
        REQUIRE(pi.size() == 3);
        CHECK(pi[0].num == std::vector<long long>{0});
        CHECK(pi[1].num == std::vector<long long>{1});
        CHECK(pi[2].num == std::vector<long long>{2});
        CHECK(pi[1].den == 3);
    }
    {
        const auto pi = enumerate_pi(KMatrix::validate(mat2(1, 0, 0, 1)));
        REQUIRE(pi.size() == 1);
        CHECK(pi[0].num == std::vector<long long>{0, 0});
    }
}

TEST_CASE("enumerate_pi agrees with the float brute-force oracle") {
    for (const IntMatrix& k : {mat2(2, 1, 1, 2), mat2(3, 1, 1, 3), mat2(4, 2, 2, 4)}) {
        const KMatrix km = KMatrix::validate(k);
        const auto got = enumerate_pi(km);
        const auto want = pi_oracle(k);
        REQUIRE(got.size() == want.size());
        for (const auto& cls : got) {
            const auto rep = cls.as_doubles();
            bool found = false;
            for (const auto& other : want) {
                double dist = 0.0;
                for (std::size_t i = 0; i < rep.size(); ++i) {
                    double d = std::abs(rep[i] - other[i]);
                    d = std::min(d, 1.0 - d);
                    dist = std::max(dist, d);
                }
                if (dist < 1e-9) found = true;
            }
            CHECK(found);
        }
    }
}

TEST_CASE("cyclic frame ordering follows multiples of u") {
    const WenDatum datum = validate_wen(mat2(2, 1, 1, 2), std::vector<long long>{1, 1});
    const auto frame = enumerate_pi(datum);
    REQUIRE(frame.size() == 3);
    CHECK(frame[0].num == std::vector<long long>{0, 0});
    CHECK(frame[1].num == std::vector<long long>{1, 1}); // u = (1/3, 1/3)
    CHECK(frame[2].num == std::vector<long long>{2, 2});
}

TEST_CASE("Wen datum serialization round-trips bit-exactly") {
    const WenDatum datum = validate_wen(mat2(3, 1, 1, 3), std::vector<long long>{2, 2});
    const std::string text = wen_datum_to_text(datum);
    const WenDatum back = wen_datum_from_text(text);
    CHECK(wen_datum_to_text(back) == text);
    CHECK(back.d == datum.d);
    CHECK(back.u_vec == datum.u_vec);

    std::string corrupted = text;
    corrupted.replace(corrupted.find("delta 8"), 7, "delta 9");
    CHECK_THROWS_AS(wen_datum_from_text(corrupted), InvalidInput);
    CHECK_THROWS_AS(wen_datum_from_text("bogus"), InvalidInput);
}

TEST_CASE("discriminant factor: zeros, reduction, factorization") {
    const TorusParams torus{cplx(0.0, 1.0)};
    {
        IntMatrix k(1, 1);
        k << 3;
        const WenDatum datum = validate_wen(k, std::vector<long long>{3});
        std::vector<std::vector<cplx>> layers{{cplx(0.2, 0.3), cplx(0.2, 0.3), cplx(0.7, 0.1)}};
        CHECK(std::abs(discriminant_DK(datum, torus, LayeredPoint(layers, torus))) < 1e-12);

        // reduction to the one-layer Jastrow product
        const LayeredPoint p = random_layered(datum, torus);
        cplx jastrow = 1.0;
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = a + 1; b < 3; ++b)
                jastrow *= theta_oracle(0.5, 0.5, p.z[0][a] - p.z[0][b], torus.tau);
        const cplx want = jastrow * jastrow * jastrow;
        CHECK(std::abs(discriminant_DK(datum, torus, p) - want) < 1e-9 * (1.0 + std::abs(want)));
    }
    {
        // block-diagonal K factorizes over layers
        const WenDatum datum = validate_wen(mat2(2, 0, 0, 2), std::vector<long long>{2, 2});
        const LayeredPoint p = random_layered(datum, torus);
        const cplx whole = discriminant_DK(datum, torus, p);
        IntMatrix k1(1, 1);
        k1 << 2;
        const WenDatum single = validate_wen(k1, std::vector<long long>{2});
        const cplx part1 =
            discriminant_DK(single, torus, LayeredPoint({p.z[0]}, torus));
        const cplx part2 =
            discriminant_DK(single, torus, LayeredPoint({p.z[1]}, torus));
        CHECK(std::abs(whole - part1 * part2) < 1e-10 * (1.0 + std::abs(whole)));
    }
}

TEST_CASE("KVW wave function: one-layer reduction") {
    const TorusParams torus{cplx(0.0, 1.0)};
    IntMatrix k(1, 1);
    k << 2;
    const WenDatum datum = validate_wen(k, std::vector<long long>{2});
    const auto frame = enumerate_pi(datum);
    OneLayerModel model(2, 2, torus, 0.3, 0.4);
    const std::vector<cplx> zeta{model.spec.xi()};

    for (int j = 1; j <= 2; ++j) {
        const LayeredPoint p = random_layered(datum, torus);
        const ManyBodyPoint q(p.z[0], torus);
        const cplx got = kvw_wavefunction(datum, torus, zeta, frame[static_cast<std::size_t>(j - 1)], p);
        const cplx want = hr_wavefunction(model, j, q);
        CHECK(std::abs(got - want) < 1e-10 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("KVW wave function matches a term-by-term oracle on two layers") {
    const TorusParams torus{cplx(0.0, 1.0)};
    const WenDatum datum = validate_wen(mat2(2, 1, 1, 2), std::vector<long long>{1, 1});
    const auto frame = enumerate_pi(datum);
    const std::vector<cplx> zeta{0.0, 0.0};
    const LayeredPoint p = random_layered(datum, torus);

    for (const PiElement& c : frame) {
        const auto cd = c.as_doubles();
        cplx theta = 0.0;
        for (int n0 = -10; n0 <= 10; ++n0)
            for (int n1 = -10; n1 <= 10; ++n1) {
                const double v0 = n0 + cd[0], v1 = n1 + cd[1];
                const cplx w0 = 2.0 * p.w[0] + p.w[1];
                const cplx w1 = p.w[0] + 2.0 * p.w[1];
                const cplx quad = torus.tau * (2.0 * v0 * v0 + 2.0 * v0 * v1 + 2.0 * v1 * v1);
                theta += std::exp(cplx(0.0, kPi) * quad +
                                  cplx(0.0, 2.0 * kPi) * (v0 * w0 + v1 * w1));
            }
        const cplx dk = theta_oracle(0.5, 0.5, p.z[0][0] - p.z[1][0], torus.tau);
        const cplx got = kvw_wavefunction(datum, torus, zeta, c, p);
        CHECK(std::abs(got - theta * dk) < 1e-10 * (1.0 + std::abs(got)));
    }
}

TEST_CASE("KVW vanishing order along an inter-layer diagonal") {
    const TorusParams torus{cplx(0.0, 1.0)};
    const WenDatum datum = validate_wen(mat2(3, 2, 2, 3), std::vector<long long>{1, 1});
    const auto frame = enumerate_pi(datum);
    const std::vector<cplx> zeta{cplx(0.1, 0.2), cplx(0.1, 0.2)};
    const cplx base = from_lattice_coords(0.31, 0.27, torus.tau);

    // inter-layer exponent K_12 = 2
    std::vector<double> xs, ys;
    for (double eps = 1e-3; eps <= 1.05e-2; eps *= std::sqrt(10.0)) {
        std::vector<std::vector<cplx>> layers{{base}, {base + eps}};
        const cplx v = kvw_wavefunction(datum, torus, zeta, frame[1], LayeredPoint(layers, torus));
        xs.push_back(std::log(eps));
        ys.push_back(std::log(std::abs(v)));
    }
    double mx = 0, my = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    CHECK(std::abs(sxy / sxx - 2.0) < 0.05);
}

TEST_CASE("multilayer inner products: trivial reduction and orthogonality") {
    const TorusParams torus{cplx(0.0, 1.0)};
    {
        // K = (1), n = (2) is the m = 1 pipeline
        IntMatrix k(1, 1);
        k << 1;
        const WenDatum datum = validate_wen(k, std::vector<long long>{2});
        const auto frame = enumerate_pi(datum);
        REQUIRE(frame.size() == 1);
        IntegrationBudget budget;
        budget.grid_points_per_axis = 16;
        const auto got = multilayer_inner(datum, torus, 0.2, 0.4, frame[0], frame[0], budget);

        OneLayerModel model(1, 2, torus, 0.2, 0.4);
        const auto want = manybody_inner(model, 1, 1, budget);
        CHECK(got.value.real() ==
              doctest::Approx(want.value.real()).epsilon(1e-10));
    }
    {
        const WenDatum datum = validate_wen(mat2(2, 1, 1, 2), std::vector<long long>{1, 1});
        const auto frame = enumerate_pi(datum);
        IntegrationBudget budget;
        budget.backend = IntegrationBackend::lowdiscrepancy;
        budget.samples = 1 << 13;
        budget.replicates = 6;
        budget.seed = 5150;
        const auto off = multilayer_inner(datum, torus, 0.25, 0.1, frame[0], frame[1], budget);
        CHECK(std::abs(off.value) <= 4.0 * off.error_estimate);

        const auto d0 = multilayer_inner(datum, torus, 0.25, 0.1, frame[0], frame[0], budget);
        budget.seed = 6160;
        const auto d0b = multilayer_inner(datum, torus, 0.55, 0.3, frame[0], frame[0], budget);
        const double ratio = d0b.value.real() / d0.value.real();
        const double nd = static_cast<double>(datum.n) / static_cast<double>(datum.d);
        const double expect = std::exp(2.0 * kPi * nd * torus.t * (0.55 * 0.55 - 0.25 * 0.25));
        const double sigma = std::abs(ratio) * (d0b.error_estimate / d0b.value.real() +
                                                d0.error_estimate / d0.value.real());
        CHECK(std::abs(ratio - expect) <= 4.0 * sigma);

        // full gram in one pass: hermitian, delta x delta
        budget.seed = 5150;
        const auto gram = multilayer_gram(datum, torus, 0.25, 0.1, budget);
        CHECK(gram.value.rows() == 3);
        CHECK(std::abs(gram.value(0, 1) - off.value) <= 1e-12 * (1.0 + std::abs(off.value)));
    }
}

TEST_CASE("center-of-mass basis: reductions and automorphy") {
    const TorusParams torus{cplx(0.0, 1.0)};
    {
        // g = 1: H_c equals the distinguished basis section s_j with j-1 = k c
        IntMatrix km(1, 1);
        km << 3;
        const KMatrix k = KMatrix::validate(km);
        const auto pi = enumerate_pi(k);
        const LineBundleSpec spec{torus, 3, 0.2, 0.7, false};
        const std::vector<double> av{0.2}, bv{0.7};
        for (int idx = 0; idx < 3; ++idx) {
            const cplx z = from_lattice_coords(u01(), u01(), torus.tau);
            const std::vector<cplx> zv{z};
            const cplx got = center_mass_eval(k, torus, av, bv, pi[static_cast<std::size_t>(idx)], zv);
            const cplx want = section_basis_eval(spec, idx + 1, z);
            CHECK(std::abs(got - want) < 1e-11 * (1.0 + std::abs(want)));
        }
    }
    {
        const KMatrix k = KMatrix::validate(mat2(2, 1, 1, 2));
        const auto pi = enumerate_pi(k);
        const std::vector<double> av{0.15, 0.3}, bv{0.6, 0.05};
        const std::vector<cplx> z{from_lattice_coords(u01(), u01(), torus.tau),
                                  from_lattice_coords(u01(), u01(), torus.tau)};
        // integer periodicity
        for (const auto& c : pi) {
            const std::vector<cplx> shifted{z[0] + 1.0, z[1]};
            const cplx a = center_mass_eval(k, torus, av, bv, c, z);
            const cplx b = center_mass_eval(k, torus, av, bv, c, shifted);
            CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a)));
        }
        // tau-shift law with the U_l factor
        const std::vector<long long> l{1, -1};
        std::vector<cplx> shifted{z[0] + torus.tau * static_cast<double>(l[0]),
                                  z[1] + torus.tau * static_cast<double>(l[1])};
        cplx phase = 0.0;
        for (int i = 0; i < 2; ++i) {
            cplx inner = 2.0 * (av[static_cast<std::size_t>(i)] * torus.tau +
                                bv[static_cast<std::size_t>(i)]);
            for (int j = 0; j < 2; ++j)
                inner += 2.0 * static_cast<double>(k.mat(i, j)) * z[static_cast<std::size_t>(j)] +
                         torus.tau * static_cast<double>(k.mat(i, j)) *
                             static_cast<double>(l[static_cast<std::size_t>(j)]);
            phase += static_cast<double>(l[static_cast<std::size_t>(i)]) * inner;
        }
        const cplx factor = std::exp(cplx(0.0, -kPi) * phase);
        const cplx a = center_mass_eval(k, torus, av, bv, pi[1], z);
        const cplx b = center_mass_eval(k, torus, av, bv, pi[1], shifted);
        CHECK(std::abs(b - factor * a) <= 1e-9 * (1.0 + std::abs(b)));
    }
}

TEST_CASE("center-of-mass Gram matrix: closed forms") {
    const TorusParams torus{cplx(0.0, 1.0)};
    {
        IntMatrix km(1, 1);
        km << 2;
        const KMatrix k = KMatrix::validate(km);
        const std::vector<double> zero{0.0};
        const auto gram = center_mass_gram(k, torus, zero, zero, GridSpec{32, 2});
        CHECK(gram.value(0, 0).real() == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(gram.max_offdiagonal() <= 1e-10);
        CHECK(kappa_closed(k, zero, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    }
    {
        const KMatrix k = KMatrix::validate(mat2(2, 1, 1, 2));
        const std::vector<double> av{0.2, 0.2}, bv{0.1, 0.1};
        const auto gram =
            center_mass_gram(k, torus, av, bv, GridSpec{16, 4, 1'000'000'000LL});
        const double diag = gram.diagonal_mean();
        CHECK(gram.max_offdiagonal() <= 1e-9 * diag);
        CHECK(gram.diagonal_spread() <= 1e-9 * diag);
        CHECK(diag == doctest::Approx(kappa_closed(k, av, torus.t)).epsilon(1e-9));
    }
}

TEST_CASE("kappa closed forms and the prefactor discrepancy") {
    {
        IntMatrix km(1, 1);
        km << 4;
        const KMatrix k = KMatrix::validate(km);
        const std::vector<double> a{0.3};
        const double t = 1.2;
        const double want = std::sqrt(1.0 / (2.0 * 4.0 * t)) * std::exp(2.0 * kPi * t * 0.09 / 4.0);
        CHECK(kappa_closed(k, a, t) == doctest::Approx(want).epsilon(1e-13));
        CHECK(kappa_printed(k, a, t) == doctest::Approx(want).epsilon(1e-13)); // g=1: agree
    }
    {
        const KMatrix k = KMatrix::validate(mat2(1, 0, 0, 1));
        const std::vector<double> zero{0.0, 0.0};
        CHECK(kappa_closed(k, zero, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(kappa_printed(k, zero, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
    }
    {
        const KMatrix k = KMatrix::validate(mat2(2, 1, 1, 2));
        const std::vector<double> zero{0.0, 0.0};
        CHECK(kappa_closed(k, zero, 1.0) ==
              doctest::Approx(1.0 / (2.0 * std::sqrt(3.0))).epsilon(1e-14));
        CHECK(kappa_printed(k, zero, 1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
        CHECK(kappa_closed(k, zero, 1.0) != kappa_printed(k, zero, 1.0));
    }
}

TEST_CASE("Rational arithmetic") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-3, -6) == Rational(1, 2));
    CHECK(Rational(3, -6).num == -1);
    CHECK(Rational(3, -6).den == 2);
    CHECK_THROWS_AS(Rational(1, 0), InvalidInput);
}
