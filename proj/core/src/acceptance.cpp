#include "fqhe/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fqhe/curvature.hpp"
#include "fqhe/report.hpp"

namespace fqhe {

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
    bool ok = true;
    std::ostringstream details;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            details << " FAILED[" << what << "]";
        }
    }
    void note(const std::string& what) { details << " " << what; }
};

using Clock = std::chrono::steady_clock;

CriterionResult finish(int index, const std::string& name, Check& check,
                       Clock::time_point start, std::ostream* progress) {
    CriterionResult result;
    result.index = index;
    result.name = name;
    result.passed = check.ok;
    result.details = check.details.str();
    result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (progress) {
        (*progress) << (result.passed ? "[PASS]" : "[FAIL]") << " criterion " << index << ": "
                    << name << " (" << format_double(result.seconds) << " s)"
                    << result.details << "\n"
                    << std::flush;
    }
    return result;
}

// 1. One-particle orthonormality at grid N = 64.
CriterionResult criterion_one_particle(std::ostream* progress) {
    const auto start = Clock::now();
    Check check;
    std::mt19937_64 rng(20240811u);
    const std::vector<long long> degrees{1, 2, 3, 5};
    const std::vector<cplx> taus{cplx(0.0, 1.0), cplx(0.3, 0.8)};
    double worst = 0.0;
    for (long long k : degrees)
        for (const cplx& tau : taus)
            for (int trial = 0; trial < 3; ++trial) {
                const double a = detail::canonical_u01(rng);
                const double b = detail::canonical_u01(rng);
                const LineBundleSpec spec{TorusParams(tau), k, a, b, false};
                const auto gram = one_particle_gram(spec, GridSpec{64, 2});
                const double diag = one_particle_gram_closed(spec);
                const Eigen::MatrixXcd expect =
                    diag * Eigen::MatrixXcd::Identity(static_cast<int>(k), static_cast<int>(k));
                worst = std::max(worst, (gram.value - expect).cwiseAbs().maxCoeff());
            }
    check.require(worst <= 1e-9, "max entrywise error <= 1e-9");
    check.note("max_error=" + format_double(worst));
    return finish(1, "one-particle orthonormality", check, start, progress);
}

// 2. Slater norm: grid quadrature for n = 2, QMC for n = 3.
CriterionResult criterion_slater_norm(std::ostream* progress) {
    const auto start = Clock::now();
    Check check;
    const TorusParams torus(cplx(0.0, 1.0));

    for (double a : {0.0, 0.3}) {
        const LineBundleSpec spec{torus, 2, a, 0.0, false};
        IntegrationBudget budget;
        budget.backend = IntegrationBackend::grid;
        budget.grid_points_per_axis = 32;
        const auto res = slater_norm_squared(2, spec, budget);
        const double closed = slater_norm_closed(2, torus.t, a);
        const double rel = std::abs(std::sqrt(res.value.real()) - closed) / closed;
        check.require(rel <= 1e-6, "n=2 a=" + format_double(a) + " rel error <= 1e-6");
        check.note("n2_a" + format_double(a) + "_rel=" + format_double(rel));
    }

    {
        const LineBundleSpec spec{torus, 3, 0.0, 0.0, false};
        IntegrationBudget budget;
        budget.backend = IntegrationBackend::lowdiscrepancy;
        budget.samples = 1LL << 18; // 8 * 2^18 > 2e6 evaluations
        budget.replicates = 8;
        budget.seed = 7011;
        const auto res = slater_norm_squared(3, spec, budget);
        const double closed2 = std::pow(slater_norm_closed(3, torus.t, 0.0), 2);
        const double dev = std::abs(res.value.real() - closed2);
        check.require(res.evaluations >= 2'000'000, "n=3 uses >= 2e6 samples");
        check.require(dev <= 3.0 * res.error_estimate, "n=3 within 3 standard errors");
        check.note("n3_dev=" + format_double(dev) +
                   " n3_stderr=" + format_double(res.error_estimate));
    }
    return finish(2, "Slater norm closed form", check, start, progress);
}

// 3. Slater/Fay proportionality constant.
CriterionResult criterion_mu(std::ostream* progress) {
    const auto start = Clock::now();
    Check check;
    const TorusParams torus(cplx(0.0, 1.0));
    std::mt19937_64 rng(555123u);
    for (int n : {2, 3})
        for (int trial = 0; trial < 2; ++trial) {
            const double a = detail::canonical_u01(rng);
            const double b = detail::canonical_u01(rng);
            const LineBundleSpec spec{torus, n, a, b, false};
            const MuEstimate mu = estimate_mu(n, spec, 100, 99000 + 17 * trial + n);
            const double rel = mu.dispersion / std::abs(mu.mu);
            check.require(rel <= 1e-8, "n=" + std::to_string(n) + " dispersion <= 1e-8");
            check.note("n" + std::to_string(n) + "_disp=" + format_double(rel));
        }
    return finish(3, "Slater/Fay proportionality", check, start, progress);
}

// 4. Haldane-Rezayi orthogonality, degeneracy, and xi profile (m=2, n=2).
CriterionResult criterion_hr_structure(std::ostream* progress) {
    const auto start = Clock::now();
    Check check;
    const TorusParams torus(cplx(0.0, 1.0));
    const double a1 = 0.2, b1 = 0.35;
    const double a2 = 0.45, b2 = 0.1;

    IntegrationBudget budget;
    budget.backend = IntegrationBackend::lowdiscrepancy;
    budget.samples = 1LL << 16;
    budget.replicates = 8;
    budget.seed = 31415;

    OneLayerModel model1(2, 2, torus, a1, b1);
    const auto gram1 = manybody_gram(model1, budget);
    budget.seed = 27182;
    OneLayerModel model2(2, 2, torus, a2, b2);
    const auto gram2 = manybody_gram(model2, budget);

    const double off = std::abs(gram1.value(0, 1));
    check.require(off <= 4.0 * gram1.error_estimate(0, 1),
                  "off-diagonal within 4 standard errors of 0");
    check.note("offdiag=" + format_double(off) +
               " stderr=" + format_double(gram1.error_estimate(0, 1)));

    const double d1 = gram1.value(0, 0).real();
    const double d2 = gram1.value(1, 1).real();
    check.require(std::abs(d1 - d2) <=
                      4.0 * (gram1.error_estimate(0, 0) + gram1.error_estimate(1, 1)),
                  "diagonal entries mutually consistent");

    const double ratio = gram2.value(0, 0).real() / d1;
    const double expect = std::exp(2.0 * kPi * torus.t * (a2 * a2 - a1 * a1) / 2.0);
    const double sigma = std::abs(ratio) * (gram2.error_estimate(0, 0) / gram2.value(0, 0).real() +
                                            gram1.error_estimate(0, 0) / d1);
    check.require(std::abs(ratio - expect) <= 4.0 * sigma,
                  "diagonal xi-ratio matches exp(2 pi t (a2^2-a1^2)/m)");
    check.note("ratio=" + format_double(ratio) + " expect=" + format_double(expect));
    return finish(4, "Haldane-Rezayi structure", check, start, progress);
}

// 5. Wen datum arithmetic for the p,g example family (exact).
CriterionResult criterion_wen_arithmetic(std::ostream* progress) {
    const auto start = Clock::now();
    Check check;
    const long long m = 1;
    const std::vector<std::pair<int, int>> cases{{1, 2}, {2, 2}, {1, 3}};
    for (auto [p, g] : cases) {
        IntMatrix k(g, g);
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) k(i, j) = (i == j) ? p + 1 : p;
        std::vector<long long> n_vec(static_cast<std::size_t>(g), m);
        const WenDatum datum = validate_wen(k, n_vec);
        const long long delta = static_cast<long long>(p) * g + 1;
        const std::string tag = "p" + std::to_string(p) + "g" + std::to_string(g);
        check.require(datum.delta == delta, tag + " delta == p*g+1");
        check.require(datum.d == m * delta, tag + " d == m*delta");
        check.require(datum.n_delta_over_d == g, tag + " n*delta/d == g");
        check.require(datum.cyclic, tag + " cyclic");
        const auto pi_cyclic = enumerate_pi(datum);
        const auto pi_lex = enumerate_pi(datum.k);
        check.require(static_cast<long long>(pi_cyclic.size()) == delta,
                      tag + " |<u>| == delta");
        std::vector<PiElement> sorted = pi_cyclic;
        std::sort(sorted.begin(), sorted.end(), [](const PiElement& x, const PiElement& y) {
            return x.num < y.num;
        });
        check.require(sorted == pi_lex, tag + " <u> exhausts Pi");
    }
    return finish(5, "Wen datum arithmetic", check, start, progress);
}

// 6. Center-of-mass Gram matrix against the two candidate prefactors.
CriterionResult criterion_center_mass(std::ostream* progress) {
    const auto start = Clock::now();
    Check check;
    const TorusParams torus(cplx(0.0, 1.0));
    IntMatrix km(2, 2);
    km << 2, 1, 1, 2;
    const KMatrix k = KMatrix::validate(km);
    const std::vector<double> a_vec{0.0, 0.0};
    const std::vector<double> b_vec{0.0, 0.0};

    const auto gram = center_mass_gram(k, torus, a_vec, b_vec, GridSpec{48, 4, 1'000'000'000LL});
    const double diag = gram.diagonal_mean();
    check.require(gram.max_offdiagonal() <= 1e-8 * diag, "off-diagonals <= 1e-8 relative");
    check.require(gram.diagonal_spread() <= 1e-8 * diag, "diagonal scalar to 1e-8 relative");

    const double gauss = kappa_closed(k, a_vec, torus.t);
    const double printed = kappa_printed(k, a_vec, torus.t);
    check.require(std::abs(diag - gauss) <= 1e-8 * gauss,
                  "quadrature matches the Gaussian-integral prefactor to 1e-8");
    check.note("diag=" + format_double(diag) + " gauss=" + format_double(gauss) +
               " printed=" + format_double(printed));
    if (std::abs(diag - gauss) < std::abs(diag - printed))
        check.note("quadrature_decides=gaussian_integral");
    else
        check.note("quadrature_decides=printed");

    // g = 1 consistency with the one-particle closed form, exact expressions.
    for (long long kk : {1LL, 2LL, 5LL})
        for (double a : {0.0, 0.3}) {
            IntMatrix k1(1, 1);
            k1 << kk;
            const KMatrix one = KMatrix::validate(k1);
            const std::vector<double> av{a};
            const LineBundleSpec spec{torus, kk, a, 0.0, false};
            const double lhs = kappa_closed(one, av, torus.t);
            const double rhs = one_particle_gram_closed(spec);
            check.require(std::abs(lhs - rhs) <= 1e-14 * rhs, "g=1 matches Prop 2.2");
        }
    return finish(6, "center-of-mass Gram matrix", check, start, progress);
}

// 7. Curvature trace, projective flatness, integrated degree.
CriterionResult criterion_curvature(std::ostream* progress) {
    const auto start = Clock::now();
    Check check;
    const TorusParams torus(cplx(0.0, 1.0));

    {
        OneLayerModel model(2, 3, torus);
        const GramField field = gram_field_one_layer_closed(model, 1.0, 64);
        const CurvatureReport report = trace_form_and_degree(field);
        const double expect = -kPi / torus.t * 1.0; // n*delta/d = 1 for K=(m)
        double worst = 0.0;
        for (double w : report.trace_coefficients)
            worst = std::max(worst, std::abs(w - expect) / std::abs(expect));
        check.require(worst <= 1e-6, "one-layer trace coefficient to 1e-6");
        check.require(std::abs(report.degree - (-1.0)) <= 1e-6, "one-layer degree == -1");
        check.require(report.projective_flatness_residual <= 1e-8,
                      "one-layer projectively flat");
        check.note("deg1=" + format_double(report.degree));
    }
    {
        IntMatrix km(2, 2);
        km << 2, 1, 1, 2;
        const std::vector<long long> n_vec{1, 1};
        const WenDatum datum = validate_wen(km, n_vec);
        const GramField field = gram_field_multilayer_closed(datum, torus, 1.0, 64);
        const CurvatureReport report = trace_form_and_degree(field);
        const double expect = -kPi / torus.t * static_cast<double>(datum.n_delta_over_d);
        double worst = 0.0;
        for (double w : report.trace_coefficients)
            worst = std::max(worst, std::abs(w - expect) / std::abs(expect));
        check.require(worst <= 1e-6, "multilayer trace coefficient to 1e-6");
        check.require(std::abs(report.degree - (-2.0)) <= 1e-6, "multilayer degree == -2");
        check.require(report.projective_flatness_residual <= 1e-8,
                      "multilayer projectively flat");
        check.note("deg2=" + format_double(report.degree));
    }
    return finish(7, "Bott-Chern curvature and degree", check, start, progress);
}

// 8. Theta kernel certification on randomized inputs.
CriterionResult criterion_theta_certification(std::ostream* progress) {
    const auto start = Clock::now();
    Check check;
    std::mt19937_64 rng(777001u);
    const Tolerance tol(1e-12);
    double worst_cert = 0.0, worst_qp = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double t = 0.3 + 2.7 * detail::canonical_u01(rng);
        const cplx tau(detail::canonical_u01(rng) - 0.5, t);
        const Characteristics1D ch{2.0 * detail::canonical_u01(rng) - 1.0,
                                   2.0 * detail::canonical_u01(rng) - 1.0};
        // points of the fundamental cell; callers pre-reduce for conditioning
        const cplx z =
            from_lattice_coords(detail::canonical_u01(rng), detail::canonical_u01(rng), tau);

        const int radius = truncation_radius(ch.a, std::abs(z.imag()), t, tol);
        const cplx near = theta1d_partial(ch, z, tau, radius);
        const cplx far = theta1d_partial(ch, z, tau, radius + 3);
        worst_cert = std::max(worst_cert, std::abs(near - far));

        const cplx value = theta1d(ch, z, tau, tol);
        const cplx shift1 = theta1d(ch, z + 1.0, tau, tol);
        const cplx factor1 = std::exp(cplx(0.0, 2.0 * kPi) * ch.a);
        worst_qp = std::max(worst_qp, std::abs(shift1 - factor1 * value) / 1.0);

        const cplx shift_tau = theta1d(ch, z + tau, tau, tol);
        const cplx factor_tau =
            std::exp(cplx(0.0, -2.0 * kPi) * (z + ch.b) + cplx(0.0, -kPi) * tau);
        worst_qp = std::max(worst_qp, std::abs(shift_tau - factor_tau * value) /
                                          (1.0 + std::abs(factor_tau)));
    }
    check.require(worst_cert <= tol.abs_tol, "partial sums N and N+3 differ <= tol");
    check.require(worst_qp <= 10.0 * tol.abs_tol, "quasi-periodicity residuals <= 10 tol");
    check.note("cert=" + format_double(worst_cert) + " qp=" + format_double(worst_qp));
    return finish(8, "theta kernel certification", check, start, progress);
}

} // namespace

std::vector<CriterionResult> run_acceptance(std::ostream* progress) {
    std::vector<CriterionResult> results;
    results.push_back(criterion_one_particle(progress));
    results.push_back(criterion_slater_norm(progress));
    results.push_back(criterion_mu(progress));
    results.push_back(criterion_hr_structure(progress));
    results.push_back(criterion_wen_arithmetic(progress));
    results.push_back(criterion_center_mass(progress));
    results.push_back(criterion_curvature(progress));
    results.push_back(criterion_theta_certification(progress));
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

} // namespace fqhe
