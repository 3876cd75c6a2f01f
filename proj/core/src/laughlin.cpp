#include "fqhe/laughlin.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "gram_detail.hpp"

namespace fqhe {

namespace {

constexpr double kPi = std::numbers::pi;

cplx ipow(cplx base, long long e) {
    cplx out = 1.0;
    for (long long i = 0; i < e; ++i) out *= base;
    return out;
}

double factorial(long long n) {
    double f = 1.0;
    for (long long i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}

} // namespace

double GramMatrixResult::max_offdiagonal() const {
    double worst = 0.0;
    for (int p = 0; p < value.rows(); ++p)
        for (int q = 0; q < value.cols(); ++q)
            if (p != q) worst = std::max(worst, std::abs(value(p, q)));
    return worst;
}

double GramMatrixResult::diagonal_mean() const {
    double mean = 0.0;
    for (int p = 0; p < value.rows(); ++p) mean += value(p, p).real();
    return mean / static_cast<double>(value.rows());
}

double GramMatrixResult::diagonal_spread() const {
    const double mean = diagonal_mean();
    double worst = 0.0;
    for (int p = 0; p < value.rows(); ++p)
        worst = std::max(worst, std::abs(value(p, p).real() - mean));
    return worst;
}

OneLayerModel::OneLayerModel(long long m_, long long n_, TorusParams torus, double a,
                             double b)
    : m(m_), n(n_), spec{torus, m_ * n_, a, b, false} {
    if (m <= 0 || n <= 0) throw InvalidInput("OneLayerModel: m and n must be positive");
}

ManyBodyPoint::ManyBodyPoint(std::span<const cplx> zs, const TorusParams& torus)
    : z(zs.begin(), zs.end()) {
    x.resize(z.size());
    y.resize(z.size());
    cplx sum = 0.0;
    for (std::size_t p = 0; p < z.size(); ++p) {
        const LatticePoint lp = to_lattice_coords(z[p], torus.tau);
        x[p] = lp.x;
        y[p] = lp.y;
        sum += z[p];
    }
    w = sum;
}

ManyBodyPoint many_body_point_from_unit(std::span<const double> u, const TorusParams& torus,
                                        bool centered) {
    if (u.size() % 2 != 0)
        throw InvalidInput("many_body_point_from_unit: expected 2n coordinates");
    std::vector<cplx> zs(u.size() / 2);
    for (std::size_t p = 0; p < zs.size(); ++p) {
        double y = u[2 * p + 1];
        if (centered && y >= 0.5) y -= 1.0;
        zs[p] = from_lattice_coords(u[2 * p], y, torus.tau);
    }
    return ManyBodyPoint(zs, torus);
}

// ---------------------------------------------------------------------------
// Plan bundles for the three wave-function families

namespace {

// Jastrow factor arguments z_p - z_q stay within |Im| <= t for points in the
// fundamental cell.
Theta1Series make_jastrow_series(const TorusParams& torus, Tolerance tol, double y_bound) {
    return Theta1Series(Characteristics1D{0.5, 0.5}, torus.tau, tol, torus.t * 2.0 * y_bound);
}

struct HrEvaluator {
    OneLayerModel model;
    std::vector<Theta1Series> cm;
    Theta1Series jastrow;

    HrEvaluator(const OneLayerModel& model_, Tolerance tol, double y_bound = 1.0)
        : model(model_), jastrow(make_jastrow_series(model_.spec.torus, tol, y_bound)) {
        const double m = static_cast<double>(model.m);
        const double t = model.spec.torus.t;
        // Argument m*w + xi; |Im| <= m * t * (n * y_bound) + |a| * t.
        const double bound = m * t * static_cast<double>(model.n) * y_bound +
                             std::abs(model.spec.a) * t;
        cm.reserve(static_cast<std::size_t>(model.m));
        for (long long j = 1; j <= model.m; ++j)
            cm.emplace_back(Characteristics1D{(static_cast<double>(j) - 1.0) / m, 0.0},
                            m * model.spec.torus.tau, tol, bound);
    }

    cplx center_of_mass(int j, const ManyBodyPoint& p) const {
        const cplx arg = static_cast<double>(model.m) * p.w + model.spec.xi();
        return cm[static_cast<std::size_t>(j - 1)].eval(arg);
    }

    cplx jastrow_product(const ManyBodyPoint& p) const {
        cplx prod = 1.0;
        for (std::size_t a = 0; a < p.z.size(); ++a)
            for (std::size_t b = a + 1; b < p.z.size(); ++b)
                prod *= jastrow.eval(p.z[a] - p.z[b]);
        return prod;
    }

    cplx value(int j, const ManyBodyPoint& p) const {
        return center_of_mass(j, p) * ipow(jastrow_product(p), model.m);
    }

    double metric(const ManyBodyPoint& p) const {
        const double t = model.spec.torus.t;
        double sq = 0.0, lin = 0.0;
        for (double yk : p.y) {
            sq += yk * yk;
            lin += yk;
        }
        return std::exp(-2.0 * kPi * static_cast<double>(model.m * model.n) * t * sq -
                        4.0 * kPi * model.spec.a * t * lin);
    }
};

struct FayEvaluator {
    int n;
    LineBundleSpec spec;
    Theta1Series cm;
    Theta1Series jastrow;

    FayEvaluator(int n_, const LineBundleSpec& spec_, Tolerance tol, double y_bound = 1.0)
        : n(n_), spec(spec_),
          cm(Characteristics1D{(n_ - 1) / 2.0, (n_ - 1) / 2.0}, spec_.torus.tau, tol,
             spec_.torus.t * (static_cast<double>(n_) * y_bound + std::abs(spec_.a))),
          jastrow(make_jastrow_series(spec_.torus, tol, y_bound)) {}

    cplx value(const ManyBodyPoint& p) const {
        cplx prod = cm.eval(p.w + spec.xi());
        for (std::size_t a = 0; a < p.z.size(); ++a)
            for (std::size_t b = a + 1; b < p.z.size(); ++b)
                prod *= jastrow.eval(p.z[a] - p.z[b]);
        return prod;
    }
};

double product_metric(const LineBundleSpec& spec, const ManyBodyPoint& p) {
    const double t = spec.torus.t;
    double sq = 0.0, lin = 0.0;
    for (double yk : p.y) {
        sq += yk * yk;
        lin += yk;
    }
    return std::exp(-2.0 * kPi * static_cast<double>(spec.k) * t * sq -
                    4.0 * kPi * spec.a * t * lin);
}

cplx slater_value(const SectionBasis& basis, int n, const ManyBodyPoint& p) {
    Eigen::MatrixXcd mat(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) mat(i, j) = basis.eval(i + 1, p.z[static_cast<std::size_t>(j)]);
    return mat.determinant() / std::sqrt(factorial(n));
}

std::vector<IntegrationResult> integrate_budget_multi(const VectorIntegrand& f, int n_out,
                                                      int dims,
                                                      const IntegrationBudget& budget) {
    if (budget.backend == IntegrationBackend::grid) {
        GridSpec grid{budget.grid_points_per_axis, dims, budget.max_evaluations};
        return torus_quadrature_multi(f, n_out, grid);
    }
    return qmc_integrate_multi(f, n_out, dims, budget.samples, budget.seed,
                               budget.replicates);
}

IntegrationResult integrate_budget_scalar(const ScalarIntegrand& f, int dims,
                                          const IntegrationBudget& budget) {
    auto res = integrate_budget_multi(
        [&](std::span<const double> u, std::span<cplx> out) { out[0] = f(u); }, 1, dims,
        budget);
    return res.front();
}

} // namespace

// ---------------------------------------------------------------------------
// Pointwise wave functions

cplx hr_wavefunction(const OneLayerModel& model, int j, const ManyBodyPoint& p,
                     Tolerance tol) {
    if (j < 1 || j > model.m) throw InvalidInput("hr_wavefunction: j out of range");
    double y_bound = 1.0;
    for (double yk : p.y) y_bound = std::max(y_bound, std::abs(yk));
    HrEvaluator eval(model, tol, y_bound);
    return eval.value(j, p);
}

cplx slater_wavefunction(int n, const LineBundleSpec& spec, const ManyBodyPoint& p,
                         Tolerance tol) {
    if (n < 1) throw InvalidInput("slater_wavefunction: n must be >= 1");
    if (spec.k != n) throw InvalidInput("slater_wavefunction: spec.k must equal n");
    double y_bound = 1.0;
    for (double yk : p.y) y_bound = std::max(y_bound, std::abs(yk));
    SectionBasis basis(spec, tol, y_bound);
    return slater_value(basis, n, p);
}

cplx fay_wavefunction(int n, const LineBundleSpec& spec, const ManyBodyPoint& p,
                      Tolerance tol) {
    if (n < 1) throw InvalidInput("fay_wavefunction: n must be >= 1");
    double y_bound = 1.0;
    for (double yk : p.y) y_bound = std::max(y_bound, std::abs(yk));
    FayEvaluator eval(n, spec, tol, y_bound);
    return eval.value(p);
}

// ---------------------------------------------------------------------------
// Slater / Fay proportionality

MuEstimate estimate_mu(int n, const LineBundleSpec& spec, int samples, std::uint64_t seed,
                       double exclusion, Tolerance tol) {
    if (samples < 10) throw InvalidInput("estimate_mu: samples must be >= 10");
    if (spec.k != n) throw InvalidInput("estimate_mu: spec.k must equal n");

    SectionBasis basis(spec, tol, 1.0);
    FayEvaluator fay(n, spec, tol, 1.0);

    std::mt19937_64 rng(seed);
    std::vector<cplx> num(static_cast<std::size_t>(samples));
    std::vector<cplx> den(static_cast<std::size_t>(samples));
    double log_sum = 0.0;
    int log_count = 0;
    for (int s = 0; s < samples; ++s) {
        std::vector<cplx> zs(static_cast<std::size_t>(n));
        for (auto& zp : zs) {
            const double x = detail::canonical_u01(rng);
            const double y = detail::canonical_u01(rng);
            zp = from_lattice_coords(x, y, spec.torus.tau);
        }
        ManyBodyPoint p(zs, spec.torus);
        num[static_cast<std::size_t>(s)] = slater_value(basis, n, p);
        den[static_cast<std::size_t>(s)] = fay.value(p);
        const double mag = std::abs(den[static_cast<std::size_t>(s)]);
        if (mag > 0.0) {
            log_sum += std::log(mag);
            ++log_count;
        }
    }
    if (log_count == 0) throw DegenerateSampling("estimate_mu: all denominators vanished");
    const double geo_mean = std::exp(log_sum / log_count);
    const double cutoff = exclusion * geo_mean;

    detail::CompensatedCSum acc;
    std::vector<cplx> ratios;
    for (int s = 0; s < samples; ++s) {
        if (std::abs(den[static_cast<std::size_t>(s)]) <= cutoff) continue;
        ratios.push_back(num[static_cast<std::size_t>(s)] / den[static_cast<std::size_t>(s)]);
        acc.add(ratios.back());
    }
    if (ratios.size() < 10)
        throw DegenerateSampling("estimate_mu: fewer than 10 samples survived exclusion");

    MuEstimate out;
    out.admitted = static_cast<int>(ratios.size());
    out.mu = acc.value() / static_cast<double>(ratios.size());
    out.dispersion = 0.0;
    for (const cplx& r : ratios) out.dispersion = std::max(out.dispersion, std::abs(r - out.mu));
    return out;
}

// ---------------------------------------------------------------------------
// Inner products

GramMatrixResult one_particle_gram(const LineBundleSpec& spec, const GridSpec& grid,
                                   Tolerance tol) {
    if (spec.k < 1) throw InvalidInput("one_particle_gram: k must be >= 1");
    if (grid.dims != 2) throw InvalidInput("one_particle_gram: grid.dims must be 2");

    const int k = static_cast<int>(spec.k);
    const SectionBasis basis(spec, tol, 0.5);
    const int n_out = detail::tri_count(k);

    auto integrand = [&basis, &spec, k,
                      s = std::vector<cplx>(static_cast<std::size_t>(k))](
                         std::span<const double> u, std::span<cplx> out) mutable {
        const double y = u[1] < 0.5 ? u[1] : u[1] - 1.0;
        const cplx z = from_lattice_coords(u[0], y, spec.torus.tau);
        const double weight = metric_h(spec, y);
        for (int j = 0; j < k; ++j) s[static_cast<std::size_t>(j)] = basis.eval(j + 1, z);
        for (int p = 0; p < k; ++p)
            for (int q = p; q < k; ++q)
                out[static_cast<std::size_t>(detail::tri_index(p, q, k))] =
                    s[static_cast<std::size_t>(p)] * std::conj(s[static_cast<std::size_t>(q)]) *
                    weight;
    };
    return detail::hermitian_from_pairs(torus_quadrature_multi(integrand, n_out, grid), k);
}

double one_particle_gram_closed(const LineBundleSpec& spec) {
    const double t = spec.torus.t;
    const double k = static_cast<double>(spec.k);
    return std::sqrt(1.0 / (2.0 * k * t)) * std::exp(2.0 * kPi * t * spec.a * spec.a / k);
}

IntegrationResult manybody_inner(const OneLayerModel& model, int j, int l,
                                 const IntegrationBudget& budget) {
    if (j < 1 || j > model.m || l < 1 || l > model.m)
        throw InvalidInput("manybody_inner: index out of range");
    const HrEvaluator eval(model, budget.theta_tol, 0.5);
    const int dims = 2 * static_cast<int>(model.n);

    auto integrand = [&](std::span<const double> u) -> cplx {
        ManyBodyPoint p = many_body_point_from_unit(u, model.spec.torus, true);
        const cplx jas = eval.jastrow_product(p);
        const double jas_m = std::norm(ipow(jas, model.m));
        return eval.center_of_mass(j, p) * std::conj(eval.center_of_mass(l, p)) * jas_m *
               eval.metric(p);
    };
    return integrate_budget_scalar(integrand, dims, budget);
}

GramMatrixResult manybody_gram(const OneLayerModel& model, const IntegrationBudget& budget) {
    const HrEvaluator eval(model, budget.theta_tol, 0.5);
    const int dims = 2 * static_cast<int>(model.n);
    const int m = static_cast<int>(model.m);
    const int n_out = detail::tri_count(m);

    auto integrand = [&eval, &model, m,
                      cm = std::vector<cplx>(static_cast<std::size_t>(m))](
                         std::span<const double> u, std::span<cplx> out) mutable {
        ManyBodyPoint p = many_body_point_from_unit(u, model.spec.torus, true);
        const double jas_m = std::norm(ipow(eval.jastrow_product(p), model.m));
        const double weight = jas_m * eval.metric(p);
        for (int j = 0; j < m; ++j) cm[static_cast<std::size_t>(j)] = eval.center_of_mass(j + 1, p);
        for (int pIdx = 0; pIdx < m; ++pIdx)
            for (int q = pIdx; q < m; ++q)
                out[static_cast<std::size_t>(detail::tri_index(pIdx, q, m))] =
                    cm[static_cast<std::size_t>(pIdx)] *
                    std::conj(cm[static_cast<std::size_t>(q)]) * weight;
    };
    return detail::hermitian_from_pairs(integrate_budget_multi(integrand, n_out, dims, budget),
                                        m);
}

IntegrationResult slater_norm_squared(int n, const LineBundleSpec& spec,
                                      const IntegrationBudget& budget) {
    if (spec.k != n) throw InvalidInput("slater_norm_squared: spec.k must equal n");
    const SectionBasis basis(spec, budget.theta_tol, 0.5);
    auto integrand = [&](std::span<const double> u) -> cplx {
        ManyBodyPoint p = many_body_point_from_unit(u, spec.torus, true);
        return std::norm(slater_value(basis, n, p)) * product_metric(spec, p);
    };
    return integrate_budget_scalar(integrand, 2 * n, budget);
}

IntegrationResult fay_norm_squared(int n, const LineBundleSpec& spec,
                                   const IntegrationBudget& budget) {
    const FayEvaluator eval(n, spec, budget.theta_tol, 0.5);
    auto integrand = [&](std::span<const double> u) -> cplx {
        ManyBodyPoint p = many_body_point_from_unit(u, spec.torus, true);
        return std::norm(eval.value(p)) * product_metric(spec, p);
    };
    return integrate_budget_scalar(integrand, 2 * n, budget);
}

double slater_norm_closed(int n, double t, double a) {
    if (n < 1 || !(t > 0.0)) throw InvalidInput("slater_norm_closed: need n >= 1 and t > 0");
    return std::pow(1.0 / (2.0 * n * t), n / 4.0) * std::exp(kPi * t * a * a);
}

double manybody_periodicity_defect(const std::function<cplx(std::span<const cplx>)>& f,
                                   long long degree, int n, const TorusParams& torus,
                                   double a, double b, int sign, int samples,
                                   std::uint64_t seed) {
    if (samples < 1) throw InvalidInput("manybody_periodicity_defect: samples must be >= 1");
    const cplx tau = torus.tau;
    const cplx xi = a * tau + b;
    const cplx xi_factor = std::exp(cplx(0.0, -2.0 * kPi) * xi);

    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        std::vector<cplx> zs(static_cast<std::size_t>(n));
        for (auto& zp : zs)
            zp = from_lattice_coords(detail::canonical_u01(rng), detail::canonical_u01(rng),
                                     tau);
        const cplx base = f(zs);
        for (int k = 0; k < n; ++k) {
            std::vector<cplx> shifted = zs;
            shifted[static_cast<std::size_t>(k)] += 1.0;
            const cplx f1 = f(shifted);
            const cplx want1 = static_cast<double>(sign) * base;
            worst = std::max(worst,
                             std::abs(f1 - want1) / (std::abs(f1) + std::abs(want1) + 1e-300));

            shifted = zs;
            shifted[static_cast<std::size_t>(k)] += tau;
            const cplx ft = f(shifted);
            const cplx phik = std::exp(static_cast<double>(degree) *
                                       (cplx(0.0, -kPi) * tau +
                                        cplx(0.0, -2.0 * kPi) * zs[static_cast<std::size_t>(k)]));
            const cplx want2 = static_cast<double>(sign) * xi_factor * phik * base;
            worst = std::max(worst,
                             std::abs(ft - want2) / (std::abs(ft) + std::abs(want2) + 1e-300));
        }
    }
    return worst;
}

} // namespace fqhe
