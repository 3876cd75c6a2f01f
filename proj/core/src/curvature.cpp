#include "fqhe/curvature.hpp"

#include <cmath>
#include <numbers>

namespace fqhe {

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

GramField::GramField(int grid_n, TorusParams torus, GramProvenance provenance,
                     std::vector<Eigen::MatrixXcd> matrices)
    : grid_n_(grid_n), torus_(torus), provenance_(provenance),
      matrices_(std::move(matrices)) {
    if (grid_n_ < 2) throw InvalidInput("GramField: grid_n must be >= 2");
    if (matrices_.size() != static_cast<std::size_t>(grid_n_) * grid_n_)
        throw InvalidInput("GramField: expected grid_n^2 matrices");
    rank_ = static_cast<int>(matrices_.front().rows());
    for (const auto& m : matrices_) {
        if (m.rows() != rank_ || m.cols() != rank_)
            throw InvalidInput("GramField: inconsistent matrix sizes");
        const double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw InvalidInput("GramField: matrices must be hermitian");
        Eigen::LLT<Eigen::MatrixXcd> llt(m);
        if (llt.info() != Eigen::Success)
            throw InvalidInput("GramField: matrices must be positive definite");
    }
}

const Eigen::MatrixXcd& GramField::at(int ia, int ib) const {
    if (ia < 0 || ia >= grid_n_ || ib < 0 || ib >= grid_n_)
        throw InvalidInput("GramField::at: index out of range");
    return matrices_[static_cast<std::size_t>(ia) * grid_n_ + ib];
}

// ---------------------------------------------------------------------------
// Field builders

GramField gram_field_profile(int rank, double alpha_a2, double gamma,
                             const TorusParams& torus, int grid_n) {
    if (rank < 1) throw InvalidInput("gram_field_profile: rank must be >= 1");
    if (!(gamma > 0.0)) throw InvalidInput("gram_field_profile: gamma must be > 0");
    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(static_cast<std::size_t>(grid_n) * grid_n);
    for (int ia = 0; ia < grid_n; ++ia) {
        const double a = static_cast<double>(ia) / grid_n;
        const double kappa = gamma * std::exp(alpha_a2 * a * a);
        const Eigen::MatrixXcd m = kappa * Eigen::MatrixXcd::Identity(rank, rank);
        for (int ib = 0; ib < grid_n; ++ib) mats.push_back(m);
    }
    return GramField(grid_n, torus, GramProvenance::closed_form, std::move(mats));
}

GramField gram_field_one_layer_closed(const OneLayerModel& model, double gamma, int grid_n) {
    const double t = model.spec.torus.t;
    return gram_field_profile(static_cast<int>(model.m),
                              2.0 * kPi * t / static_cast<double>(model.m), gamma,
                              model.spec.torus, grid_n);
}

GramField gram_field_multilayer_closed(const WenDatum& datum, const TorusParams& torus,
                                       double gamma, int grid_n) {
    const double ratio = static_cast<double>(datum.n) / static_cast<double>(datum.d);
    return gram_field_profile(static_cast<int>(datum.delta), 2.0 * kPi * ratio * torus.t,
                              gamma, torus, grid_n);
}

GramField gram_field_center_mass_closed(const KMatrix& k, const TorusParams& torus,
                                        int grid_n) {
    const int g = k.g();
    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(static_cast<std::size_t>(grid_n) * grid_n);
    const int delta = static_cast<int>(k.det);
    for (int ia = 0; ia < grid_n; ++ia) {
        const double a = static_cast<double>(ia) / grid_n;
        const std::vector<double> a_vec(static_cast<std::size_t>(g), a);
        const double kappa = kappa_closed(k, a_vec, torus.t);
        const Eigen::MatrixXcd m = kappa * Eigen::MatrixXcd::Identity(delta, delta);
        for (int ib = 0; ib < grid_n; ++ib) mats.push_back(m);
    }
    return GramField(grid_n, torus, GramProvenance::closed_form, std::move(mats));
}

GramField gram_field_center_mass_quadrature(const KMatrix& k, const TorusParams& torus,
                                            int grid_n, int inner_grid_n, Tolerance tol) {
    const int g = k.g();
    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(static_cast<std::size_t>(grid_n) * grid_n);
    const GridSpec grid{inner_grid_n, 2 * g, 1'000'000'000LL};
    for (int ia = 0; ia < grid_n; ++ia) {
        const double a = static_cast<double>(ia) / grid_n;
        for (int ib = 0; ib < grid_n; ++ib) {
            const double b = static_cast<double>(ib) / grid_n;
            const std::vector<double> a_vec(static_cast<std::size_t>(g), a);
            const std::vector<double> b_vec(static_cast<std::size_t>(g), b);
            mats.push_back(center_mass_gram(k, torus, a_vec, b_vec, grid, tol).value);
        }
    }
    return GramField(grid_n, torus, GramProvenance::quadrature, std::move(mats));
}

GramField gram_field_one_particle_quadrature(long long k_degree, const TorusParams& torus,
                                             int grid_n, int inner_grid_n, Tolerance tol) {
    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(static_cast<std::size_t>(grid_n) * grid_n);
    const GridSpec grid{inner_grid_n, 2, 100'000'000LL};
    for (int ia = 0; ia < grid_n; ++ia) {
        const double a = static_cast<double>(ia) / grid_n;
        for (int ib = 0; ib < grid_n; ++ib) {
            const double b = static_cast<double>(ib) / grid_n;
            const LineBundleSpec spec{torus, k_degree, a, b, false};
            mats.push_back(one_particle_gram(spec, grid, tol).value);
        }
    }
    return GramField(grid_n, torus, GramProvenance::quadrature, std::move(mats));
}

GramField gram_field_one_layer_qmc(long long m, long long n, const TorusParams& torus,
                                   int grid_n, const IntegrationBudget& budget) {
    if (budget.backend != IntegrationBackend::lowdiscrepancy)
        throw InvalidInput("gram_field_one_layer_qmc: budget must use the QMC backend");
    std::vector<Eigen::MatrixXcd> mats;
    mats.reserve(static_cast<std::size_t>(grid_n) * grid_n);
    for (int ia = 0; ia < grid_n; ++ia) {
        const double a = static_cast<double>(ia) / grid_n;
        for (int ib = 0; ib < grid_n; ++ib) {
            const double b = static_cast<double>(ib) / grid_n;
            OneLayerModel model(m, n, torus, a, b);
            IntegrationBudget point_budget = budget;
            point_budget.seed = budget.seed + static_cast<std::uint64_t>(ia) * grid_n + ib;
            mats.push_back(manybody_gram(model, point_budget).value);
        }
    }
    return GramField(grid_n, torus, GramProvenance::qmc, std::move(mats));
}

// ---------------------------------------------------------------------------
// Finite differences on the hermitian logarithm

namespace {

std::vector<Eigen::MatrixXcd> log_field(const GramField& field) {
    const int n = field.grid_n();
    std::vector<Eigen::MatrixXcd> logs;
    logs.reserve(static_cast<std::size_t>(n) * n);
    for (int ia = 0; ia < n; ++ia)
        for (int ib = 0; ib < n; ++ib) {
            const Eigen::MatrixXcd& c = field.at(ia, ib);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
            if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
                throw InvalidInput("bott_chern_curvature: field matrix not positive definite");
            Eigen::VectorXd lg = es.eigenvalues().array().log();
            logs.push_back(es.eigenvectors() * lg.asDiagonal() *
                           es.eigenvectors().adjoint());
        }
    return logs;
}

struct Stencil {
    int first_offset;
    std::span<const double> coef;
};

// Fourth-order finite difference weights (normalized by 12 h or 12 h^2).
constexpr double kD1Center[5] = {1, -8, 0, 8, -1};
constexpr double kD1Fwd0[5] = {-25, 48, -36, 16, -3};
constexpr double kD1Fwd1[5] = {-3, -10, 18, -6, 1};
constexpr double kD2Center[5] = {-1, 16, -30, 16, -1};
constexpr double kD2Fwd0[6] = {45, -154, 214, -156, 61, -10};
constexpr double kD2Fwd1[6] = {10, -15, -4, 14, -6, 1};

// Stencil along the non-periodic a axis at index ia with step `stride`;
// returns offsets in units of stride and whether to mirror (backward side).
struct AStencil {
    std::vector<double> coef;
    std::vector<int> offsets; // grid offsets in units of stride
};

AStencil a_stencil(int order, int ia, int n, int stride) {
    const int last = n - 1;
    auto fits = [&](int lo, int hi) {
        return ia + lo * stride >= 0 && ia + hi * stride <= last;
    };
    AStencil out;
    auto assign = [&](std::span<const double> c, int first, bool mirror) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            const int off = first + static_cast<int>(i);
            out.offsets.push_back(mirror ? -off : off);
            double w = c[i];
            if (mirror && order == 1) w = -w;
            out.coef.push_back(w);
        }
    };
    if (fits(-2, 2)) {
        assign(order == 1 ? std::span<const double>(kD1Center) : std::span<const double>(kD2Center), -2, false);
    } else if (ia < n / 2) {
        // Seam at a = 0: forward-biased stencils.
        const bool at_edge = ia < stride;
        if (order == 1)
            assign(at_edge ? std::span<const double>(kD1Fwd0) : std::span<const double>(kD1Fwd1),
                   at_edge ? 0 : -1, false);
        else
            assign(at_edge ? std::span<const double>(kD2Fwd0) : std::span<const double>(kD2Fwd1),
                   at_edge ? 0 : -1, false);
    } else {
        const bool at_edge = last - ia < stride;
        if (order == 1)
            assign(at_edge ? std::span<const double>(kD1Fwd0) : std::span<const double>(kD1Fwd1),
                   at_edge ? 0 : -1, true);
        else
            assign(at_edge ? std::span<const double>(kD2Fwd0) : std::span<const double>(kD2Fwd1),
                   at_edge ? 0 : -1, true);
    }
    return out;
}

class LogDerivatives {
public:
    LogDerivatives(const std::vector<Eigen::MatrixXcd>& logs, int grid_n, int rank)
        : logs_(logs), n_(grid_n), rank_(rank) {}

    const Eigen::MatrixXcd& at(int ia, int ib) const {
        return logs_[static_cast<std::size_t>(ia) * n_ + ib];
    }

    // d/db and d2/db2 are periodic and centered; d/da and d2/da2 switch to
    // one-sided stencils near the seam.
    Eigen::MatrixXcd db(int order, int ia, int ib, int stride) const {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rank_, rank_);
        const double* coef = order == 1 ? kD1Center : kD2Center;
        for (int i = 0; i < 5; ++i) {
            const int off = i - 2;
            if (coef[i] == 0.0) continue;
            const int jb = ((ib + off * stride) % n_ + n_) % n_;
            acc += coef[i] * at(ia, jb);
        }
        const double h = static_cast<double>(stride) / n_;
        return acc / (order == 1 ? 12.0 * h : 12.0 * h * h);
    }

    Eigen::MatrixXcd da(int order, int ia, int ib, int stride) const {
        const AStencil st = a_stencil(order, ia, n_, stride);
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rank_, rank_);
        for (std::size_t i = 0; i < st.coef.size(); ++i) {
            if (st.coef[i] == 0.0) continue;
            acc += st.coef[i] * at(ia + st.offsets[i] * stride, ib);
        }
        const double h = static_cast<double>(stride) / n_;
        return acc / (order == 1 ? 12.0 * h : 12.0 * h * h);
    }

    Eigen::MatrixXcd dab(int ia, int ib, int stride) const {
        const AStencil st = a_stencil(1, ia, n_, stride);
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rank_, rank_);
        for (std::size_t i = 0; i < st.coef.size(); ++i) {
            if (st.coef[i] == 0.0) continue;
            acc += st.coef[i] * db(1, ia + st.offsets[i] * stride, ib, stride);
        }
        const double h = static_cast<double>(stride) / n_;
        return acc / (12.0 * h);
    }

private:
    const std::vector<Eigen::MatrixXcd>& logs_;
    int n_;
    int rank_;
};

// Coefficient of dxi ^ dxi-bar of dbar(d L): with xi = a tau + b,
// -d_xibar d_xi = -(1/(4 t^2)) (d_aa - 2 Re(tau) d_ab + |tau|^2 d_bb).
Eigen::MatrixXcd curvature_from_log(const LogDerivatives& der, const TorusParams& torus,
                                    int ia, int ib, int stride) {
    const double t = torus.t;
    const double re = torus.tau.real();
    const double abs2 = std::norm(torus.tau);
    const Eigen::MatrixXcd laa = der.da(2, ia, ib, stride);
    const Eigen::MatrixXcd lbb = der.db(2, ia, ib, stride);
    const Eigen::MatrixXcd lab = der.dab(ia, ib, stride);
    return -(laa - 2.0 * re * lab + abs2 * lbb) / (4.0 * t * t);
}

int required_grid(int stride) { return 6 * stride; }

} // namespace

Eigen::MatrixXcd bott_chern_curvature(const GramField& field, int ia, int ib,
                                      const CurvatureOptions& options) {
    const int n = field.grid_n();
    if (n < required_grid(1))
        throw GridTooCoarse("bott_chern_curvature: grid cannot hold a fourth-order stencil");

    // Local log evaluation would suffice, but fields are small; take the lot.
    const auto logs = log_field(field);
    LogDerivatives der(logs, n, field.rank());
    const Eigen::MatrixXcd fine = curvature_from_log(der, field.torus(), ia, ib, 1);

    if (options.richardson_check) {
        if (n < required_grid(2))
            throw GridTooCoarse("bott_chern_curvature: grid too small for the h/2h check");
        const Eigen::MatrixXcd coarse = curvature_from_log(der, field.torus(), ia, ib, 2);
        const double diff = (fine - coarse).cwiseAbs().maxCoeff();
        const double scale = fine.cwiseAbs().maxCoeff();
        if (diff > options.richardson_abs_tol + options.richardson_rel_tol * scale)
            throw GridTooCoarse("bott_chern_curvature: step-h and step-2h results disagree");
    }
    return fine;
}

cplx integrate_two_form(std::span<const double> w, int grid_n, const TorusParams& torus) {
    if (w.size() != static_cast<std::size_t>(grid_n) * grid_n)
        throw InvalidInput("integrate_two_form: expected grid_n^2 samples");
    detail::CompensatedSum acc;
    for (double v : w) acc.add(v);
    const double cell = 1.0 / (static_cast<double>(grid_n) * grid_n);
    // dxi ^ dxi-bar = -2i dx ^ dy; the fundamental cell has area t in (x, y).
    return acc.value() * cell * cplx(0.0, -2.0 * torus.t);
}

CurvatureReport trace_form_and_degree(const GramField& field,
                                      const CurvatureOptions& options) {
    const int n = field.grid_n();
    const int rank = field.rank();
    const double t = field.torus().t;

    CurvatureReport report;
    report.grid_n = n;
    report.rank = rank;
    report.provenance = field.provenance();
    report.trace_coefficients.assign(static_cast<std::size_t>(n) * n, 0.0);

    if (field.provenance() == GramProvenance::qmc) {
        // Statistical noise makes raw second differences meaningless; fit the
        // guaranteed profile log C_jj = alpha a^2 + c_j instead and
        // differentiate the fit exactly.
        report.backend = "profile-fit";
        const auto logs = log_field(field);
        double sxx = 0.0, sxy = 0.0;
        std::vector<double> diag_mean(static_cast<std::size_t>(rank), 0.0);
        double a2_mean = 0.0;
        for (int ia = 0; ia < n; ++ia) {
            const double a = static_cast<double>(ia) / n;
            a2_mean += a * a;
        }
        a2_mean /= n;
        for (int j = 0; j < rank; ++j) {
            double mean = 0.0;
            for (int ia = 0; ia < n; ++ia)
                for (int ib = 0; ib < n; ++ib)
                    mean += logs[static_cast<std::size_t>(ia) * n + ib](j, j).real();
            diag_mean[static_cast<std::size_t>(j)] = mean / (static_cast<double>(n) * n);
        }
        for (int ia = 0; ia < n; ++ia) {
            const double a = static_cast<double>(ia) / n;
            const double dx = a * a - a2_mean;
            for (int ib = 0; ib < n; ++ib)
                for (int j = 0; j < rank; ++j) {
                    const double l = logs[static_cast<std::size_t>(ia) * n + ib](j, j).real();
                    sxy += dx * (l - diag_mean[static_cast<std::size_t>(j)]);
                    sxx += dx * dx;
                }
        }
        const double alpha = sxy / sxx;
        report.profile_alpha = alpha;

        double fit_residual = 0.0;
        double offdiag = 0.0;
        for (int ia = 0; ia < n; ++ia) {
            const double a = static_cast<double>(ia) / n;
            for (int ib = 0; ib < n; ++ib) {
                const auto& l = logs[static_cast<std::size_t>(ia) * n + ib];
                for (int j = 0; j < rank; ++j) {
                    const double fit = alpha * (a * a - a2_mean) + diag_mean[static_cast<std::size_t>(j)];
                    fit_residual = std::max(fit_residual, std::abs(l(j, j).real() - fit));
                    for (int q = 0; q < rank; ++q)
                        if (q != j) offdiag = std::max(offdiag, std::abs(l(j, q)));
                }
            }
        }
        report.profile_fit_residual = fit_residual;
        report.projective_flatness_residual = std::max(fit_residual, offdiag);

        const double w = -alpha * rank / (2.0 * t * t);
        for (double& v : report.trace_coefficients) v = w;
        report.trace_mean = report.trace_min = report.trace_max = w;
        report.degree =
            (cplx(0.0, 1.0) / (2.0 * kPi) *
             integrate_two_form(report.trace_coefficients, n, field.torus()))
                .real();
        report.slope = report.degree / rank;
        report.degree_richardson_error = 0.0;
        return report;
    }

    report.backend = "finite-difference";
    if (n < required_grid(2))
        throw GridTooCoarse("trace_form_and_degree: grid too small for the h/2h check");
    const auto logs = log_field(field);
    LogDerivatives der(logs, n, rank);

    std::vector<double> coarse_trace(static_cast<std::size_t>(n) * n, 0.0);
    double residual = 0.0;
    double worst_diff = 0.0;
    double trace_min = 0.0, trace_max = 0.0, diag_scale = 0.0;
    bool first = true;
    for (int ia = 0; ia < n; ++ia)
        for (int ib = 0; ib < n; ++ib) {
            const Eigen::MatrixXcd fine = curvature_from_log(der, field.torus(), ia, ib, 1);
            const Eigen::MatrixXcd second = curvature_from_log(der, field.torus(), ia, ib, 2);
            worst_diff = std::max(worst_diff, (fine - second).cwiseAbs().maxCoeff());

            const double trace = fine.trace().real();
            report.trace_coefficients[static_cast<std::size_t>(ia) * n + ib] = trace;
            coarse_trace[static_cast<std::size_t>(ia) * n + ib] = second.trace().real();

            double offdiag = 0.0, dmin = fine(0, 0).real(), dmax = fine(0, 0).real();
            for (int p = 0; p < rank; ++p) {
                dmin = std::min(dmin, fine(p, p).real());
                dmax = std::max(dmax, fine(p, p).real());
                for (int q = 0; q < rank; ++q)
                    if (p != q) offdiag = std::max(offdiag, std::abs(fine(p, q)));
            }
            residual = std::max(residual, offdiag + (dmax - dmin));
            diag_scale = std::max(diag_scale, std::abs(trace) / rank);

            trace_min = first ? trace : std::min(trace_min, trace);
            trace_max = first ? trace : std::max(trace_max, trace);
            first = false;
        }

    if (options.richardson_check) {
        const double scale = std::max(std::abs(trace_min), std::abs(trace_max));
        if (worst_diff > options.richardson_abs_tol + options.richardson_rel_tol * scale)
            throw GridTooCoarse("trace_form_and_degree: step-h and step-2h results disagree");
    }

    detail::CompensatedSum mean;
    for (double v : report.trace_coefficients) mean.add(v);
    report.trace_mean = mean.value() / (static_cast<double>(n) * n);
    report.trace_min = trace_min;
    report.trace_max = trace_max;
    report.projective_flatness_residual = diag_scale > 1e-12 ? residual / diag_scale : residual;

    const cplx i_over_2pi(0.0, 1.0 / (2.0 * kPi));
    report.degree =
        (i_over_2pi * integrate_two_form(report.trace_coefficients, n, field.torus())).real();
    const double coarse_degree =
        (i_over_2pi * integrate_two_form(coarse_trace, n, field.torus())).real();
    report.degree_richardson_error = std::abs(report.degree - coarse_degree);
    report.slope = report.degree / rank;
    return report;
}

} // namespace fqhe
