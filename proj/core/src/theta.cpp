#include "fqhe/theta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fqhe {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(cplx v, const char* what) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw InvalidInput(std::string("theta: non-finite ") + what);
}

// Upper bound on one omitted lattice point at distance r from the origin,
// after completing the square: |term| <= exp(pi*rho^2/lambda) * exp(-pi*lambda*(r-u)^2)
// with u = rho/lambda. The peak factor is applied by the caller.
double shifted_gaussian(double r, double u, double lambda) {
    const double d = r - u;
    if (d <= 0.0) return 1.0;
    return std::exp(-kPi * lambda * d * d);
}

// Upper bound on the number of integer points k with ||k + a||_inf in the
// shell (s-1, s], valid for arbitrary real offsets a: at most 2s+1 points per
// axis lie in the outer cube and at least 2s-3 in the inner one. Kept in
// floating point to survive large s and dim.
double shell_count(int s, int dim) {
    return std::pow(2.0 * s + 1.0, dim) -
           std::pow(std::max(0.0, 2.0 * s - 3.0), dim);
}

// Certified bound on the sum of |term| over all lattice points with
// ||k + a||_inf > N, excluding the peak factor exp(pi*rho^2/lambda).
// exact_positions requires dim == 1 and a genuine characteristic `a`: each
// sup-norm shell then holds exactly one lattice point per side, at a
// position computable from a. The generic path bounds every shell point by
// its inner radius and so stays valid for unknown per-axis offsets.
double tail_sum(double a, double u, double lambda, int N, int dim, bool exact_positions) {
    detail::CompensatedSum acc;
    const int max_shells = 2'000'000;
    for (int s = N + 1; s <= N + max_shells; ++s) {
        double shell;
        if (exact_positions) {
            const double vr = std::floor(s - 1 - a) + 1.0 + a;
            const double vl = std::abs(std::ceil(-s - a) + a);
            shell = shifted_gaussian(vr, u, lambda) + shifted_gaussian(vl, u, lambda);
        } else {
            shell = shell_count(s, dim) * shifted_gaussian(s - 1.0, u, lambda);
        }
        acc.add(shell);
        if (s - 1 > u && shell < 1e-300) break;
        if (s - 1 > u + 1 && shell < 1e-6 * acc.value() && shell < 1e-20) break;
    }
    return acc.value();
}

} // namespace

namespace {

// Shared search: peak_log bounds log of the completed-square maximum of a
// term, u the lattice offset of that maximum.
int radius_search(double a, double u, double peak_log, double lambda, Tolerance tol,
                  int dim, long long term_cap, bool exact_positions) {
    // The nearest omitted point alone contributes at least
    // exp(peak_log - pi*lambda*(n+1-u)^2), so radii below this are hopeless.
    const double deficit = peak_log - std::log(tol.abs_tol);
    double start = 0.0;
    if (deficit > 0.0) start = u - 1.0 + std::sqrt(deficit / (kPi * lambda));
    long long n0 = start > 0.0 ? static_cast<long long>(start) : 0;

    for (long long n = n0;; ++n) {
        long long points = 1;
        bool over = false;
        for (int i = 0; i < dim; ++i) {
            if (n > (term_cap - 1) / 2 || points > term_cap / (2 * n + 1)) {
                over = true;
                break;
            }
            points *= 2 * n + 1;
        }
        if (over)
            throw ToleranceUnachievable(
                "truncation_radius: term cap exceeded before reaching tolerance");
        const double tail =
            tail_sum(a, u, lambda, static_cast<int>(n), dim, exact_positions);
        if (tail == 0.0 || peak_log + std::log(tail) <= std::log(tol.abs_tol))
            return static_cast<int>(n);
    }
}

} // namespace

int truncation_radius(double a, double im_z_norm, double min_eig_im_omega,
                      Tolerance tol, int dim, long long term_cap) {
    if (!(min_eig_im_omega > 0.0))
        throw NonconvergentDomain("truncation_radius: Im(Omega) must be positive definite");
    if (!std::isfinite(a) || !std::isfinite(im_z_norm))
        throw InvalidInput("truncation_radius: non-finite input");

    const double lambda = min_eig_im_omega;
    const double rho = std::abs(im_z_norm);
    // The exact shell-position refinement only applies when `a` really is
    // the characteristic of a one-dimensional series.
    return radius_search(a, rho / lambda, kPi * rho * rho / lambda, lambda, tol, dim,
                         term_cap, dim == 1);
}

// ---------------------------------------------------------------------------
// PeriodMatrix

PeriodMatrix::PeriodMatrix(Eigen::MatrixXcd omega) : omega_(std::move(omega)) {
    if (omega_.rows() != omega_.cols() || omega_.rows() == 0)
        throw InvalidInput("PeriodMatrix: matrix must be square and non-empty");
    const double scale = std::max(1.0, omega_.cwiseAbs().maxCoeff());
    if ((omega_ - omega_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidInput("PeriodMatrix: matrix must be symmetric");
    const Eigen::MatrixXd im = omega_.imag();
    Eigen::LLT<Eigen::MatrixXd> llt(im);
    if (llt.info() != Eigen::Success)
        throw NonconvergentDomain("PeriodMatrix: Im(Omega) must be positive definite");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im, Eigen::EigenvaluesOnly);
    min_eig_im_ = es.eigenvalues().minCoeff();
    if (!(min_eig_im_ > 0.0))
        throw NonconvergentDomain("PeriodMatrix: Im(Omega) must be positive definite");
}

// ---------------------------------------------------------------------------
// 1-dimensional series

Theta1Series::Theta1Series(Characteristics1D ch, cplx tau, Tolerance tol,
                           double im_arg_bound) {
    require_finite(tau, "tau");
    if (!std::isfinite(ch.a) || !std::isfinite(ch.b) || !std::isfinite(im_arg_bound))
        throw InvalidInput("theta: non-finite characteristics or argument bound");
    const double t = tau.imag();
    if (!(t > 0.0)) throw NonconvergentDomain("theta: Im(tau) must be > 0");

    b_ = ch.b;
    radius_ = truncation_radius(ch.a, im_arg_bound, t, tol, 1);

    const double a = ch.a;
    const long long lo = static_cast<long long>(std::ceil(-radius_ - a));
    const long long hi = static_cast<long long>(std::floor(radius_ - a));

    // Walk outward from the center so terms are ordered by increasing |n+a|.
    long long right = static_cast<long long>(std::ceil(-a)); // n + a >= 0
    long long left = right - 1;                              // n + a < 0
    while (right <= hi || left >= lo) {
        bool take_right;
        if (right > hi)
            take_right = false;
        else if (left < lo)
            take_right = true;
        else
            take_right = (right + a) <= -(left + a);
        const long long n = take_right ? right++ : left--;
        const double v = static_cast<double>(n) + a;
        offsets_.push_back(v);
        log_re_.push_back(-kPi * t * v * v);
        log_im_.push_back(kPi * tau.real() * v * v);
    }
}

cplx Theta1Series::eval(cplx arg) const {
    const double aim = 2.0 * kPi * arg.imag();
    const double are = 2.0 * kPi * (arg.real() + b_);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < offsets_.size(); ++i)
        peak = std::max(peak, log_re_[i] - offsets_[i] * aim);
    detail::CompensatedCSum acc;
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        const double mag = std::exp(log_re_[i] - offsets_[i] * aim - peak);
        const double phase = log_im_[i] + offsets_[i] * are;
        acc.add(cplx(mag * std::cos(phase), mag * std::sin(phase)));
    }
    return std::exp(peak) * acc.value();
}

cplx theta1d(Characteristics1D ch, cplx z, cplx tau, Tolerance tol) {
    require_finite(z, "z");
    Theta1Series series(ch, tau, tol, std::abs(z.imag()));
    return series.eval(z);
}

cplx theta1d_partial(Characteristics1D ch, cplx z, cplx tau, int radius) {
    require_finite(z, "z");
    require_finite(tau, "tau");
    if (!(tau.imag() > 0.0)) throw NonconvergentDomain("theta: Im(tau) must be > 0");
    if (radius < 0) throw InvalidInput("theta1d_partial: radius must be >= 0");

    const double a = ch.a;
    const double t = tau.imag();
    const long long lo = static_cast<long long>(std::ceil(-radius - a));
    const long long hi = static_cast<long long>(std::floor(radius - a));
    long long right = static_cast<long long>(std::ceil(-a));
    long long left = right - 1;
    std::vector<double> re, im;
    while (right <= hi || left >= lo) {
        bool take_right;
        if (right > hi)
            take_right = false;
        else if (left < lo)
            take_right = true;
        else
            take_right = (right + a) <= -(left + a);
        const long long n = take_right ? right++ : left--;
        const double v = static_cast<double>(n) + a;
        re.push_back(-kPi * t * v * v - 2.0 * kPi * v * z.imag());
        im.push_back(kPi * tau.real() * v * v + 2.0 * kPi * v * (z.real() + ch.b));
    }
    double peak = -std::numeric_limits<double>::infinity();
    for (double r : re) peak = std::max(peak, r);
    detail::CompensatedCSum acc;
    for (std::size_t i = 0; i < re.size(); ++i) {
        const double mag = std::exp(re[i] - peak);
        acc.add(cplx(mag * std::cos(im[i]), mag * std::sin(im[i])));
    }
    return std::exp(peak) * acc.value();
}

cplx theta_odd(cplx z, cplx tau, Tolerance tol) {
    return theta1d(Characteristics1D{0.5, 0.5}, z, tau, tol);
}

// ---------------------------------------------------------------------------
// g-dimensional series

namespace {

struct LatticeTerm {
    std::vector<long long> k;
    std::vector<double> v; // k + a
    double norm2;
    cplx quad; // (k+a)^T Omega (k+a)
    cplx coef; // exp(pi i quad)
};

std::vector<LatticeTerm> build_terms(std::span<const double> a_vec,
                                     const Eigen::MatrixXcd& omega, int radius,
                                     long long term_cap) {
    const int g = static_cast<int>(a_vec.size());
    std::vector<long long> lo(g), hi(g);
    long long total = 1;
    for (int d = 0; d < g; ++d) {
        lo[d] = static_cast<long long>(std::ceil(-radius - a_vec[d]));
        hi[d] = static_cast<long long>(std::floor(radius - a_vec[d]));
        total *= hi[d] - lo[d] + 1;
        if (total > term_cap)
            throw ToleranceUnachievable("theta_g: term cap exceeded");
    }

    std::vector<LatticeTerm> terms;
    terms.reserve(static_cast<std::size_t>(total));
    std::vector<long long> k(lo.begin(), lo.end());
    while (true) {
        LatticeTerm term;
        term.k = k;
        term.v.resize(g);
        double n2 = 0.0;
        for (int d = 0; d < g; ++d) {
            term.v[d] = static_cast<double>(k[d]) + a_vec[d];
            n2 += term.v[d] * term.v[d];
        }
        term.norm2 = n2;
        cplx quad = 0.0;
        for (int r = 0; r < g; ++r)
            for (int c = 0; c < g; ++c) quad += term.v[r] * omega(r, c) * term.v[c];
        term.quad = quad;
        term.coef = std::exp(cplx(0.0, kPi) * quad);
        terms.push_back(std::move(term));

        int d = g - 1;
        while (d >= 0 && k[d] == hi[d]) { k[d] = lo[d]; --d; }
        if (d < 0) break;
        ++k[d];
    }

    std::sort(terms.begin(), terms.end(), [](const LatticeTerm& x, const LatticeTerm& y) {
        if (x.norm2 != y.norm2) return x.norm2 < y.norm2;
        return x.k < y.k;
    });
    return terms;
}

} // namespace

ThetaGSeries::ThetaGSeries(std::span<const double> a_vec, std::span<const double> b_vec,
                           const PeriodMatrix& omega, Tolerance tol, double im_arg_bound,
                           double peak_offset_bound) {
    g_ = omega.dim();
    if (static_cast<int>(a_vec.size()) != g_ || static_cast<int>(b_vec.size()) != g_)
        throw InvalidInput("ThetaGSeries: characteristic size must match Omega");
    for (int d = 0; d < g_; ++d)
        if (!std::isfinite(a_vec[d]) || !std::isfinite(b_vec[d]))
            throw InvalidInput("ThetaGSeries: non-finite characteristics");

    b_.assign(b_vec.begin(), b_vec.end());
    const double lambda = omega.min_eig_im();
    const double rho = std::abs(im_arg_bound);
    const double offset = peak_offset_bound >= 0.0 ? peak_offset_bound : rho / lambda;
    radius_ = radius_search(0.0, offset, kPi * rho * rho / lambda, lambda, tol, g_,
                            kDefaultTermCap, false);

    auto terms = build_terms(a_vec, omega.matrix(), radius_, kDefaultTermCap);
    offsets_.reserve(terms.size() * g_);
    log_re_.reserve(terms.size());
    log_im_.reserve(terms.size());
    for (const auto& term : terms) {
        offsets_.insert(offsets_.end(), term.v.begin(), term.v.end());
        log_re_.push_back(-kPi * term.quad.imag());
        log_im_.push_back(kPi * term.quad.real());
    }
}

cplx ThetaGSeries::eval(std::span<const cplx> arg) const {
    if (static_cast<int>(arg.size()) != g_)
        throw InvalidInput("ThetaGSeries::eval: argument size must match Omega");
    double peak = -std::numeric_limits<double>::infinity();
    {
        const double* off = offsets_.data();
        for (std::size_t i = 0; i < log_re_.size(); ++i, off += g_) {
            double dot_im = 0.0;
            for (int d = 0; d < g_; ++d) dot_im += off[d] * arg[d].imag();
            peak = std::max(peak, log_re_[i] - 2.0 * kPi * dot_im);
        }
    }
    detail::CompensatedCSum acc;
    const double* off = offsets_.data();
    for (std::size_t i = 0; i < log_re_.size(); ++i, off += g_) {
        double dot_re = 0.0, dot_im = 0.0;
        for (int d = 0; d < g_; ++d) {
            dot_re += off[d] * (arg[d].real() + b_[d]);
            dot_im += off[d] * arg[d].imag();
        }
        const double mag = std::exp(log_re_[i] - 2.0 * kPi * dot_im - peak);
        const double phase = log_im_[i] + 2.0 * kPi * dot_re;
        acc.add(cplx(mag * std::cos(phase), mag * std::sin(phase)));
    }
    return std::exp(peak) * acc.value();
}

cplx theta_g(std::span<const double> a_vec, std::span<const double> b_vec,
             std::span<const cplx> z_vec, const PeriodMatrix& omega, Tolerance tol) {
    if (z_vec.size() != a_vec.size())
        throw InvalidInput("theta_g: argument size must match characteristics");
    double rho2 = 0.0;
    for (const cplx& z : z_vec) {
        require_finite(z, "z");
        rho2 += z.imag() * z.imag();
    }
    ThetaGSeries series(a_vec, b_vec, omega, tol, std::sqrt(rho2));
    return series.eval(z_vec);
}

cplx theta_g_partial(std::span<const double> a_vec, std::span<const double> b_vec,
                     std::span<const cplx> z_vec, const PeriodMatrix& omega,
                     int radius) {
    if (radius < 0) throw InvalidInput("theta_g_partial: radius must be >= 0");
    if (z_vec.size() != a_vec.size() || b_vec.size() != a_vec.size())
        throw InvalidInput("theta_g_partial: size mismatch");
    auto terms = build_terms(a_vec, omega.matrix(), radius, kDefaultTermCap);
    detail::CompensatedCSum acc;
    for (const auto& term : terms) {
        cplx dot = 0.0;
        for (std::size_t d = 0; d < term.v.size(); ++d)
            dot += term.v[d] * (z_vec[d] + b_vec[d]);
        acc.add(term.coef * std::exp(cplx(0.0, 2.0 * kPi) * dot));
    }
    return acc.value();
}

} // namespace fqhe
