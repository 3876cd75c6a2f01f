#ifndef FQHE_THETA_HPP
#define FQHE_THETA_HPP

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fqhe/errors.hpp"

namespace fqhe {

using cplx = std::complex<double>;

/// Absolute tolerance request for a series evaluation.
struct Tolerance {
    double abs_tol;
    Tolerance(double tol = 1e-12) : abs_tol(tol) {
        if (!(tol > 0.0)) throw InvalidInput("Tolerance: abs_tol must be > 0");
    }
};

/// Modular parameter of the torus C / <1, tau> and its imaginary part t > 0.
struct TorusParams {
    cplx tau;
    double t;
    explicit TorusParams(cplx tau_) : tau(tau_), t(tau_.imag()) {
        if (!(t > 0.0)) throw NonconvergentDomain("TorusParams: Im(tau) must be > 0");
    }
};

/// Real characteristics of a 1-dimensional theta series. They are used
/// exactly as given; no reduction mod 1 is applied.
struct Characteristics1D {
    double a = 0.0;
    double b = 0.0;
};

/// Symmetric g x g period matrix with positive definite imaginary part.
class PeriodMatrix {
public:
    explicit PeriodMatrix(Eigen::MatrixXcd omega);

    const Eigen::MatrixXcd& matrix() const { return omega_; }
    int dim() const { return static_cast<int>(omega_.rows()); }
    /// Smallest eigenvalue of Im(Omega); controls the Gaussian decay rate.
    double min_eig_im() const { return min_eig_im_; }

private:
    Eigen::MatrixXcd omega_;
    double min_eig_im_;
};

inline constexpr long long kDefaultTermCap = 10'000'000; // lattice points per evaluation

/// Smallest truncation radius N such that the sum of the absolute values of
/// every series term with ||k + a||_inf > N is certifiably <= tol. The bound
/// completes the square of the Gaussian exponent, so arguments with large
/// imaginary part only shift the peak instead of inflating N. In one
/// dimension the two lattice points of each sup-norm shell are located
/// exactly (that is what the characteristic `a` is used for); for dim >= 2 a
/// shell-counting bound is used.
///
/// Throws ToleranceUnachievable when (2N+1)^dim would exceed term_cap.
int truncation_radius(double a, double im_z_norm, double min_eig_im_omega,
                      Tolerance tol, int dim = 1,
                      long long term_cap = kDefaultTermCap);

/// theta[a,b](z | tau) = sum_n exp(pi*i*tau*(n+a)^2 + 2*pi*i*(n+a)*(z+b)).
///
/// The returned value carries a certified truncation error <= tol; floating
/// accumulation (compensated, terms in order of increasing |n+a|) adds at
/// most a few ulp of the sum of term magnitudes on top of that.
cplx theta1d(Characteristics1D ch, cplx z, cplx tau, Tolerance tol = {});

/// Partial sum of theta1d over the lattice points with |n + a| <= radius.
/// Exposed so that truncation certificates (radius N versus N+3) can be
/// checked directly.
cplx theta1d_partial(Characteristics1D ch, cplx z, cplx tau, int radius);

/// The odd theta function theta[1/2,1/2](z | tau); has a simple zero at z=0.
cplx theta_odd(cplx z, cplx tau, Tolerance tol = {});

/// g-dimensional theta with characteristics:
/// Theta[a,b](z | Omega) = sum_{k in Z^g} exp(pi*i*(k+a)^T Omega (k+a)
///                                            + 2*pi*i*(k+a).(z+b)).
cplx theta_g(std::span<const double> a_vec, std::span<const double> b_vec,
             std::span<const cplx> z_vec, const PeriodMatrix& omega,
             Tolerance tol = {});

/// Partial sum of theta_g over the cube ||k + a||_inf <= radius.
cplx theta_g_partial(std::span<const double> a_vec, std::span<const double> b_vec,
                     std::span<const cplx> z_vec, const PeriodMatrix& omega,
                     int radius);

/// Reusable 1-dimensional theta series with fixed characteristics and
/// modular parameter. The truncation radius is certified once for every
/// argument with |Im(arg)| <= im_arg_bound, and the z-independent Gaussian
/// exponents are precomputed, so eval() costs one exponential per lattice
/// term. Terms are summed after factoring out the largest magnitude, which
/// keeps the absolute rounding error at a few ulp of the peak term even when
/// the value is exponentially large. Intended for quadrature loops that
/// evaluate the same series at millions of points.
class Theta1Series {
public:
    Theta1Series(Characteristics1D ch, cplx tau, Tolerance tol, double im_arg_bound);

    cplx eval(cplx arg) const;
    int radius() const { return radius_; }
    std::size_t term_count() const { return offsets_.size(); }

private:
    double b_;
    int radius_;
    std::vector<double> offsets_; // n + a, in order of increasing |n + a|
    std::vector<double> log_re_;  // -pi t (n+a)^2
    std::vector<double> log_im_;  // pi Re(tau) (n+a)^2
};

/// g-dimensional counterpart of Theta1Series. im_arg_bound is an upper bound
/// on the Euclidean norm of Im(arg) over all intended evaluation points.
/// peak_offset_bound, when >= 0, is a bound on ||Im(Omega)^{-1} Im(arg)||_2,
/// the lattice offset of the Gaussian peak; callers whose arguments have the
/// structure Im(arg) = Im(Omega) y + const know it much more tightly than the
/// generic ||Im(arg)|| / lambda_min and get a smaller radius.
class ThetaGSeries {
public:
    ThetaGSeries(std::span<const double> a_vec, std::span<const double> b_vec,
                 const PeriodMatrix& omega, Tolerance tol, double im_arg_bound,
                 double peak_offset_bound = -1.0);

    cplx eval(std::span<const cplx> arg) const;
    int dim() const { return g_; }
    int radius() const { return radius_; }
    std::size_t term_count() const { return log_re_.size(); }

private:
    int g_;
    int radius_;
    std::vector<double> b_;
    std::vector<double> offsets_; // g entries per term: k + a
    std::vector<double> log_re_;  // Re/Im of pi i (k+a)^T Omega (k+a)
    std::vector<double> log_im_;
};

namespace detail {

/// Neumaier-compensated accumulator; summation error stays O(eps) per term
/// independent of the term count.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

struct CompensatedCSum {
    CompensatedSum re, im;
    void add(cplx x) {
        re.add(x.real());
        im.add(x.imag());
    }
    cplx value() const { return {re.value(), im.value()}; }
};

} // namespace detail

} // namespace fqhe

#endif
