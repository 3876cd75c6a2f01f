#include "fqhe/torus.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace fqhe {

namespace {
constexpr double kPi = std::numbers::pi;
}

LatticePoint to_lattice_coords(cplx z, cplx tau) {
    const double t = tau.imag();
    if (!(t > 0.0)) throw NonconvergentDomain("to_lattice_coords: Im(tau) must be > 0");
    const double y = z.imag() / t;
    const double x = z.real() - y * tau.real();
    return LatticePoint{x, y, z.real(), z.imag()};
}

cplx automorphy_phi(cplx z, cplx tau) {
    return std::exp(cplx(0.0, -kPi) * tau + cplx(0.0, -2.0 * kPi) * z);
}

double metric_h(const LineBundleSpec& spec, double y) {
    const double t = spec.torus.t;
    return std::exp(-2.0 * kPi * spec.k * t * y * y - 4.0 * kPi * spec.a * t * y);
}

namespace {

// The sharp space is spanned by e^{pi i z} times the plain basis at xi sharp.
cplx sharp_twist(cplx z) { return std::exp(cplx(0.0, kPi) * z); }

Theta1Series make_section_series(const LineBundleSpec& spec, int j, Tolerance tol,
                                 double y_bound) {
    const double k = static_cast<double>(spec.k);
    const double a_char = (static_cast<double>(j) - 1.0) / k;
    const double a_xi = spec.sharp ? spec.a + 0.5 : spec.a;
    // Argument of the series is k z + xi; |Im| <= t (k y_bound + |a|).
    const double im_bound = spec.torus.t * (k * y_bound + std::abs(a_xi));
    return Theta1Series(Characteristics1D{a_char, 0.0}, k * spec.torus.tau, tol, im_bound);
}

cplx section_argument(const LineBundleSpec& spec, cplx z) {
    const cplx xi = spec.sharp ? spec.xi_sharp() : spec.xi();
    return static_cast<double>(spec.k) * z + xi;
}

} // namespace

cplx section_basis_eval(const LineBundleSpec& spec, int j, cplx z, Tolerance tol) {
    if (spec.k <= 0) throw InvalidInput("section_basis_eval: k must be > 0");
    if (j < 1 || j > spec.k) throw InvalidInput("section_basis_eval: j out of range");
    const double y = z.imag() / spec.torus.t;
    Theta1Series series = make_section_series(spec, j, tol, std::abs(y));
    const cplx value = series.eval(section_argument(spec, z));
    return spec.sharp ? sharp_twist(z) * value : value;
}

SectionBasis::SectionBasis(LineBundleSpec spec, Tolerance tol, double y_bound)
    : spec_(std::move(spec)) {
    if (spec_.k <= 0) throw InvalidInput("SectionBasis: k must be > 0");
    series_.reserve(static_cast<std::size_t>(spec_.k));
    for (int j = 1; j <= spec_.k; ++j)
        series_.push_back(make_section_series(spec_, j, tol, y_bound));
}

cplx SectionBasis::eval(int j, cplx z) const {
    if (j < 1 || j > spec_.k) throw InvalidInput("SectionBasis::eval: j out of range");
    const cplx value = series_[static_cast<std::size_t>(j - 1)].eval(section_argument(spec_, z));
    return spec_.sharp ? sharp_twist(z) * value : value;
}

double quasi_periodicity_defect(const std::function<cplx(cplx)>& f,
                                const LineBundleSpec& spec, int samples,
                                std::uint64_t seed) {
    if (samples < 1) throw InvalidInput("quasi_periodicity_defect: samples must be >= 1");
    const cplx tau = spec.torus.tau;
    const double sign = spec.sharp ? -1.0 : 1.0;
    const cplx xi_factor = std::exp(cplx(0.0, -2.0 * kPi) * spec.xi());

    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const double x = detail::canonical_u01(rng);
        const double y = detail::canonical_u01(rng);
        const cplx z = from_lattice_coords(x, y, tau);
        const cplx fz = f(z);
        const cplx f1 = f(z + 1.0);
        const cplx ft = f(z + tau);

        const cplx want1 = sign * fz;
        const double d1 = std::abs(f1 - want1) / (std::abs(f1) + std::abs(want1) + 1e-300);

        // phi(z)^k evaluated as a single exponential to avoid pow() branch cuts.
        const cplx phik =
            std::exp(static_cast<double>(spec.k) * (cplx(0.0, -kPi) * tau + cplx(0.0, -2.0 * kPi) * z));
        const cplx want2 = sign * xi_factor * phik * fz;
        const double d2 = std::abs(ft - want2) / (std::abs(ft) + std::abs(want2) + 1e-300);

        worst = std::max(worst, std::max(d1, d2));
    }
    return worst;
}

} // namespace fqhe
