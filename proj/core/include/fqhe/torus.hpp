#ifndef FQHE_TORUS_HPP
#define FQHE_TORUS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "fqhe/theta.hpp"

namespace fqhe {

/// A point of C written in both charts: z = x + tau*y = u + i*v.
struct LatticePoint {
    double x, y; // lattice chart
    double u, v; // standard chart
};

/// Coordinates of z with respect to the lattice basis (1, tau):
/// y = Im(z)/t, x = Re(z) - y*Re(tau).
LatticePoint to_lattice_coords(cplx z, cplx tau);

inline cplx from_lattice_coords(double x, double y, cplx tau) {
    return cplx(x, 0.0) + tau * y;
}

/// The automorphy factor phi(z) = exp(-pi*i*tau - 2*pi*i*z); sections of the
/// degree-k bundle pick up e^{-2 pi i xi} phi(z)^k under z -> z + tau.
cplx automorphy_phi(cplx z, cplx tau);

/// Degree-k line bundle labelled by the solenoid parameter xi = a*tau + b.
/// xi is stored through (a, b); it is never recovered by solving a linear
/// system in floating point. `sharp` selects the variant whose sections flip
/// sign under both lattice translations.
struct LineBundleSpec {
    TorusParams torus;
    long long k;
    double a = 0.0;
    double b = 0.0;
    bool sharp = false;

    cplx xi() const { return a * torus.tau + b; }
    /// xi + (1+tau)/2, the plain parameter isomorphic to the sharp bundle at xi.
    cplx xi_sharp() const { return (a + 0.5) * torus.tau + (b + 0.5); }
};

/// Hermitian metric weight h_{k,xi}(y) = exp(-2 pi k t y^2 - 4 pi a t y).
/// Depends only on y and the (k, a) part of the bundle data.
double metric_h(const LineBundleSpec& spec, double y);

/// j-th distinguished basis section of the k-dimensional space of holomorphic
/// sections, 1 <= j <= k:
///   s_j(z) = theta[(j-1)/k, 0](k z + xi | k tau).
/// For sharp bundles the basis of the sign-flipped space is returned, namely
/// e^{pi i z} * theta[(j-1)/k, 0](k z + xi + (1+tau)/2 | k tau).
cplx section_basis_eval(const LineBundleSpec& spec, int j, cplx z, Tolerance tol = {});

/// Plan-based evaluator for the whole basis (s_1, ..., s_k); reuses the
/// precomputed lattice data of each theta series across many arguments.
/// y_bound is the largest |Im z| / t the evaluator will be asked for.
class SectionBasis {
public:
    SectionBasis(LineBundleSpec spec, Tolerance tol, double y_bound = 1.0);

    cplx eval(int j, cplx z) const; // 1 <= j <= k
    const LineBundleSpec& spec() const { return spec_; }

private:
    LineBundleSpec spec_;
    std::vector<Theta1Series> series_;
};

/// Maximum relative defect of the two automorphy laws
///   f(z+1)  = c f(z),      f(z+tau) = c e^{-2 pi i xi} phi(z)^k f(z)
/// over `samples` seeded random points of the fundamental domain, with
/// c = -1 when spec.sharp and +1 otherwise. Genuine sections score at the
/// level of the evaluation tolerance; arbitrary functions score O(1).
double quasi_periodicity_defect(const std::function<cplx(cplx)>& f,
                                const LineBundleSpec& spec, int samples,
                                std::uint64_t seed);

namespace detail {
/// Uniform double in [0,1) from the top 53 bits of a 64-bit draw; identical
/// across platforms, unlike std::uniform_real_distribution.
template <typename Rng>
double canonical_u01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
} // namespace detail

} // namespace fqhe

#endif
