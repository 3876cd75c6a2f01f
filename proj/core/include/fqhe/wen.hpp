#ifndef FQHE_WEN_HPP
#define FQHE_WEN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fqhe/laughlin.hpp"

namespace fqhe {

using IntMatrix = Eigen::Matrix<long long, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

/// Exact fraction with reduced positive denominator. Group-theoretic
/// bookkeeping (u_vec, Pi representatives) stays in integer arithmetic;
/// floating point enters only at theta-evaluation time.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rational&) const = default;
};

/// Validated symmetric positive definite integer matrix with its exact
/// determinant and adjugate (all minors computed by fraction-free
/// elimination; entries are desk-scale integers).
struct KMatrix {
    IntMatrix mat;
    long long det = 0;   // delta > 0
    IntMatrix adjugate;  // det * K^{-1}, integer entries

    int g() const { return static_cast<int>(mat.rows()); }

    /// Throws NotSymmetric / NotPositiveDefinite.
    static KMatrix validate(const IntMatrix& k);
};

/// Class of K^{-1} Z^g / Z^g held as exact numerators over the common
/// denominator det(K), entries reduced into [0, den).
struct PiElement {
    std::vector<long long> num;
    long long den = 1;

    std::vector<double> as_doubles() const;
    bool operator==(const PiElement&) const = default;
};

/// Validated multi-layer datum: K symmetric positive definite with uniform
/// diagonal parity, and K * n_vec = d * (1,...,1) exactly.
struct WenDatum {
    KMatrix k;
    std::vector<long long> n_vec;
    long long d = 0;
    long long delta = 0;
    long long n = 0; // total particle number
    long long n_delta_over_d = 0;
    std::vector<Rational> u_vec; // K^{-1} (1,...,1) = n_vec / d
    int epsilon_k = 1;           // +1 all-even diagonal, -1 all-odd
    bool cyclic = false;         // gcd(delta, n*delta/d) == 1

    int g() const { return k.g(); }
};

/// Full validation; throws NotSymmetric, NotPositiveDefinite,
/// MixedParityDiagonal, NoUniformD or NonpositiveU.
WenDatum validate_wen(const IntMatrix& k, std::span<const long long> n_vec);

/// All det(K) classes of K^{-1} Z^g / Z^g, lexicographically sorted.
std::vector<PiElement> enumerate_pi(const KMatrix& k);

/// For a cyclic datum the list is ordered as 0, u, 2u, ..., (delta-1)u, the
/// frame order of the degenerate states; otherwise it falls back to the
/// lexicographic enumeration.
std::vector<PiElement> enumerate_pi(const WenDatum& datum);

/// Plain-text serialization with bit-exact round trip.
std::string wen_datum_to_text(const WenDatum& datum);
WenDatum wen_datum_from_text(const std::string& text);

/// Configuration of n_1 + ... + n_g particles split over g layers.
struct LayeredPoint {
    std::vector<std::vector<cplx>> z;  // z[layer][particle]
    std::vector<std::vector<double>> y;
    std::vector<cplx> w; // per-layer coordinate sums

    LayeredPoint(std::vector<std::vector<cplx>> layers, const TorusParams& torus);
};

/// `centered` shifts y coordinates to [-1/2, 1/2), as in
/// many_body_point_from_unit.
LayeredPoint layered_point_from_unit(std::span<const double> u,
                                     std::span<const long long> n_vec,
                                     const TorusParams& torus, bool centered = false);

/// Discriminant factor: product over intra-layer pairs of
/// theta_odd(z_p - z_q)^{K_kk} and inter-layer pairs of theta_odd^{K_kl}.
cplx discriminant_DK(const WenDatum& datum, const TorusParams& torus,
                     const LayeredPoint& p, Tolerance tol = {});

/// Keski-Vakkuri-Wen wave function
///   Phi_c = Theta[c, 0](K w + zeta | tau K) * D_K.
cplx kvw_wavefunction(const WenDatum& datum, const TorusParams& torus,
                      std::span<const cplx> zeta, const PiElement& c,
                      const LayeredPoint& p, Tolerance tol = {});

/// <Phi_c1, Phi_c2> over [0,1]^{2n} on the diagonal slice zeta = xi*(1,..,1),
/// xi = a tau + b, with metric weight prod h_{d,xi}(z_p^{(k)}).
IntegrationResult multilayer_inner(const WenDatum& datum, const TorusParams& torus,
                                   double a, double b, const PiElement& c1,
                                   const PiElement& c2, const IntegrationBudget& budget);

/// All delta x delta inner products in one pass, frame ordered by
/// enumerate_pi(datum).
GramMatrixResult multilayer_gram(const WenDatum& datum, const TorusParams& torus, double a,
                                 double b, const IntegrationBudget& budget);

/// Center-of-mass basis H_c(z) = Theta[c, 0](K z + xi | tau K); defined for
/// any symmetric positive definite K. xi = tau * a_vec + b_vec.
cplx center_mass_eval(const KMatrix& k, const TorusParams& torus,
                      std::span<const double> a_vec, std::span<const double> b_vec,
                      const PiElement& c, std::span<const cplx> z_vec, Tolerance tol = {});

/// Gram matrix of (H_c) over Pi with weight exp(-2 pi t (y, K y + 2 a));
/// grid.dims must equal 2g.
GramMatrixResult center_mass_gram(const KMatrix& k, const TorusParams& torus,
                                  std::span<const double> a_vec,
                                  std::span<const double> b_vec, const GridSpec& grid,
                                  Tolerance tol = {});

/// Gaussian-integral value of the scalar Gram entry:
///   (2t)^{-g/2} det(K)^{-1/2} exp(2 pi t (a, K^{-1} a)).
/// Coincides with the one-particle closed form at g = 1.
double kappa_closed(const KMatrix& k, std::span<const double> a_vec, double t);

/// The (2 t delta)^{-g/2} prefactor variant, reported alongside kappa_closed
/// for comparison; the two agree exactly when g = 1 or det(K) = 1.
double kappa_printed(const KMatrix& k, std::span<const double> a_vec, double t);

} // namespace fqhe

#endif
