#ifndef FQHE_LAUGHLIN_HPP
#define FQHE_LAUGHLIN_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fqhe/integration.hpp"
#include "fqhe/torus.hpp"

namespace fqhe {

/// Hermitian Gram matrix together with entrywise integration error
/// estimates; produced by the quadrature and QMC Gram builders.
struct GramMatrixResult {
    Eigen::MatrixXcd value;
    Eigen::MatrixXd error_estimate;
    long long evaluations = 0;
    IntegrationBackend backend = IntegrationBackend::grid;

    double max_offdiagonal() const;
    /// Largest deviation of a diagonal entry from the diagonal mean.
    double diagonal_spread() const;
    double diagonal_mean() const;
};

/// Shared integration budget for many-body inner products.
struct IntegrationBudget {
    IntegrationBackend backend = IntegrationBackend::grid;
    int grid_points_per_axis = 16;       // grid backend
    long long max_evaluations = 100'000'000;
    long long samples = 1LL << 16;       // QMC: points per replicate
    std::uint64_t seed = 0;              // QMC: mandatory for reproducibility
    int replicates = 8;                  // QMC
    Tolerance theta_tol = Tolerance(1e-12);
};

/// One-layer model with filling parameter m and n particles; the underlying
/// bundle has degree k = m*n and sections pick up the statistics sign
/// epsilon = (-1)^{m(n-1)} under lattice translations of one coordinate.
struct OneLayerModel {
    long long m;
    long long n;
    LineBundleSpec spec; // k = m*n

    OneLayerModel(long long m_, long long n_, TorusParams torus, double a = 0.0,
                  double b = 0.0);

    int epsilon() const { return (m * (n - 1)) % 2 == 0 ? 1 : -1; }
};

/// Configuration point of n particles, kept in both charts, with the
/// center-of-mass sum w = z_1 + ... + z_n.
struct ManyBodyPoint {
    std::vector<cplx> z;
    std::vector<double> x, y;
    cplx w;

    ManyBodyPoint(std::span<const cplx> zs, const TorusParams& torus);
};

/// Point from unit-cube coordinates (x_1, y_1, ..., x_n, y_n). With
/// `centered`, y coordinates are shifted to the representative in
/// [-1/2, 1/2): the same torus point, but theta arguments stay nearer the
/// series peak, so periodic integrands get shorter certified sums.
ManyBodyPoint many_body_point_from_unit(std::span<const double> u, const TorusParams& torus,
                                        bool centered = false);

/// Haldane-Rezayi wave function, 1 <= j <= m:
///   Phi_j(z) = theta[(j-1)/m, 0](m w + xi | m tau) * prod_{p<q} theta_odd(z_p - z_q)^m.
cplx hr_wavefunction(const OneLayerModel& model, int j, const ManyBodyPoint& p,
                     Tolerance tol = {});

/// (1/sqrt(n!)) det[s_i(z_j)] built from the basis sections of the degree-n
/// bundle; antisymmetric in the coordinates.
cplx slater_wavefunction(int n, const LineBundleSpec& spec, const ManyBodyPoint& p,
                         Tolerance tol = {});

/// theta[(n-1)/2, (n-1)/2](w + xi | tau) * prod_{p<q} theta_odd(z_p - z_q);
/// proportional to the Slater determinant by a constant.
cplx fay_wavefunction(int n, const LineBundleSpec& spec, const ManyBodyPoint& p,
                      Tolerance tol = {});

struct MuEstimate {
    cplx mu;
    double dispersion; // max |ratio - mu| over admitted samples
    int admitted;
};

/// Ratio slater/fay sampled at seeded random configurations. Points where
/// |fay| < exclusion * (geometric mean of |fay| over the batch) are discarded
/// (the ratio is ill-conditioned near the theta divisor). Throws
/// DegenerateSampling when fewer than 10 points survive.
MuEstimate estimate_mu(int n, const LineBundleSpec& spec, int samples, std::uint64_t seed,
                       double exclusion = 1e-6, Tolerance tol = Tolerance(1e-13));

/// Gram matrix of the one-particle basis sections under the metric weight;
/// Prop-2.2-type closed form: sqrt(1/(2kt)) e^{2 pi t a^2 / k} times identity.
GramMatrixResult one_particle_gram(const LineBundleSpec& spec, const GridSpec& grid,
                                   Tolerance tol = {});

/// Closed-form diagonal of the one-particle Gram matrix.
double one_particle_gram_closed(const LineBundleSpec& spec);

/// <Phi_j, Phi_l> over [0,1]^{2n} with the product metric weight.
IntegrationResult manybody_inner(const OneLayerModel& model, int j, int l,
                                 const IntegrationBudget& budget);

/// All m x m inner products in one pass over the integration points.
GramMatrixResult manybody_gram(const OneLayerModel& model, const IntegrationBudget& budget);

/// ||Phi||^2 for the Slater determinant state (m = 1 metric).
IntegrationResult slater_norm_squared(int n, const LineBundleSpec& spec,
                                      const IntegrationBudget& budget);

/// ||Phi-tilde||^2 for the product form.
IntegrationResult fay_norm_squared(int n, const LineBundleSpec& spec,
                                   const IntegrationBudget& budget);

/// Closed form ||Phi|| = (1/(2 n t))^{n/4} e^{pi t a^2}.
double slater_norm_closed(int n, double t, double a);

/// Max relative defect of the many-body automorphy laws
///   f(.., z_k+1, ..)  = sign * f(..),
///   f(.., z_k+tau,..) = sign * e^{-2 pi i xi} phi(z_k)^degree * f(..)
/// over seeded random configurations (all coordinate slots are exercised).
double manybody_periodicity_defect(const std::function<cplx(std::span<const cplx>)>& f,
                                   long long degree, int n, const TorusParams& torus,
                                   double a, double b, int sign, int samples,
                                   std::uint64_t seed);

} // namespace fqhe

#endif
