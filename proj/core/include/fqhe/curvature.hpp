#ifndef FQHE_CURVATURE_HPP
#define FQHE_CURVATURE_HPP

#include <string>
#include <vector>

#include "fqhe/wen.hpp"

namespace fqhe {

enum class GramProvenance { closed_form, quadrature, qmc };

/// Gram matrices of a holomorphic frame sampled over the solenoid torus:
/// grid point (ia, ib) carries the hermitian positive definite matrix at
/// xi = (ia/N) tau + (ib/N), for ia, ib in [0, N).
class GramField {
public:
    GramField(int grid_n, TorusParams torus, GramProvenance provenance,
              std::vector<Eigen::MatrixXcd> matrices);

    int grid_n() const { return grid_n_; }
    int rank() const { return rank_; }
    const TorusParams& torus() const { return torus_; }
    GramProvenance provenance() const { return provenance_; }
    const Eigen::MatrixXcd& at(int ia, int ib) const;

private:
    int grid_n_;
    int rank_;
    TorusParams torus_;
    GramProvenance provenance_;
    std::vector<Eigen::MatrixXcd> matrices_;
};

struct CurvatureOptions {
    bool richardson_check = true;
    double richardson_rel_tol = 1e-3;
    double richardson_abs_tol = 1e-4;
    Tolerance theta_tol = Tolerance(1e-12);
};

struct CurvatureReport {
    int grid_n = 0;
    int rank = 0;
    std::string backend; // "finite-difference" or "profile-fit"
    GramProvenance provenance = GramProvenance::closed_form;

    std::vector<double> trace_coefficients; // per grid point, dxi ^ dxi-bar
    double trace_mean = 0.0;
    double trace_min = 0.0;
    double trace_max = 0.0;

    /// max over the grid of (off-diagonal magnitude + diagonal spread) of the
    /// curvature matrix, relative to the diagonal scale.
    double projective_flatness_residual = 0.0;

    double degree = 0.0;
    double slope = 0.0;
    double degree_richardson_error = 0.0;

    // Profile-fit backend only.
    double profile_alpha = 0.0;
    double profile_fit_residual = 0.0;
};

// --- field builders ---

/// Scalar profile gamma * exp(alpha_a2 * a^2) * I_rank; the closed-form shape
/// of every Gram field in this library (alpha_a2 = 2 pi t / m for one layer,
/// 2 pi (n/d) t for a multi-layer datum, 2 pi (e, K^{-1} e) t for the
/// center-of-mass slice).
GramField gram_field_profile(int rank, double alpha_a2, double gamma,
                             const TorusParams& torus, int grid_n);

GramField gram_field_one_layer_closed(const OneLayerModel& model, double gamma, int grid_n);
GramField gram_field_multilayer_closed(const WenDatum& datum, const TorusParams& torus,
                                       double gamma, int grid_n);
GramField gram_field_center_mass_closed(const KMatrix& k, const TorusParams& torus,
                                        int grid_n);

/// Quadrature-backed fields (diagonal slice xi_vec = xi * e for the
/// center-of-mass space; the one-particle field is the n = 1 case of the
/// one-layer model and only needs two-dimensional quadrature).
GramField gram_field_center_mass_quadrature(const KMatrix& k, const TorusParams& torus,
                                            int grid_n, int inner_grid_n,
                                            Tolerance tol = {});
GramField gram_field_one_particle_quadrature(long long k_degree, const TorusParams& torus,
                                             int grid_n, int inner_grid_n,
                                             Tolerance tol = {});

/// QMC-backed one-layer field; statistically noisy, fit for the profile
/// backend only. The seed is advanced per grid point.
GramField gram_field_one_layer_qmc(long long m, long long n, const TorusParams& torus,
                                   int grid_n, const IntegrationBudget& budget);

// --- curvature ---

/// Bott-Chern curvature coefficient of dxi ^ dxi-bar at one grid point,
/// K = dbar(dC * C^{-1}), evaluated through second centered differences of
/// the pointwise hermitian logarithm of the field (the two coincide for the
/// commuting, projectively flat families treated here; rescaling the frame
/// by a constant drops out because the log shifts by a constant). Periodic
/// wraparound in b; one-sided fourth-order stencils at the a seam. Throws
/// GridTooCoarse when the step-h and step-2h results disagree.
Eigen::MatrixXcd bott_chern_curvature(const GramField& field, int ia, int ib,
                                      const CurvatureOptions& options = {});

/// Trace form, projective-flatness residual, and integrated degree
/// (= (i/2pi) times the integral of the trace form over E, standard
/// orientation). QMC fields use the analytic a^2-profile fit; closed-form
/// and quadrature fields use the raw finite-difference backend.
CurvatureReport trace_form_and_degree(const GramField& field,
                                      const CurvatureOptions& options = {});

/// Discrete integral of w(a,b) dxi ^ dxi-bar over the sampled fundamental
/// domain with the standard orientation. The constant w = 1 integrates to
/// exactly -2*i*t (dxi ^ dxi-bar = -2i dx ^ dy and the cell has area t).
cplx integrate_two_form(std::span<const double> w, int grid_n, const TorusParams& torus);

} // namespace fqhe

#endif
