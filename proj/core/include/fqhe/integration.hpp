#ifndef FQHE_INTEGRATION_HPP
#define FQHE_INTEGRATION_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "fqhe/theta.hpp"

namespace fqhe {

enum class IntegrationBackend { grid, lowdiscrepancy };

struct IntegrationResult {
    cplx value{0.0, 0.0};
    double error_estimate = 0.0;
    /// Grid backend: false when N is odd and no Richardson pair exists.
    bool error_reliable = true;
    long long evaluations = 0;
    IntegrationBackend backend = IntegrationBackend::grid;
};

/// Tensor-product grid over [0,1]^dims with N points per axis.
struct GridSpec {
    int points_per_axis = 32;
    int dims = 2;
    long long max_evaluations = 100'000'000;
};

/// Integrand over the unit cube; the coordinate span has grid.dims entries.
using ScalarIntegrand = std::function<cplx(std::span<const double>)>;
/// Writes n_out simultaneous integrand components for one point.
using VectorIntegrand = std::function<void(std::span<const double>, std::span<cplx>)>;

/// Rank-d trapezoid rule (equal-weight rectangle rule, by periodicity) for a
/// 1-periodic integrand. error_estimate is the Richardson difference
/// |value(N) - value(N/2)| when N is even, else 0 with error_reliable=false.
/// Evaluations may be dispatched to worker threads; the reduction is a
/// fixed-order blocked compensated sum, so the result is bit-identical for
/// any worker count.
IntegrationResult torus_quadrature(const ScalarIntegrand& integrand, const GridSpec& grid);

/// Same rule for several components sharing each integrand evaluation
/// (Gram matrices evaluate a frame once per point and integrate all
/// pairwise products together).
std::vector<IntegrationResult> torus_quadrature_multi(const VectorIntegrand& integrand,
                                                      int n_out, const GridSpec& grid);

/// Randomized quasi-Monte Carlo mean over `replicates` digitally shifted
/// copies of a base-2 digital (Sobol) sequence with `samples` points each.
/// value = mean of replicate means; error_estimate = sample standard
/// deviation of the replicate means (modulus deviations for complex values).
/// Deterministic given (seed, samples, replicates).
IntegrationResult qmc_integrate(const ScalarIntegrand& integrand, int dims,
                                long long samples, std::uint64_t seed, int replicates);

std::vector<IntegrationResult> qmc_integrate_multi(const VectorIntegrand& integrand,
                                                   int n_out, int dims, long long samples,
                                                   std::uint64_t seed, int replicates);

/// Worker threads used for integrand dispatch: the FQHE_THREADS environment
/// variable when set, otherwise the hardware concurrency.
int worker_count();

} // namespace fqhe

#endif
