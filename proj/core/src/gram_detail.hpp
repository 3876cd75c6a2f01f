#ifndef FQHE_SRC_GRAM_DETAIL_HPP
#define FQHE_SRC_GRAM_DETAIL_HPP

#include <vector>

#include "fqhe/laughlin.hpp"

namespace fqhe::detail {

// Index of the pair (p, q), p <= q, in the packed upper triangle scan order
// (0,0), (0,1), ..., (0,k-1), (1,1), ...
inline int tri_index(int p, int q, int k) {
    return p * (2 * k - p - 1) / 2 + q;
}

inline int tri_count(int k) { return k * (k + 1) / 2; }

// Hermitian matrix from integration results of the packed upper triangle;
// diagonal entries are forced real (their imaginary parts are integration
// noise bounded by the error estimate).
inline GramMatrixResult hermitian_from_pairs(const std::vector<IntegrationResult>& pairs,
                                             int k) {
    GramMatrixResult out;
    out.value = Eigen::MatrixXcd::Zero(k, k);
    out.error_estimate = Eigen::MatrixXd::Zero(k, k);
    out.evaluations = pairs.empty() ? 0 : pairs.front().evaluations;
    out.backend = pairs.empty() ? IntegrationBackend::grid : pairs.front().backend;
    for (int p = 0; p < k; ++p) {
        for (int q = p; q < k; ++q) {
            const IntegrationResult& r = pairs[static_cast<std::size_t>(tri_index(p, q, k))];
            if (p == q) {
                out.value(p, q) = r.value.real();
            } else {
                out.value(p, q) = r.value;
                out.value(q, p) = std::conj(r.value);
            }
            out.error_estimate(p, q) = r.error_estimate;
            out.error_estimate(q, p) = r.error_estimate;
        }
    }
    return out;
}

} // namespace fqhe::detail

#endif
