#include "fqhe/wen.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "gram_detail.hpp"

namespace fqhe {

namespace {

constexpr double kPi = std::numbers::pi;

cplx ipow(cplx base, long long e) {
    if (e < 0) return 1.0 / ipow(base, -e);
    cplx out = 1.0;
    for (long long i = 0; i < e; ++i) out *= base;
    return out;
}

// Fraction-free (Bareiss) determinant; exact for desk-scale integer matrices.
long long int_det(IntMatrix m) {
    const int n = static_cast<int>(m.rows());
    if (n == 0) throw InvalidInput("int_det: empty matrix");
    long long prev = 1;
    long long sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m(k, k) == 0) {
            int pivot = -1;
            for (int i = k + 1; i < n; ++i)
                if (m(i, k) != 0) { pivot = i; break; }
            if (pivot < 0) return 0;
            m.row(k).swap(m.row(pivot));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j)
                m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
        prev = m(k, k);
    }
    return sign * m(n - 1, n - 1);
}

IntMatrix minor_of(const IntMatrix& m, int row, int col) {
    const int n = static_cast<int>(m.rows());
    IntMatrix out(n - 1, n - 1);
    for (int i = 0, ii = 0; i < n; ++i) {
        if (i == row) continue;
        for (int j = 0, jj = 0; j < n; ++j) {
            if (j == col) continue;
            out(ii, jj++) = m(i, j);
        }
        ++ii;
    }
    return out;
}

IntMatrix int_adjugate(const IntMatrix& m) {
    const int n = static_cast<int>(m.rows());
    IntMatrix adj(n, n);
    if (n == 1) {
        adj(0, 0) = 1;
        return adj;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const long long cof = int_det(minor_of(m, j, i));
            adj(i, j) = ((i + j) % 2 == 0) ? cof : -cof;
        }
    return adj;
}

long long positive_mod(long long v, long long m) {
    const long long r = v % m;
    return r < 0 ? r + m : r;
}

} // namespace

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw InvalidInput("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

KMatrix KMatrix::validate(const IntMatrix& k) {
    if (k.rows() != k.cols() || k.rows() == 0)
        throw InvalidInput("KMatrix: matrix must be square and non-empty");
    const int g = static_cast<int>(k.rows());
    for (int i = 0; i < g; ++i)
        for (int j = i + 1; j < g; ++j)
            if (k(i, j) != k(j, i)) throw NotSymmetric("KMatrix: K must be symmetric");
    // Sylvester criterion with exact leading principal minors.
    for (int r = 1; r <= g; ++r)
        if (int_det(k.topLeftCorner(r, r)) <= 0)
            throw NotPositiveDefinite("KMatrix: K must be positive definite");

    KMatrix out;
    out.mat = k;
    out.det = int_det(k);
    out.adjugate = int_adjugate(k);
    return out;
}

std::vector<double> PiElement::as_doubles() const {
    std::vector<double> out(num.size());
    for (std::size_t i = 0; i < num.size(); ++i)
        out[i] = static_cast<double>(num[i]) / static_cast<double>(den);
    return out;
}

WenDatum validate_wen(const IntMatrix& k, std::span<const long long> n_vec) {
    WenDatum datum;
    datum.k = KMatrix::validate(k);
    const int g = datum.g();
    if (static_cast<int>(n_vec.size()) != g)
        throw InvalidInput("validate_wen: n_vec size must match K");
    for (long long nk : n_vec)
        if (nk <= 0) throw InvalidInput("validate_wen: n_vec entries must be positive");
    datum.n_vec.assign(n_vec.begin(), n_vec.end());

    bool all_even = true, all_odd = true;
    for (int i = 0; i < g; ++i)
        (k(i, i) % 2 == 0 ? all_odd : all_even) = false;
    if (!all_even && !all_odd)
        throw MixedParityDiagonal("validate_wen: diagonal of K must be all even or all odd");
    datum.epsilon_k = all_even ? 1 : -1;

    // K n_vec must equal d * (1,...,1) exactly.
    long long d = 0;
    for (int i = 0; i < g; ++i) {
        long long row = 0;
        for (int j = 0; j < g; ++j) row += k(i, j) * datum.n_vec[static_cast<std::size_t>(j)];
        if (i == 0)
            d = row;
        else if (row != d)
            throw NoUniformD("validate_wen: K * n_vec is not a constant vector");
    }
    if (d <= 0) throw NoUniformD("validate_wen: K * n_vec must be a positive multiple of e");
    datum.d = d;
    datum.delta = datum.k.det;

    datum.u_vec.reserve(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) {
        long long row = 0;
        for (int j = 0; j < g; ++j) row += datum.k.adjugate(i, j);
        const Rational u(row, datum.delta);
        if (u.num <= 0) throw NonpositiveU("validate_wen: entries of K^{-1} e must be positive");
        datum.u_vec.push_back(u);
    }

    datum.n = 0;
    for (long long nk : datum.n_vec) datum.n += nk;
    if ((datum.n * datum.delta) % datum.d != 0)
        throw Error("validate_wen: n*delta/d not an integer (internal inconsistency)");
    datum.n_delta_over_d = datum.n * datum.delta / datum.d;
    datum.cyclic = std::gcd(datum.delta, datum.n_delta_over_d) == 1;
    return datum;
}

// ---------------------------------------------------------------------------
// The group Pi

namespace {

long long encode(const std::vector<long long>& nums, long long delta) {
    long long code = 0;
    for (long long v : nums) code = code * delta + v;
    return code;
}

} // namespace

std::vector<PiElement> enumerate_pi(const KMatrix& k) {
    const int g = k.g();
    const long long delta = k.det;
    double size = 1.0;
    for (int i = 0; i < g; ++i) size *= static_cast<double>(delta);
    if (size > 4e18) throw InvalidInput("enumerate_pi: group too large to enumerate");

    // Classes are numerators of adjugate(K) * v / delta mod 1; the image of
    // the adjugate mod delta is generated by its columns.
    std::vector<std::vector<long long>> gens;
    for (int j = 0; j < g; ++j) {
        std::vector<long long> col(static_cast<std::size_t>(g));
        for (int i = 0; i < g; ++i)
            col[static_cast<std::size_t>(i)] = positive_mod(k.adjugate(i, j), delta);
        gens.push_back(std::move(col));
    }

    std::vector<std::vector<long long>> members{std::vector<long long>(static_cast<std::size_t>(g), 0)};
    std::unordered_set<long long> seen{0};
    for (std::size_t head = 0; head < members.size(); ++head) {
        const std::vector<long long> current = members[head];
        for (const auto& gen : gens) {
            std::vector<long long> next(static_cast<std::size_t>(g));
            for (int i = 0; i < g; ++i)
                next[static_cast<std::size_t>(i)] = positive_mod(
                    current[static_cast<std::size_t>(i)] + gen[static_cast<std::size_t>(i)],
                    delta);
            if (seen.insert(encode(next, delta)).second) members.push_back(std::move(next));
        }
    }
    if (static_cast<long long>(members.size()) != delta)
        throw Error("enumerate_pi: class count does not equal det(K)");

    std::sort(members.begin(), members.end());
    std::vector<PiElement> out;
    out.reserve(members.size());
    for (auto& m : members) out.push_back(PiElement{std::move(m), delta});
    return out;
}

std::vector<PiElement> enumerate_pi(const WenDatum& datum) {
    if (!datum.cyclic) return enumerate_pi(datum.k);
    const int g = datum.g();
    const long long delta = datum.delta;

    std::vector<long long> u(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) {
        long long row = 0;
        for (int j = 0; j < g; ++j) row += datum.k.adjugate(i, j);
        u[static_cast<std::size_t>(i)] = positive_mod(row, delta);
    }

    std::vector<PiElement> out;
    out.reserve(static_cast<std::size_t>(delta));
    for (long long j = 0; j < delta; ++j) {
        std::vector<long long> nums(static_cast<std::size_t>(g));
        for (int i = 0; i < g; ++i)
            nums[static_cast<std::size_t>(i)] =
                positive_mod(j * u[static_cast<std::size_t>(i)], delta);
        out.push_back(PiElement{std::move(nums), delta});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string wen_datum_to_text(const WenDatum& datum) {
    std::ostringstream os;
    const int g = datum.g();
    os << "wen_datum v1\n";
    os << "g " << g << "\n";
    os << "K\n";
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) os << (j ? " " : "") << datum.k.mat(i, j);
        os << "\n";
    }
    os << "n_vec";
    for (long long nk : datum.n_vec) os << " " << nk;
    os << "\n";
    os << "d " << datum.d << "\n";
    os << "delta " << datum.delta << "\n";
    os << "n_total " << datum.n << "\n";
    os << "n_delta_over_d " << datum.n_delta_over_d << "\n";
    os << "epsilon_K " << datum.epsilon_k << "\n";
    os << "u_vec";
    for (const Rational& u : datum.u_vec) os << " " << u.num << "/" << u.den;
    os << "\n";
    os << "cyclic " << (datum.cyclic ? "true" : "false") << "\n";
    return os.str();
}

WenDatum wen_datum_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string word;
    auto expect = [&](const std::string& token) {
        if (!(is >> word) || word != token)
            throw InvalidInput("wen_datum_from_text: expected '" + token + "'");
    };
    expect("wen_datum");
    expect("v1");
    expect("g");
    int g = 0;
    if (!(is >> g) || g < 1) throw InvalidInput("wen_datum_from_text: bad dimension");
    expect("K");
    IntMatrix k(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            if (!(is >> k(i, j))) throw InvalidInput("wen_datum_from_text: bad K entry");
    expect("n_vec");
    std::vector<long long> n_vec(static_cast<std::size_t>(g));
    for (auto& nk : n_vec)
        if (!(is >> nk)) throw InvalidInput("wen_datum_from_text: bad n_vec entry");

    WenDatum datum = validate_wen(k, n_vec);

    auto expect_ll = [&](const std::string& token, long long want) {
        expect(token);
        long long got = 0;
        if (!(is >> got) || got != want)
            throw InvalidInput("wen_datum_from_text: stored '" + token +
                               "' disagrees with the recomputed value");
    };
    expect_ll("d", datum.d);
    expect_ll("delta", datum.delta);
    expect_ll("n_total", datum.n);
    expect_ll("n_delta_over_d", datum.n_delta_over_d);
    expect_ll("epsilon_K", datum.epsilon_k);
    expect("u_vec");
    for (const Rational& u : datum.u_vec) {
        if (!(is >> word)) throw InvalidInput("wen_datum_from_text: missing u_vec entry");
        std::ostringstream want;
        want << u.num << "/" << u.den;
        if (word != want.str())
            throw InvalidInput("wen_datum_from_text: stored u_vec disagrees");
    }
    expect("cyclic");
    if (!(is >> word) || word != (datum.cyclic ? "true" : "false"))
        throw InvalidInput("wen_datum_from_text: stored cyclic flag disagrees");
    return datum;
}

// ---------------------------------------------------------------------------
// Layered configurations and wave functions

LayeredPoint::LayeredPoint(std::vector<std::vector<cplx>> layers, const TorusParams& torus)
    : z(std::move(layers)) {
    y.resize(z.size());
    w.resize(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        y[k].resize(z[k].size());
        cplx sum = 0.0;
        for (std::size_t p = 0; p < z[k].size(); ++p) {
            y[k][p] = z[k][p].imag() / torus.t;
            sum += z[k][p];
        }
        w[k] = sum;
    }
}

LayeredPoint layered_point_from_unit(std::span<const double> u,
                                     std::span<const long long> n_vec,
                                     const TorusParams& torus, bool centered) {
    std::vector<std::vector<cplx>> layers(n_vec.size());
    std::size_t pos = 0;
    for (std::size_t k = 0; k < n_vec.size(); ++k) {
        layers[k].resize(static_cast<std::size_t>(n_vec[k]));
        for (auto& zp : layers[k]) {
            double y = u[pos + 1];
            if (centered && y >= 0.5) y -= 1.0;
            zp = from_lattice_coords(u[pos], y, torus.tau);
            pos += 2;
        }
    }
    if (pos != u.size()) throw InvalidInput("layered_point_from_unit: wrong coordinate count");
    return LayeredPoint(std::move(layers), torus);
}

namespace {

Theta1Series make_layer_jastrow(const TorusParams& torus, Tolerance tol, double y_bound) {
    return Theta1Series(Characteristics1D{0.5, 0.5}, torus.tau, tol, torus.t * 2.0 * y_bound);
}

cplx discriminant_from_series(const WenDatum& datum, const Theta1Series& jastrow,
                              const LayeredPoint& p) {
    const int g = datum.g();
    cplx prod = 1.0;
    for (int k = 0; k < g; ++k) {
        const auto& layer = p.z[static_cast<std::size_t>(k)];
        cplx intra = 1.0;
        for (std::size_t a = 0; a < layer.size(); ++a)
            for (std::size_t b = a + 1; b < layer.size(); ++b)
                intra *= jastrow.eval(layer[a] - layer[b]);
        prod *= ipow(intra, datum.k.mat(k, k));
    }
    for (int k = 0; k < g; ++k)
        for (int l = k + 1; l < g; ++l) {
            cplx inter = 1.0;
            for (const cplx& zp : p.z[static_cast<std::size_t>(k)])
                for (const cplx& zq : p.z[static_cast<std::size_t>(l)])
                    inter *= jastrow.eval(zp - zq);
            prod *= ipow(inter, datum.k.mat(k, l));
        }
    return prod;
}

double point_y_bound(const LayeredPoint& p) {
    double bound = 1.0;
    for (const auto& layer : p.y)
        for (double yk : layer) bound = std::max(bound, std::abs(yk));
    return bound;
}

// |Im(K w + zeta)| row bound for configurations with |y| <= y_bound.
double kvw_arg_bound(const WenDatum& datum, const TorusParams& torus,
                     std::span<const cplx> zeta, double y_bound) {
    const int g = datum.g();
    double sum2 = 0.0;
    for (int k = 0; k < g; ++k) {
        double row = 0.0;
        for (int l = 0; l < g; ++l)
            row += std::abs(static_cast<double>(datum.k.mat(k, l))) *
                   static_cast<double>(datum.n_vec[static_cast<std::size_t>(l)]);
        const double bound = torus.t * row * y_bound + std::abs(zeta[static_cast<std::size_t>(k)].imag());
        sum2 += bound * bound;
    }
    return std::sqrt(sum2);
}

// Gaussian-peak offset for arguments K w + zeta: Im(Omega)^{-1} Im(arg) is
// the per-layer coordinate sum plus K^{-1} Im(zeta) / t, so the offset is
// bounded by ||(n_k y_bound + |K^{-1} Im(zeta)/t|_k)||_2.
double kvw_peak_offset(const WenDatum& datum, const TorusParams& torus,
                       std::span<const cplx> zeta, double y_bound) {
    const int g = datum.g();
    double sum2 = 0.0;
    for (int k = 0; k < g; ++k) {
        double shift = 0.0;
        for (int l = 0; l < g; ++l)
            shift += static_cast<double>(datum.k.adjugate(k, l)) *
                     zeta[static_cast<std::size_t>(l)].imag();
        shift = std::abs(shift) / (static_cast<double>(datum.k.det) * torus.t);
        const double row =
            static_cast<double>(datum.n_vec[static_cast<std::size_t>(k)]) * y_bound + shift;
        sum2 += row * row;
    }
    return std::sqrt(sum2);
}

ThetaGSeries make_kvw_series(const WenDatum& datum, const TorusParams& torus,
                             std::span<const cplx> zeta, const PiElement& c, Tolerance tol,
                             double y_bound) {
    const int g = datum.g();
    Eigen::MatrixXcd omega(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            omega(i, j) = torus.tau * static_cast<double>(datum.k.mat(i, j));
    const std::vector<double> a = c.as_doubles();
    const std::vector<double> b(static_cast<std::size_t>(g), 0.0);
    return ThetaGSeries(a, b, PeriodMatrix(omega), tol,
                        kvw_arg_bound(datum, torus, zeta, y_bound),
                        kvw_peak_offset(datum, torus, zeta, y_bound));
}

} // namespace

cplx discriminant_DK(const WenDatum& datum, const TorusParams& torus, const LayeredPoint& p,
                     Tolerance tol) {
    Theta1Series jastrow = make_layer_jastrow(torus, tol, point_y_bound(p));
    return discriminant_from_series(datum, jastrow, p);
}

cplx kvw_wavefunction(const WenDatum& datum, const TorusParams& torus,
                      std::span<const cplx> zeta, const PiElement& c,
                      const LayeredPoint& p, Tolerance tol) {
    const int g = datum.g();
    if (static_cast<int>(zeta.size()) != g)
        throw InvalidInput("kvw_wavefunction: zeta size must equal g");
    if (static_cast<int>(p.z.size()) != g)
        throw InvalidInput("kvw_wavefunction: point layer count must equal g");
    for (int k = 0; k < g; ++k)
        if (static_cast<long long>(p.z[static_cast<std::size_t>(k)].size()) !=
            datum.n_vec[static_cast<std::size_t>(k)])
            throw InvalidInput("kvw_wavefunction: layer population mismatch");

    const double y_bound = point_y_bound(p);
    ThetaGSeries series = make_kvw_series(datum, torus, zeta, c, tol, y_bound);
    std::vector<cplx> arg(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) {
        cplx acc = zeta[static_cast<std::size_t>(i)];
        for (int j = 0; j < g; ++j)
            acc += static_cast<double>(datum.k.mat(i, j)) * p.w[static_cast<std::size_t>(j)];
        arg[static_cast<std::size_t>(i)] = acc;
    }
    Theta1Series jastrow = make_layer_jastrow(torus, tol, y_bound);
    return series.eval(arg) * discriminant_from_series(datum, jastrow, p);
}

// ---------------------------------------------------------------------------
// Multi-layer inner products (diagonal slice zeta = xi * e)

namespace {

struct KvwDiagonalEvaluator {
    const WenDatum& datum;
    TorusParams torus;
    double a, b;
    std::vector<cplx> zeta;
    std::vector<ThetaGSeries> series; // one per Pi class in frame order
    Theta1Series jastrow;

    KvwDiagonalEvaluator(const WenDatum& datum_, const TorusParams& torus_, double a_,
                         double b_, std::span<const PiElement> frame, Tolerance tol)
        : datum(datum_), torus(torus_), a(a_), b(b_),
          zeta(static_cast<std::size_t>(datum_.g()), a_ * torus_.tau + b_),
          jastrow(make_layer_jastrow(torus_, tol, 0.5)) {
        series.reserve(frame.size());
        for (const PiElement& c : frame)
            series.push_back(make_kvw_series(datum, torus, zeta, c, tol, 0.5));
    }

    void theta_values(const LayeredPoint& p, std::span<cplx> out) const {
        const int g = datum.g();
        std::vector<cplx> arg(static_cast<std::size_t>(g));
        for (int i = 0; i < g; ++i) {
            cplx acc = zeta[static_cast<std::size_t>(i)];
            for (int j = 0; j < g; ++j)
                acc += static_cast<double>(datum.k.mat(i, j)) * p.w[static_cast<std::size_t>(j)];
            arg[static_cast<std::size_t>(i)] = acc;
        }
        for (std::size_t idx = 0; idx < series.size(); ++idx) out[idx] = series[idx].eval(arg);
    }

    double weighted_discriminant_sq(const LayeredPoint& p) const {
        const double dk = std::norm(discriminant_from_series(datum, jastrow, p));
        double sq = 0.0, lin = 0.0;
        for (const auto& layer : p.y)
            for (double yk : layer) {
                sq += yk * yk;
                lin += yk;
            }
        const double t = torus.t;
        return dk * std::exp(-2.0 * kPi * static_cast<double>(datum.d) * t * sq -
                             4.0 * kPi * a * t * lin);
    }
};

std::vector<IntegrationResult> budget_multi(const VectorIntegrand& f, int n_out, int dims,
                                            const IntegrationBudget& budget) {
    if (budget.backend == IntegrationBackend::grid) {
        GridSpec grid{budget.grid_points_per_axis, dims, budget.max_evaluations};
        return torus_quadrature_multi(f, n_out, grid);
    }
    return qmc_integrate_multi(f, n_out, dims, budget.samples, budget.seed,
                               budget.replicates);
}

} // namespace

IntegrationResult multilayer_inner(const WenDatum& datum, const TorusParams& torus,
                                   double a, double b, const PiElement& c1,
                                   const PiElement& c2, const IntegrationBudget& budget) {
    const std::vector<PiElement> frame{c1, c2};
    KvwDiagonalEvaluator eval(datum, torus, a, b, frame, budget.theta_tol);
    const int dims = 2 * static_cast<int>(datum.n);

    auto integrand = [&eval, &datum, &torus,
                      theta = std::vector<cplx>(2)](std::span<const double> u) mutable -> cplx {
        LayeredPoint p = layered_point_from_unit(u, datum.n_vec, torus, true);
        eval.theta_values(p, theta);
        return theta[0] * std::conj(theta[1]) * eval.weighted_discriminant_sq(p);
    };
    auto res = (budget.backend == IntegrationBackend::grid)
                   ? torus_quadrature(integrand,
                                      GridSpec{budget.grid_points_per_axis, dims,
                                               budget.max_evaluations})
                   : qmc_integrate(integrand, dims, budget.samples, budget.seed,
                                   budget.replicates);
    return res;
}

GramMatrixResult multilayer_gram(const WenDatum& datum, const TorusParams& torus, double a,
                                 double b, const IntegrationBudget& budget) {
    const std::vector<PiElement> frame = enumerate_pi(datum);
    const int delta = static_cast<int>(frame.size());
    KvwDiagonalEvaluator eval(datum, torus, a, b, frame, budget.theta_tol);
    const int dims = 2 * static_cast<int>(datum.n);
    const int n_out = detail::tri_count(delta);

    auto integrand = [&eval, &datum, &torus, delta,
                      theta = std::vector<cplx>(static_cast<std::size_t>(delta))](
                         std::span<const double> u, std::span<cplx> out) mutable {
        LayeredPoint point = layered_point_from_unit(u, datum.n_vec, torus, true);
        eval.theta_values(point, theta);
        const double weight = eval.weighted_discriminant_sq(point);
        for (int p = 0; p < delta; ++p)
            for (int q = p; q < delta; ++q)
                out[static_cast<std::size_t>(detail::tri_index(p, q, delta))] =
                    theta[static_cast<std::size_t>(p)] *
                    std::conj(theta[static_cast<std::size_t>(q)]) * weight;
    };
    return detail::hermitian_from_pairs(budget_multi(integrand, n_out, dims, budget), delta);
}

// ---------------------------------------------------------------------------
// Center-of-mass space

namespace {

ThetaGSeries make_center_series(const KMatrix& k, const TorusParams& torus,
                                std::span<const double> a_vec, const PiElement& c,
                                Tolerance tol, double y_bound) {
    const int g = k.g();
    Eigen::MatrixXcd omega(g, g);
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) omega(i, j) = torus.tau * static_cast<double>(k.mat(i, j));
    double sum2 = 0.0;
    double offset2 = 0.0; // Im(Omega)^{-1} Im(arg) = y + K^{-1} a
    for (int i = 0; i < g; ++i) {
        double row = 0.0;
        for (int j = 0; j < g; ++j) row += std::abs(static_cast<double>(k.mat(i, j)));
        const double bound = torus.t * (row * y_bound + std::abs(a_vec[static_cast<std::size_t>(i)]));
        sum2 += bound * bound;
        double kinv_a = 0.0;
        for (int j = 0; j < g; ++j)
            kinv_a += static_cast<double>(k.adjugate(i, j)) * a_vec[static_cast<std::size_t>(j)];
        const double off = y_bound + std::abs(kinv_a) / static_cast<double>(k.det);
        offset2 += off * off;
    }
    const std::vector<double> a = c.as_doubles();
    const std::vector<double> b(static_cast<std::size_t>(g), 0.0);
    return ThetaGSeries(a, b, PeriodMatrix(omega), tol, std::sqrt(sum2), std::sqrt(offset2));
}

} // namespace

cplx center_mass_eval(const KMatrix& k, const TorusParams& torus,
                      std::span<const double> a_vec, std::span<const double> b_vec,
                      const PiElement& c, std::span<const cplx> z_vec, Tolerance tol) {
    const int g = k.g();
    if (static_cast<int>(a_vec.size()) != g || static_cast<int>(b_vec.size()) != g ||
        static_cast<int>(z_vec.size()) != g)
        throw InvalidInput("center_mass_eval: vector sizes must equal g");

    double y_bound = 1.0;
    for (const cplx& z : z_vec) y_bound = std::max(y_bound, std::abs(z.imag()) / torus.t);
    ThetaGSeries series = make_center_series(k, torus, a_vec, c, tol, y_bound);

    std::vector<cplx> arg(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) {
        cplx acc = a_vec[static_cast<std::size_t>(i)] * torus.tau + b_vec[static_cast<std::size_t>(i)];
        for (int j = 0; j < g; ++j)
            acc += static_cast<double>(k.mat(i, j)) * z_vec[static_cast<std::size_t>(j)];
        arg[static_cast<std::size_t>(i)] = acc;
    }
    return series.eval(arg);
}

GramMatrixResult center_mass_gram(const KMatrix& k, const TorusParams& torus,
                                  std::span<const double> a_vec,
                                  std::span<const double> b_vec, const GridSpec& grid,
                                  Tolerance tol) {
    const int g = k.g();
    if (grid.dims != 2 * g) throw InvalidInput("center_mass_gram: grid.dims must equal 2g");
    if (static_cast<int>(a_vec.size()) != g || static_cast<int>(b_vec.size()) != g)
        throw InvalidInput("center_mass_gram: vector sizes must equal g");

    const std::vector<PiElement> frame = enumerate_pi(k);
    const int delta = static_cast<int>(frame.size());
    std::vector<ThetaGSeries> series;
    series.reserve(frame.size());
    for (const PiElement& c : frame)
        series.push_back(make_center_series(k, torus, a_vec, c, tol, 0.5));
    const int n_out = detail::tri_count(delta);

    auto integrand = [&series, &k, &torus, a_vec, b_vec, g, delta,
                      arg = std::vector<cplx>(static_cast<std::size_t>(g)),
                      y = std::vector<double>(static_cast<std::size_t>(g)),
                      h = std::vector<cplx>(static_cast<std::size_t>(delta))](
                         std::span<const double> u, std::span<cplx> out) mutable {
        for (int i = 0; i < g; ++i) {
            const double yi = u[2 * i + 1];
            y[static_cast<std::size_t>(i)] = yi < 0.5 ? yi : yi - 1.0;
        }
        for (int i = 0; i < g; ++i) {
            cplx acc = a_vec[static_cast<std::size_t>(i)] * torus.tau +
                       b_vec[static_cast<std::size_t>(i)];
            for (int j = 0; j < g; ++j)
                acc += static_cast<double>(k.mat(i, j)) *
                       from_lattice_coords(u[2 * j], y[static_cast<std::size_t>(j)], torus.tau);
            arg[static_cast<std::size_t>(i)] = acc;
        }
        double quad = 0.0, lin = 0.0;
        for (int i = 0; i < g; ++i) {
            for (int j = 0; j < g; ++j)
                quad += y[static_cast<std::size_t>(i)] * static_cast<double>(k.mat(i, j)) *
                        y[static_cast<std::size_t>(j)];
            lin += a_vec[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
        }
        const double weight = std::exp(-2.0 * kPi * torus.t * (quad + 2.0 * lin));

        for (int c = 0; c < delta; ++c)
            h[static_cast<std::size_t>(c)] = series[static_cast<std::size_t>(c)].eval(arg);
        for (int p = 0; p < delta; ++p)
            for (int q = p; q < delta; ++q)
                out[static_cast<std::size_t>(detail::tri_index(p, q, delta))] =
                    h[static_cast<std::size_t>(p)] * std::conj(h[static_cast<std::size_t>(q)]) *
                    weight;
    };
    return detail::hermitian_from_pairs(torus_quadrature_multi(integrand, n_out, grid), delta);
}

double kappa_closed(const KMatrix& k, std::span<const double> a_vec, double t) {
    const int g = k.g();
    if (static_cast<int>(a_vec.size()) != g)
        throw InvalidInput("kappa_closed: a_vec size must equal g");
    if (!(t > 0.0)) throw InvalidInput("kappa_closed: t must be > 0");

    double quad = 0.0; // (a, K^{-1} a) via the exact adjugate
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            quad += a_vec[static_cast<std::size_t>(i)] *
                    static_cast<double>(k.adjugate(i, j)) * a_vec[static_cast<std::size_t>(j)];
    quad /= static_cast<double>(k.det);
    return std::pow(2.0 * t, -0.5 * g) / std::sqrt(static_cast<double>(k.det)) *
           std::exp(2.0 * kPi * t * quad);
}

double kappa_printed(const KMatrix& k, std::span<const double> a_vec, double t) {
    const int g = k.g();
    double quad = 0.0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j)
            quad += a_vec[static_cast<std::size_t>(i)] *
                    static_cast<double>(k.adjugate(i, j)) * a_vec[static_cast<std::size_t>(j)];
    quad /= static_cast<double>(k.det);
    return std::pow(2.0 * t * static_cast<double>(k.det), -0.5 * g) *
           std::exp(2.0 * kPi * t * quad);
}

} // namespace fqhe
