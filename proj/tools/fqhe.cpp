// Command-line driver: parse an experiment description, dispatch the
// computation, and emit a machine-readable structured-text report.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "fqhe/acceptance.hpp"
#include "fqhe/curvature.hpp"
#include "fqhe/report.hpp"

namespace {

using namespace fqhe;

constexpr double kPi = std::numbers::pi;

constexpr int kExitNumerical = 1;
constexpr int kExitValidation = 2;
constexpr int kExitUsage = 64;

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::vector<double> parse_double_vector(const std::string& text) {
    std::vector<double> out;
    std::istringstream is(text);
    double v = 0.0;
    while (is >> v) out.push_back(v);
    if (out.empty()) throw InvalidInput("expected a space-separated list of numbers");
    return out;
}

std::vector<long long> parse_int_vector(const std::string& text) {
    std::vector<long long> out;
    std::istringstream is(text);
    long long v = 0;
    while (is >> v) out.push_back(v);
    if (out.empty()) throw InvalidInput("expected a space-separated list of integers");
    return out;
}

IntMatrix parse_int_matrix(const std::string& text) {
    std::vector<std::vector<long long>> rows;
    std::string row_text;
    std::istringstream rows_in(text);
    while (std::getline(rows_in, row_text, ';')) rows.push_back(parse_int_vector(row_text));
    if (rows.empty()) throw InvalidInput("expected matrix rows separated by ';'");
    const std::size_t cols = rows.front().size();
    IntMatrix m(static_cast<int>(rows.size()), static_cast<int>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw InvalidInput("ragged matrix rows");
        for (std::size_t j = 0; j < cols; ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
    return m;
}

std::vector<std::vector<cplx>> parse_layers(const std::string& text) {
    std::vector<std::vector<cplx>> layers;
    std::string layer_text;
    std::istringstream layers_in(text);
    while (std::getline(layers_in, layer_text, ';')) {
        std::vector<cplx> layer;
        std::string entry;
        std::istringstream entries(layer_text);
        while (std::getline(entries, entry, ',')) layer.push_back(parse_complex(entry));
        layers.push_back(std::move(layer));
    }
    if (layers.empty()) throw InvalidInput("expected point layers separated by ';'");
    return layers;
}

struct OutputOpt {
    std::string path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--out", path, "write the report to this file instead of stdout");
    }

    int emit(Report& report, std::chrono::steady_clock::time_point start) const {
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        report.comment("timestamp " + timestamp_utc());
        report.comment("wall_time_s " + format_double(wall));
        if (path.empty()) {
            std::cout << report.str();
        } else {
            std::ofstream os(path);
            if (!os) throw InvalidInput("cannot open output file: " + path);
            os << report.str();
        }
        return report.all_passed() ? 0 : kExitNumerical;
    }
};

// --- theta ---

struct ThetaCmd {
    double a = 0.0, b = 0.0;
    std::string z_text = "0+0i", tau_text = "0+1i";
    double tol = 1e-12;
    bool odd = false;
    OutputOpt out;

    int run() const {
        const auto start = std::chrono::steady_clock::now();
        const cplx tau = parse_complex(tau_text);
        const cplx z = parse_complex(z_text);
        const Characteristics1D ch = odd ? Characteristics1D{0.5, 0.5}
                                         : Characteristics1D{a, b};
        const Tolerance tolerance(tol);

        const cplx value = theta1d(ch, z, tau, tolerance);
        const int radius = truncation_radius(ch.a, std::abs(z.imag()), tau.imag(), tolerance);
        const double cert =
            std::abs(theta1d_partial(ch, z, tau, radius) - theta1d_partial(ch, z, tau, radius + 3));

        const cplx factor1 = std::exp(cplx(0.0, 2.0 * kPi) * ch.a);
        const cplx factor_tau =
            std::exp(cplx(0.0, -2.0 * kPi) * (z + ch.b) + cplx(0.0, -kPi) * tau);
        const double qp1 = std::abs(theta1d(ch, z + 1.0, tau, tolerance) - factor1 * value);
        const double qp2 = std::abs(theta1d(ch, z + tau, tau, tolerance) - factor_tau * value);

        Report report("theta");
        report.kv("a", ch.a);
        report.kv("b", ch.b);
        report.kv("z", z);
        report.kv("tau", tau);
        report.kv("abs_tol", tol);
        report.kv("value", value);
        report.kv("truncation_radius", radius);
        report.kv("certificate_residual", cert);
        report.kv("quasi_periodicity_residual_1", qp1);
        report.kv("quasi_periodicity_residual_tau", qp2);
        report.verdict("truncation_certificate", cert <= tol);
        report.verdict("quasi_periodicity",
                       qp1 <= 10.0 * tol && qp2 <= 10.0 * tol * (1.0 + std::abs(factor_tau)));
        return out.emit(report, start);
    }
};

// --- gram ---

struct GramCmd {
    long long k = 1;
    std::string tau_text = "0+1i";
    double xi_a = 0.0, xi_b = 0.0;
    int grid = 64;
    double tol = 1e-12;
    OutputOpt out;

    int run() const {
        const auto start = std::chrono::steady_clock::now();
        const TorusParams torus(parse_complex(tau_text));
        const LineBundleSpec spec{torus, k, xi_a, xi_b, false};
        const auto gram = one_particle_gram(spec, GridSpec{grid, 2}, Tolerance(tol));
        const double closed = one_particle_gram_closed(spec);
        const Eigen::MatrixXcd expect =
            closed * Eigen::MatrixXcd::Identity(static_cast<int>(k), static_cast<int>(k));
        const double deviation = (gram.value - expect).cwiseAbs().maxCoeff();
        const double err = gram.error_estimate.maxCoeff();

        Report report("gram");
        report.kv("k", k);
        report.kv("tau", torus.tau);
        report.kv("xi_a", xi_a);
        report.kv("xi_b", xi_b);
        report.kv("grid", grid);
        report.matrix("gram", gram.value);
        report.kv("max_offdiagonal", gram.max_offdiagonal());
        report.kv("diagonal_spread", gram.diagonal_spread());
        report.kv("closed_form_diagonal", closed);
        report.kv("max_deviation_from_closed_form", deviation);
        report.kv("max_error_estimate", err);
        report.kv("evaluations", gram.evaluations);
        report.verdict("orthonormal_scalar_matrix",
                       deviation <= std::max(1e-9, 4.0 * err));
        return out.emit(report, start);
    }
};

// --- norm ---

struct NormCmd {
    std::string model = "slater";
    long long n = 2, m = 2;
    std::string tau_text = "0+1i";
    double xi_a = 0.0, xi_b = 0.0;
    std::string backend = "grid";
    int grid = 16;
    long long samples = 1 << 16;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int replicates = 8;
    double tol = 1e-12;
    OutputOpt out;

    IntegrationBudget budget() const {
        IntegrationBudget b;
        if (backend == "grid") {
            b.backend = IntegrationBackend::grid;
        } else if (backend == "qmc") {
            if (!seed_set)
                throw InvalidInput("norm: --seed is mandatory for the qmc backend");
            b.backend = IntegrationBackend::lowdiscrepancy;
        } else {
            throw InvalidInput("norm: backend must be grid or qmc");
        }
        b.grid_points_per_axis = grid;
        b.samples = samples;
        b.seed = seed;
        b.replicates = replicates;
        b.theta_tol = Tolerance(tol);
        return b;
    }

    int run() const {
        const auto start = std::chrono::steady_clock::now();
        const TorusParams torus(parse_complex(tau_text));
        Report report("norm");
        report.kv("model", model);
        report.kv("tau", torus.tau);
        report.kv("xi_a", xi_a);
        report.kv("xi_b", xi_b);
        report.kv("backend", backend);

        if (model == "slater") {
            const LineBundleSpec spec{torus, n, xi_a, xi_b, false};
            const auto res = slater_norm_squared(static_cast<int>(n), spec, budget());
            const double closed = slater_norm_closed(static_cast<int>(n), torus.t, xi_a);
            const double closed2 = closed * closed;
            const double dev = std::abs(res.value.real() - closed2);
            report.kv("n", n);
            report.kv("norm_squared", res.value.real());
            report.kv("error_estimate", res.error_estimate);
            report.kv("evaluations", res.evaluations);
            report.kv("closed_form_norm", closed);
            report.kv("closed_form_norm_squared", closed2);
            report.kv("deviation", dev);
            report.verdict("matches_closed_form",
                           dev <= std::max(1e-6 * closed2, 4.0 * res.error_estimate));
        } else if (model == "hr") {
            OneLayerModel one(m, n, torus, xi_a, xi_b);
            const auto gram = manybody_gram(one, budget());
            report.kv("m", m);
            report.kv("n", n);
            report.matrix("inner_products", gram.value);
            report.matrix("error_estimates",
                          gram.error_estimate.cast<cplx>());
            report.kv("evaluations", gram.evaluations);
            bool orthogonal = true;
            for (int p = 0; p < gram.value.rows(); ++p)
                for (int q = p + 1; q < gram.value.cols(); ++q)
                    orthogonal = orthogonal &&
                                 std::abs(gram.value(p, q)) <=
                                     std::max(1e-9, 4.0 * gram.error_estimate(p, q));
            report.verdict("off_diagonals_vanish", orthogonal);
            const double spread = gram.diagonal_spread();
            const double diag_err = gram.error_estimate.diagonal().maxCoeff();
            report.kv("diagonal_spread", spread);
            report.verdict("diagonal_degenerate", spread <= std::max(1e-9, 8.0 * diag_err));
        } else {
            throw InvalidInput("norm: model must be slater or hr");
        }
        return out.emit(report, start);
    }
};

// --- wen-validate ---

struct WenValidateCmd {
    std::string k_text;
    std::string n_text;
    OutputOpt out;

    int run() const {
        const auto start = std::chrono::steady_clock::now();
        const IntMatrix k = parse_int_matrix(k_text);
        const std::vector<long long> n_vec = parse_int_vector(n_text);
        const WenDatum datum = validate_wen(k, n_vec);

        Report report("wen-validate");
        std::istringstream lines(wen_datum_to_text(datum));
        std::string line;
        while (std::getline(lines, line)) report.kv("datum", line.empty() ? "." : line);
        const auto pi = enumerate_pi(datum);
        report.kv("pi_order", static_cast<long long>(pi.size()));
        for (std::size_t i = 0; i < pi.size(); ++i) {
            std::string text;
            for (std::size_t j = 0; j < pi[i].num.size(); ++j)
                text += (j ? " " : "") + std::to_string(pi[i].num[j]) + "/" +
                        std::to_string(pi[i].den);
            report.kv("pi_" + std::to_string(i), text);
        }
        return out.emit(report, start);
    }
};

// --- kvw ---

struct KvwCmd {
    std::string k_text;
    std::string n_text;
    int c_index = 0;
    double xi_a = 0.0, xi_b = 0.0;
    std::string zeta_text;
    std::string point_text;
    std::uint64_t seed = 1;
    double tol = 1e-12;
    std::string tau_text = "0+1i";
    OutputOpt out;

    int run() const {
        const auto start = std::chrono::steady_clock::now();
        const TorusParams torus(parse_complex(tau_text));
        const WenDatum datum = validate_wen(parse_int_matrix(k_text), parse_int_vector(n_text));
        const auto frame = enumerate_pi(datum);
        if (c_index < 0 || c_index >= static_cast<int>(frame.size()))
            throw InvalidInput("kvw: --c out of range");

        std::vector<cplx> zeta(static_cast<std::size_t>(datum.g()),
                               xi_a * torus.tau + xi_b);
        if (!zeta_text.empty()) {
            zeta.clear();
            std::string entry;
            std::istringstream entries(zeta_text);
            while (std::getline(entries, entry, ',')) zeta.push_back(parse_complex(entry));
            if (static_cast<int>(zeta.size()) != datum.g())
                throw InvalidInput("kvw: zeta must have g entries");
        }

        std::vector<std::vector<cplx>> layers;
        if (!point_text.empty()) {
            layers = parse_layers(point_text);
        } else {
            std::mt19937_64 rng(seed);
            layers.resize(static_cast<std::size_t>(datum.g()));
            for (int k = 0; k < datum.g(); ++k)
                for (long long p = 0; p < datum.n_vec[static_cast<std::size_t>(k)]; ++p)
                    layers[static_cast<std::size_t>(k)].push_back(from_lattice_coords(
                        detail::canonical_u01(rng), detail::canonical_u01(rng), torus.tau));
        }
        const LayeredPoint point(layers, torus);
        const cplx value = kvw_wavefunction(datum, torus, zeta, frame[static_cast<std::size_t>(c_index)],
                                            point, Tolerance(tol));
        const cplx dk = discriminant_DK(datum, torus, point, Tolerance(tol));

        Report report("kvw");
        report.kv("tau", torus.tau);
        report.kv("c_index", c_index);
        for (int k = 0; k < datum.g(); ++k) {
            std::string text;
            for (const cplx& zp : point.z[static_cast<std::size_t>(k)])
                text += (text.empty() ? "" : ",") + format_complex(zp);
            report.kv("layer_" + std::to_string(k), text);
        }
        report.kv("value", value);
        report.kv("discriminant", dk);
        return out.emit(report, start);
    }
};

// --- center-gram ---

struct CenterGramCmd {
    std::string k_text;
    std::string tau_text = "0+1i";
    std::string a_text = "0";
    std::string b_text = "0";
    int grid = 32;
    double tol = 1e-12;
    OutputOpt out;

    int run() const {
        const auto start = std::chrono::steady_clock::now();
        const TorusParams torus(parse_complex(tau_text));
        const KMatrix k = KMatrix::validate(parse_int_matrix(k_text));
        std::vector<double> a_vec = parse_double_vector(a_text);
        std::vector<double> b_vec = parse_double_vector(b_text);
        if (a_vec.size() == 1) a_vec.assign(static_cast<std::size_t>(k.g()), a_vec.front());
        if (b_vec.size() == 1) b_vec.assign(static_cast<std::size_t>(k.g()), b_vec.front());

        const auto gram = center_mass_gram(k, torus, a_vec, b_vec,
                                           GridSpec{grid, 2 * k.g(), 1'000'000'000LL},
                                           Tolerance(tol));
        const double gauss = kappa_closed(k, a_vec, torus.t);
        const double printed = kappa_printed(k, a_vec, torus.t);
        const double diag = gram.diagonal_mean();

        Report report("center-gram");
        report.kv("tau", torus.tau);
        report.kv("delta", k.det);
        report.kv("grid", grid);
        report.matrix("gram", gram.value);
        report.kv("evaluations", gram.evaluations);
        report.kv("max_offdiagonal", gram.max_offdiagonal());
        report.kv("diagonal_spread", gram.diagonal_spread());
        report.kv("diagonal_mean", diag);
        report.kv("kappa_gaussian_integral", gauss);
        report.kv("kappa_printed_prefactor", printed);
        if (std::abs(gauss - printed) > 1e-15 * gauss)
            report.kv("prefactor_note",
                      "candidates disagree; quadrature selects the closer one");
        report.verdict("scalar_matrix",
                       gram.max_offdiagonal() <= std::max(1e-8 * diag, 4.0 * gram.error_estimate.maxCoeff()) &&
                           gram.diagonal_spread() <= std::max(1e-8 * diag, 4.0 * gram.error_estimate.maxCoeff()));
        report.verdict("matches_gaussian_integral_prefactor",
                       std::abs(diag - gauss) <= std::max(1e-8 * gauss, 4.0 * gram.error_estimate.maxCoeff()));
        return out.emit(report, start);
    }
};

// --- curvature ---

struct CurvatureCmd {
    std::string model = "one-layer";
    long long m = 2, n = 2;
    std::string k_text;
    std::string n_text;
    std::string tau_text = "0+1i";
    int grid = 64;
    std::string backend = "closed";
    double gamma = 1.0;
    int inner_grid = 32;
    long long samples = 1 << 14;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int replicates = 4;
    OutputOpt out;

    int run() const {
        const auto start = std::chrono::steady_clock::now();
        const TorusParams torus(parse_complex(tau_text));

        GramField field = [&]() -> GramField {
            if (model == "one-layer") {
                OneLayerModel one(m, n, torus);
                if (backend == "closed") return gram_field_one_layer_closed(one, gamma, grid);
                if (backend == "quadrature")
                    // n = 1 is the one-particle bundle; higher n needs QMC.
                    return gram_field_one_particle_quadrature(m, torus, grid, inner_grid);
                if (backend == "qmc") {
                    if (!seed_set)
                        throw InvalidInput("curvature: --seed is mandatory for the qmc backend");
                    IntegrationBudget budget;
                    budget.backend = IntegrationBackend::lowdiscrepancy;
                    budget.samples = samples;
                    budget.seed = seed;
                    budget.replicates = replicates;
                    return gram_field_one_layer_qmc(m, n, torus, grid, budget);
                }
                throw InvalidInput("curvature: backend must be closed, quadrature or qmc");
            }
            if (model == "multilayer") {
                const WenDatum datum =
                    validate_wen(parse_int_matrix(k_text), parse_int_vector(n_text));
                if (backend != "closed")
                    throw InvalidInput("curvature: multilayer supports the closed backend");
                return gram_field_multilayer_closed(datum, torus, gamma, grid);
            }
            if (model == "center-mass") {
                const KMatrix k = KMatrix::validate(parse_int_matrix(k_text));
                if (backend == "closed") return gram_field_center_mass_closed(k, torus, grid);
                if (backend == "quadrature")
                    return gram_field_center_mass_quadrature(k, torus, grid, inner_grid);
                throw InvalidInput("curvature: center-mass supports closed or quadrature");
            }
            throw InvalidInput("curvature: model must be one-layer, multilayer or center-mass");
        }();

        const CurvatureReport rep = trace_form_and_degree(field);

        Report report("curvature");
        report.kv("model", model);
        report.kv("backend_requested", backend);
        report.kv("backend_used", rep.backend);
        report.kv("tau", torus.tau);
        report.kv("grid", grid);
        report.kv("rank", rep.rank);
        report.kv("trace_coefficient_mean", rep.trace_mean);
        report.kv("trace_coefficient_min", rep.trace_min);
        report.kv("trace_coefficient_max", rep.trace_max);
        report.kv("projective_flatness_residual", rep.projective_flatness_residual);
        report.kv("degree", rep.degree);
        report.kv("slope", rep.slope);
        report.kv("degree_richardson_error", rep.degree_richardson_error);
        if (rep.backend == "profile-fit") {
            report.kv("profile_alpha", rep.profile_alpha);
            report.kv("profile_fit_residual", rep.profile_fit_residual);
        }
        const double nearest = std::round(rep.degree);
        report.kv("nearest_integer_degree", static_cast<long long>(nearest));
        report.verdict("degree_is_integer", std::abs(rep.degree - nearest) <= 1e-6 ||
                                                field.provenance() == GramProvenance::qmc);
        if (field.provenance() == GramProvenance::closed_form)
            report.verdict("projectively_flat", rep.projective_flatness_residual <= 1e-8);
        return out.emit(report, start);
    }
};

// --- verify ---

struct VerifyCmd {
    OutputOpt out;

    int run() const {
        const auto start = std::chrono::steady_clock::now();
        const auto results = run_acceptance(&std::cout);
        Report report("verify");
        for (const auto& r : results) {
            report.kv("criterion_" + std::to_string(r.index) + "_name", r.name);
            report.kv("criterion_" + std::to_string(r.index) + "_details",
                      r.details.empty() ? "." : r.details);
            report.comment("criterion_" + std::to_string(r.index) + "_seconds " +
                           format_double(r.seconds));
            report.verdict("criterion_" + std::to_string(r.index), r.passed);
        }
        const bool ok = all_passed(results);
        report.verdict("acceptance_suite", ok);
        std::cout << (ok ? "PASS" : "FAIL") << " acceptance suite (" << results.size()
                  << " criteria)\n";
        if (!out.path.empty()) out.emit(report, start);
        return ok ? 0 : kExitNumerical;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"explicit torus-FQHE numerics: theta functions, many-body norms,"
                 " Gram matrices, and magnetic-bundle curvature"};
    app.require_subcommand(1);
    // Placed before the subcommand: fqhe --config exp.ini gram ...
    // Sections name the subcommand; explicit flags win over file values.
    app.set_config("--config", "", "read options from an INI file with [subcommand] sections");

    ThetaCmd theta;
    auto* theta_cmd = app.add_subcommand("theta", "evaluate a theta function with certification");
    theta_cmd->add_option("--a", theta.a, "first characteristic");
    theta_cmd->add_option("--b", theta.b, "second characteristic");
    theta_cmd->add_option("--z", theta.z_text, "argument, written as x+yi");
    theta_cmd->add_option("--tau", theta.tau_text, "modular parameter, Im > 0");
    theta_cmd->add_option("--tol", theta.tol, "absolute tolerance");
    theta_cmd->add_flag("--odd", theta.odd, "evaluate the odd theta (a=b=1/2)");
    theta.out.attach(theta_cmd);

    GramCmd gram;
    auto* gram_cmd = app.add_subcommand("gram", "one-particle Gram matrix vs closed form");
    gram_cmd->add_option("--k", gram.k, "bundle degree")->required();
    gram_cmd->add_option("--tau", gram.tau_text, "modular parameter");
    gram_cmd->add_option("--xi-a", gram.xi_a, "solenoid parameter a (xi = a tau + b)");
    gram_cmd->add_option("--xi-b", gram.xi_b, "solenoid parameter b");
    gram_cmd->add_option("--grid", gram.grid, "quadrature points per axis");
    gram_cmd->add_option("--tol", gram.tol, "theta tolerance");
    gram.out.attach(gram_cmd);

    NormCmd norm;
    auto* norm_cmd = app.add_subcommand("norm", "many-body norms and inner products");
    norm_cmd->add_option("--model", norm.model, "slater or hr");
    norm_cmd->add_option("--n", norm.n, "particle count")->required();
    norm_cmd->add_option("--m", norm.m, "filling parameter (hr model)");
    norm_cmd->add_option("--tau", norm.tau_text, "modular parameter");
    norm_cmd->add_option("--xi-a", norm.xi_a, "solenoid parameter a");
    norm_cmd->add_option("--xi-b", norm.xi_b, "solenoid parameter b");
    norm_cmd->add_option("--backend", norm.backend, "grid or qmc");
    norm_cmd->add_option("--grid", norm.grid, "grid points per axis");
    norm_cmd->add_option("--samples", norm.samples, "QMC samples per replicate");
    norm_cmd->add_option("--seed", norm.seed, "QMC seed (mandatory for qmc)")
        ->each([&norm](const std::string&) { norm.seed_set = true; });
    norm_cmd->add_option("--replicates", norm.replicates, "QMC replicates");
    norm_cmd->add_option("--tol", norm.tol, "theta tolerance");
    norm.out.attach(norm_cmd);

    WenValidateCmd wen;
    auto* wen_cmd = app.add_subcommand("wen-validate", "validate a multi-layer datum");
    wen_cmd->add_option("--K", wen.k_text, "integer matrix, rows separated by ';'")->required();
    wen_cmd->add_option("--n", wen.n_text, "particle counts per layer")->required();
    wen.out.attach(wen_cmd);

    KvwCmd kvw;
    auto* kvw_cmd = app.add_subcommand("kvw", "evaluate a multi-layer wave function");
    kvw_cmd->add_option("--K", kvw.k_text, "integer matrix")->required();
    kvw_cmd->add_option("--n", kvw.n_text, "particle counts per layer")->required();
    kvw_cmd->add_option("--c", kvw.c_index, "index into the Pi frame");
    kvw_cmd->add_option("--tau", kvw.tau_text, "modular parameter");
    kvw_cmd->add_option("--xi-a", kvw.xi_a, "diagonal solenoid parameter a");
    kvw_cmd->add_option("--xi-b", kvw.xi_b, "diagonal solenoid parameter b");
    kvw_cmd->add_option("--zeta", kvw.zeta_text, "general zeta, entries x+yi separated by ','");
    kvw_cmd->add_option("--point", kvw.point_text,
                        "configuration: layers separated by ';', particles by ','");
    kvw_cmd->add_option("--seed", kvw.seed, "seed for a random configuration");
    kvw_cmd->add_option("--tol", kvw.tol, "theta tolerance");
    kvw.out.attach(kvw_cmd);

    CenterGramCmd center;
    auto* center_cmd = app.add_subcommand("center-gram", "center-of-mass Gram matrix");
    center_cmd->add_option("--K", center.k_text, "integer matrix")->required();
    center_cmd->add_option("--tau", center.tau_text, "modular parameter");
    center_cmd->add_option("--a", center.a_text, "a vector (single value broadcasts)");
    center_cmd->add_option("--b", center.b_text, "b vector (single value broadcasts)");
    center_cmd->add_option("--grid", center.grid, "quadrature points per axis");
    center_cmd->add_option("--tol", center.tol, "theta tolerance");
    center.out.attach(center_cmd);

    CurvatureCmd curv;
    auto* curv_cmd = app.add_subcommand("curvature", "Bott-Chern curvature and degree");
    curv_cmd->add_option("--model", curv.model, "one-layer, multilayer or center-mass");
    curv_cmd->add_option("--m", curv.m, "one-layer filling parameter");
    curv_cmd->add_option("--n-particles", curv.n, "one-layer particle count");
    curv_cmd->add_option("--K", curv.k_text, "integer matrix (multilayer / center-mass)");
    curv_cmd->add_option("--n", curv.n_text, "layer populations (multilayer)");
    curv_cmd->add_option("--tau", curv.tau_text, "modular parameter");
    curv_cmd->add_option("--grid", curv.grid, "solenoid grid points per axis");
    curv_cmd->add_option("--backend", curv.backend, "closed, quadrature or qmc");
    curv_cmd->add_option("--gamma", curv.gamma, "overall Gram scale (drops out)");
    curv_cmd->add_option("--inner-grid", curv.inner_grid, "quadrature points per axis per Gram");
    curv_cmd->add_option("--samples", curv.samples, "QMC samples per replicate");
    curv_cmd->add_option("--seed", curv.seed, "QMC seed")
        ->each([&curv](const std::string&) { curv.seed_set = true; });
    curv_cmd->add_option("--replicates", curv.replicates, "QMC replicates");
    curv.out.attach(curv_cmd);

    VerifyCmd verify;
    auto* verify_cmd = app.add_subcommand("verify", "run the full acceptance suite");
    verify.out.attach(verify_cmd);

    int exit_code = 0;
    theta_cmd->callback([&] { exit_code = theta.run(); });
    gram_cmd->callback([&] { exit_code = gram.run(); });
    norm_cmd->callback([&] { exit_code = norm.run(); });
    wen_cmd->callback([&] { exit_code = wen.run(); });
    kvw_cmd->callback([&] { exit_code = kvw.run(); });
    center_cmd->callback([&] { exit_code = center.run(); });
    curv_cmd->callback([&] { exit_code = curv.run(); });
    verify_cmd->callback([&] { exit_code = verify.run(); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << std::flush;
        return kExitUsage;
    } catch (const InvalidInput& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return exit_code;
}
