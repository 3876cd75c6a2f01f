#ifndef FQHE_REPORT_HPP
#define FQHE_REPORT_HPP

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fqhe/theta.hpp"

namespace fqhe {

/// Shortest round-trippable decimal (17 significant digits).
std::string format_double(double v);

/// Complex in "x+yi" form, e.g. "0.5-0.25i".
std::string format_complex(cplx v);

/// Inverse of format_complex; also accepts pure reals ("1.5"), pure
/// imaginaries ("2i", "-i") and exponents ("1e-3+2.5e4i").
cplx parse_complex(const std::string& text);

/// Structured text report: "key value" lines, "matrix <name> <rows> <cols>"
/// blocks with row-major 17-digit complex entries, and "verdict <name>
/// PASS|FAIL" lines. Volatile content (timestamps, wall times) goes on
/// lines starting with "# " so byte comparison of two runs can skip them.
class Report {
public:
    explicit Report(std::string command);

    void comment(const std::string& text);
    void kv(const std::string& key, const std::string& value);
    void kv(const std::string& key, double value);
    void kv(const std::string& key, long long value);
    void kv(const std::string& key, int value);
    void kv(const std::string& key, cplx value);
    void matrix(const std::string& name, const Eigen::MatrixXcd& m);
    void verdict(const std::string& name, bool pass);

    bool all_passed() const { return failures_ == 0; }
    int verdict_count() const { return verdicts_; }
    std::string str() const;

private:
    std::string body_;
    int verdicts_ = 0;
    int failures_ = 0;
};

} // namespace fqhe

#endif
