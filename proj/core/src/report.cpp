#include "fqhe/report.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace fqhe {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_complex(cplx v) {
    std::string out = format_double(v.real());
    const std::string im = format_double(v.imag());
    if (!im.empty() && im[0] == '-')
        out += im;
    else
        out += "+" + im;
    out += "i";
    return out;
}

cplx parse_complex(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw InvalidInput("parse_complex: empty string");

    auto parse_real = [](std::string part) -> double {
        if (part.empty() || part == "+") part = "1";
        if (part == "-") part = "-1";
        if (part.size() > 1 && part[0] == '+') part.erase(0, 1); // from_chars rejects '+'
        double value = 0.0;
        const char* first = part.data();
        const char* last = part.data() + part.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last)
            throw InvalidInput("parse_complex: bad number '" + part + "'");
        return value;
    };

    if (s.back() != 'i' && s.back() != 'I') return cplx(parse_real(s), 0.0);

    s.pop_back();
    // Split at the last top-level +/- that is not an exponent sign.
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        const char c = s[i];
        if ((c == '+' || c == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos) return cplx(0.0, parse_real(s));
    return cplx(parse_real(s.substr(0, split)), parse_real(s.substr(split)));
}

Report::Report(std::string command) {
    body_ = "fqhe report v1\n";
    body_ += "command " + command + "\n";
}

void Report::comment(const std::string& text) { body_ += "# " + text + "\n"; }

void Report::kv(const std::string& key, const std::string& value) {
    body_ += key + " " + value + "\n";
}

void Report::kv(const std::string& key, double value) { kv(key, format_double(value)); }

void Report::kv(const std::string& key, long long value) { kv(key, std::to_string(value)); }

void Report::kv(const std::string& key, int value) { kv(key, std::to_string(value)); }

void Report::kv(const std::string& key, cplx value) { kv(key, format_complex(value)); }

void Report::matrix(const std::string& name, const Eigen::MatrixXcd& m) {
    body_ += "matrix " + name + " " + std::to_string(m.rows()) + " " +
             std::to_string(m.cols()) + "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) body_ += " ";
            body_ += format_complex(m(r, c));
        }
        body_ += "\n";
    }
}

void Report::verdict(const std::string& name, bool pass) {
    ++verdicts_;
    if (!pass) ++failures_;
    body_ += "verdict " + name + " " + (pass ? "PASS" : "FAIL") + "\n";
}

std::string Report::str() const { return body_; }

} // namespace fqhe
