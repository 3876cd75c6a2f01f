// Acceptance gate: every verification criterion at its stated budget and
// tolerance, one PASS/FAIL line each.

#include <iostream>

#include "fqhe/acceptance.hpp"

int main() {
    const auto results = fqhe::run_acceptance(&std::cout);
    const bool ok = fqhe::all_passed(results);
    std::cout << (ok ? "PASS" : "FAIL") << " acceptance suite (" << results.size()
              << " criteria)" << std::endl;
    return ok ? 0 : 1;
}
