#ifndef FQHE_ACCEPTANCE_HPP
#define FQHE_ACCEPTANCE_HPP

#include <ostream>
#include <string>
#include <vector>

namespace fqhe {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool passed = false;
    std::string details;
    double seconds = 0.0;
};

/// Runs the eight verification criteria end to end at their stated budgets
/// and tolerances (seconds to a couple of minutes of compute). When
/// `progress` is non-null a `[PASS]`/`[FAIL]` line is streamed per criterion
/// as it finishes.
std::vector<CriterionResult> run_acceptance(std::ostream* progress = nullptr);

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace fqhe

#endif
