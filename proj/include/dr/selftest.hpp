#ifndef DR_SELFTEST_HPP
#define DR_SELFTEST_HPP

#include <ostream>
#include <string>
#include <vector>

namespace dr {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    std::string detail;
};

// Runs the acceptance suite. Quick mode shrinks instance counts and skips
// the scale criterion. When `progress` is given, one line per criterion is
// written as it finishes.
std::vector<CriterionResult> run_acceptance(bool quick, std::ostream* progress = nullptr);

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace dr

#endif
