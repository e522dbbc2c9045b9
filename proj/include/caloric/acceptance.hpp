// The fixed verification matrix: nine numbered criteria, each bundling the
// checks that gate a release.  Every criterion reports one pass/fail line
// with its key numbers; tolerances are pinned here, next to the checks.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace caloric {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool passed = false;
    double seconds = 0.0;
    std::string detail;  // key numbers, plus every failed check
};

// Runs all nine criteria in order.  When `live` is non-null each criterion
// prints its one-line result there as it completes.
std::vector<CriterionResult> run_acceptance(int threads, std::ostream* live = nullptr);

}  // namespace caloric
