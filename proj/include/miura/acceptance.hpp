#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace miura::acceptance {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the full verification battery (closed-form reproductions, fiber
/// dichotomy, eigenvalue and Green checks, the evolution pipeline) at the
/// pinned tolerances. Progress lines go to *progress when given.
std::vector<CriterionResult> run_all(std::ostream* progress = nullptr);

/// One "[PASS]/[FAIL] k: name (detail)" line per criterion; returns the
/// number of failures.
int print_results(const std::vector<CriterionResult>& results, std::ostream& out);

} // namespace miura::acceptance
