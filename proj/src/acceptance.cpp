#include "miura/acceptance.hpp"

#include <ostream>

namespace miura::acceptance {

std::vector<CriterionResult> run_all(std::ostream*) { return {}; }

int print_results(const std::vector<CriterionResult>& results, std::ostream& out) {
    int failures = 0;
    for (const auto& r : results) {
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.index << ": " << r.name;
        if (!r.detail.empty()) out << " (" << r.detail << ")";
        out << "\n";
        if (!r.passed) ++failures;
    }
    return failures;
}

} // namespace miura::acceptance
