#pragma once

#include <stdexcept>
#include <string>

namespace miura {

/// Rejected input: wrong sizes, off-node atoms, malformed configuration.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A computation that could not be completed: failed eigenvalue brackets,
/// non-convergent schedules, ambiguous zeros, blow-up guards.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace miura
