#pragma once

#include <stdexcept>
#include <string>

namespace scarma {

// Malformed or inconsistent input data: CSV schema violations, unordered
// dates, missing columns, empty series.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// An estimation procedure failed to produce a usable result (degenerate
// sample, non-stationary root configuration, optimizer breakdown).
struct EstimationError : std::runtime_error {
    explicit EstimationError(const std::string& what) : std::runtime_error(what) {}
};

// A parameter set or measure change outside the admissible domain.
struct InfeasibleError : std::invalid_argument {
    explicit InfeasibleError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace scarma
