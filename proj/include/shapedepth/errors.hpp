#pragma once

#include <stdexcept>
#include <string>

namespace shapedepth {

// Input that could not be parsed (CSV/JSON/config). CLI exit code 2.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched dimensions between inputs. CLI exit code 3.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Iterative procedure failed to converge. CLI exit code 5.
struct convergence_error : std::runtime_error {
    convergence_error(const std::string& msg, double residual)
        : std::runtime_error(msg), residual(residual) {}
    double residual = 0.0;
};

// std::domain_error is used for invalid parameter values (non-SPD matrices,
// out-of-range tuning constants, ...). CLI exit code 4.

}  // namespace shapedepth
