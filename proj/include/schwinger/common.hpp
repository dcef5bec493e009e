#pragma once

#include <stdexcept>
#include <string>

namespace schwinger {

inline const char* version() { return "0.1.0"; }

// Bad input or parameters outside an operation's domain. CLI exit code 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sector larger than the configured maximum.
struct CapacityError : ValidationError {
    using ValidationError::ValidationError;
};

// Iterative solver or quadrature did not converge. CLI exit code 3.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace schwinger
