#pragma once

#include <stdexcept>
#include <string>

namespace dicke {

// Invalid parameters or configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Eigensolver failure or an analysis that cannot be certified (exit code 3).
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable or inconsistent spectrum cache entry (exit code 4).
class CacheError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Too little data for a regression or fit.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dicke
