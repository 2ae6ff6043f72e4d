#ifndef RDMASS_ERRORS_HPP
#define RDMASS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rdmass {

/// Invalid argument to a builder or operation (bad rates, bad matrix, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed or inconsistent run configuration. Maps to exit code 64.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric breakdown inside a solver or evaluation. Maps to exit code 70.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// A time step could not keep the state nonnegative within the retry budget.
class PositivityError : public std::runtime_error {
public:
    explicit PositivityError(const std::string& what) : std::runtime_error(what) {}
};

/// Cumulative clamped mass exceeded the configured budget.
class ClampBudgetError : public std::runtime_error {
public:
    explicit ClampBudgetError(const std::string& what) : std::runtime_error(what) {}
};

/// Divergence detected (sup-norm threshold crossed or non-finite values).
class BlowupError : public std::runtime_error {
public:
    BlowupError(const std::string& what, double t) : std::runtime_error(what), t_detected(t) {}
    double t_detected;
};

/// File could not be read or written; the message carries the path.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rdmass

#endif
