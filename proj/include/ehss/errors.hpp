#pragma once

#include <stdexcept>
#include <string>

namespace ehss {

/// Argument outside the mathematical domain of an operation (e.g. lambda <= 0).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A NaN or infinity reached a function that requires finite inputs.
struct NonFiniteState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The control-gain denominator underflowed because |xi3| approached P_d.
struct SaturationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A quantity derived from a diverged (incomplete) simulation log was requested.
struct IncompleteLog : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Configuration file could not be parsed or violates an invariant.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& msg, int line = 0) : std::runtime_error(msg), line_no(line) {}
    int line_no;
};

}  // namespace ehss
