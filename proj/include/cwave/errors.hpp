#pragma once

#include <stdexcept>
#include <string>

namespace cwave {

/// Malformed or inconsistent run description (bad grid, CFL violation, bad key).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A structural assumption on the coefficients or nonlinearities does not hold.
class HypothesisViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// History query outside the retained delay window.
class OutOfWindow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data unusable for the requested diagnostic (too few samples, nonpositive values).
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure inside a numerical kernel (eigensolver did not converge, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cwave
