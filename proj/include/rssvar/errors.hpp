#pragma once

#include <stdexcept>
#include <string>

namespace rssvar {

// Invalid design parameters, or an estimator applied to an incompatible sample.
class DesignError : public std::invalid_argument {
public:
    explicit DesignError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Too few observations for the requested computation.
class InsufficientDataError : public std::runtime_error {
public:
    explicit InsufficientDataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Degenerate numerical situation (no usable bandwidth, zero MSE divisor, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file; the message names the offending row or line.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// No Frey-Feeman coefficients available for an observed stratum-size profile.
class UnsupportedProfileError : public std::runtime_error {
public:
    explicit UnsupportedProfileError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rssvar
