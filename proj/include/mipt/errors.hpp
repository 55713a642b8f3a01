// errors.hpp — exception types shared by the library and the command-line runner.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mipt {

// Out-of-range physical or numerical parameters.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Run configuration that cannot be executed (e.g. a time step too coarse
// for the measurement probability).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The similarity transform is undefined when some b_{m-1} vanishes (alpha = 0).
class DegenerateSimilarity : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A quantity requested in the wrong phase (e.g. x_L in the smooth phase).
class PhaseError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Closed-form Riccati solution evaluated at or beyond its pole.
class DivergedError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Cusp operations need an even number of sites so that x = 1/2 is a grid point.
class UnsupportedGrid : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, std::ptrdiff_t index = -1)
        : std::runtime_error(what), index_(index) {}
    std::ptrdiff_t index() const noexcept { return index_; }

private:
    std::ptrdiff_t index_;
};

class IntegrationFailure : public std::runtime_error {
public:
    IntegrationFailure(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace mipt
