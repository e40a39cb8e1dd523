// common.hpp — shared aliases, constants, and error types

#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qcycle {

using cxd = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cxd iu{0.0, 1.0};

// Raised when a configuration or model definition is unusable.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an operation is asked to run outside its supported regime.
struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when adaptive quadrature cannot reach the requested tolerance.
struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_error(achieved) {}
    double achieved_error;
};

// Raised on Fock-space dimension guard violations and similar size limits.
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a result is requested from a run that did not reach the
// required state (e.g. per-cycle limits before convergence).
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qcycle
