/**
 * @file errors.hpp
 * @brief Exception types raised by the bore solver and diagnostics
 */

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bores {

/// Base class for every library error.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (point outside channel, bad slice).
class domain_error : public error {
public:
    using error::error;
};

/// Input violates a documented precondition (sign conditions, support contracts).
class precondition_error : public error {
public:
    using error::error;
};

/// Invalid parameters (densities, grid counts, tolerances).
class parameter_error : public error {
public:
    using error::error;
};

/// Loss of the graph/monotone structure: some H_p is too close to zero.
class degeneracy_error : public error {
public:
    degeneracy_error(int layer, int j, int k, double hp);

    int layer;
    int j;
    int k;
    double hp;
};

/// Newton iteration failed; carries the last iterate so callers can retry.
class convergence_error : public error {
public:
    convergence_error(const std::string& what, double residual, int iterations,
                      std::vector<double> last_iterate);

    double residual;
    int iterations;
    std::vector<double> last_iterate;
};

/// Adaptive quadrature did not reach the requested tolerance.
class tolerance_error : public error {
public:
    tolerance_error(const std::string& what, double estimate, double error_estimate);

    double estimate;
    double error_estimate;
};

/// Continuation could not be started (seed solve failed).
class setup_error : public error {
public:
    using error::error;
};

/// A property that must hold on accepted output was violated.
class invariant_error : public error {
public:
    using error::error;
};

/// Not enough data to reach a conclusion (for example too few states in a fitting band).
class inconclusive_error : public error {
public:
    using error::error;
};

/// Malformed run configuration; line is 0 when not tied to a line.
class config_error : public error {
public:
    config_error(const std::string& what, int line, std::string field);

    int line;
    std::string field;
};

} // namespace bores
