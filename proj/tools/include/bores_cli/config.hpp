/**
 * @file config.hpp
 * @brief Run configuration and its sectioned key = value file format
 *
 * The file is an INI document: `[section]` headers, `key = value` lines and
 * full-line comments starting with `;`. Lists are comma separated.
 */

#pragma once

#include "bores/continuation.hpp"
#include "bores/params.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bores::cli {

/// Which functionals to evaluate on final branch states, and where.
struct DiagnosticsRequest {
    std::vector<std::string> functionals;
    double center_x = 0.0;        ///< the centre sits on the interface at this x
    double radius = 0.05;
    int radii_count = 8;
    int per_octave = 4;
    int bumps = 3;
    std::uint64_t seed = 1;

    bool operator==(const DiagnosticsRequest&) const = default;
};

struct RunConfig {
    FluidPair fluids;
    double L = 16.0;
    int nq = 321;
    int np1 = 17;
    int np2 = 17;
    double newton_tol = 1e-10;
    int max_newton_iters = 30;
    std::vector<Direction> directions{Direction::depr};
    StepPolicy policy;
    Thresholds thresholds;
    ContactAngleOptions contact;
    DiagnosticsRequest diagnostics;
    bool sanity = true;
    std::string out_dir = "out";

    /// Solver settings at the given upstream depth.
    FrontConfig front_config(double at_lambda) const;

    /// Throws config_error naming the first invalid field.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

/// Names accepted in [diagnostics] functionals.
const std::vector<std::string>& known_functionals();

/**
 * @brief Parses a config document
 * @throws config_error with the line and field of the first problem
 */
RunConfig parse_config(const std::string& text);

/// Reads and parses a file; an unreadable file is a config_error on line 0.
RunConfig load_config(const std::string& path);

/// Canonical text with every field, values printed for exact round trip.
std::string config_to_string(const RunConfig& cfg, bool with_comments = false);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

} // namespace bores::cli
