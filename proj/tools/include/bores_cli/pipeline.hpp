/**
 * @file pipeline.hpp
 * @brief The run and diagnose pipelines behind the command line
 */

#pragma once

#include "bores/diagnostics.hpp"
#include "bores_cli/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bores::cli {

inline constexpr const char* manifest_schema = "bores.manifest";
inline constexpr int manifest_version = 1;

/// Largest laminar residual the sanity check accepts.
inline constexpr double sanity_threshold = 1e-12;

/// One output file and the text that goes in it.
struct Artifact {
    std::string name;
    std::string text;
};

struct RunOptions {
    std::filesystem::path out_dir;
    int threads = 1;
    std::optional<std::filesystem::path> seed_state;
};

/**
 * @brief Sanity check, branch traces and diagnostics of a config
 *
 * Branches run concurrently on up to `threads` workers; each task produces its own
 * artifacts and the manifest is assembled in config order, so the output does not
 * depend on the thread count.
 * @throws setup_error if a seed does not converge or the seed state is unusable
 * @throws invariant_error if the sanity check or a sign check on stored states fails
 */
std::vector<Artifact> run_pipeline(const RunConfig& cfg, const RunOptions& opts);

/// Writes artifacts into dir, creating it if needed.
void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts);

/// Named analytic fields available to diagnose.
const std::vector<std::string>& builtin_fields();

/// Built-in field by name, recentred at center.
SampledField builtin_field(const std::string& name, Vec2 center = {});

struct DiagnoseRequest {
    std::optional<std::filesystem::path> state;   ///< stored bore, or
    std::string field = "stokes_corner";          ///< a built-in field when no state is given
    std::vector<std::string> functionals{"weiss_M"};
    Vec2 center{};
    double radius = 1.0;
    int radii_count = 9;
    int per_octave = 1;
    int bumps = 3;
    std::uint64_t seed = 1;
};

/**
 * @brief Evaluates functionals on a stored state or a built-in field
 * @throws setup_error if the state cannot be read or the centre lies outside the channel
 */
std::vector<Artifact> diagnose(const DiagnoseRequest& req);

} // namespace bores::cli
