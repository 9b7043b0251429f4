/**
 * @file app.hpp
 * @brief Command line entry point
 */

#pragma once

namespace bores::cli {

/// Exit statuses of the command line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_failure = 1,   ///< verify found a failing criterion, or an unexpected error
    exit_config = 2,
    exit_setup = 3,
    exit_invariant = 4
};

/// Parses arguments and dispatches to run, diagnose, dump-defaults or verify.
int run_cli(int argc, const char* const* argv);

} // namespace bores::cli
