/**
 * @file acceptance.hpp
 * @brief Built-in acceptance suite shared by `verify` and the acceptance test
 */

#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bores::cli {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
};

struct AcceptanceOptions {
    std::vector<int> only;   ///< criteria to run; empty runs all
    int threads = 2;         ///< worker count of the parallel run in the determinism check
    std::function<void(const CriterionResult&)> on_result;
};

/// Number of criteria in the suite.
inline constexpr int criterion_count = 14;

/// Runs the criteria in order; a criterion that throws is reported as FAIL with the message.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

/// "PASS [ 5] name: detail"
std::string format_result(const CriterionResult& r);

} // namespace bores::cli
