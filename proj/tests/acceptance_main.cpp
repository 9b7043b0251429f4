/// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "bores_cli/acceptance.hpp"

#include <iostream>

int main() {
    bores::cli::AcceptanceOptions opts;
    opts.on_result = [](const bores::cli::CriterionResult& r) {
        std::cout << bores::cli::format_result(r) << std::endl;
    };
    const auto results = bores::cli::run_acceptance(opts);
    int failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << results.size() - failed << " of " << results.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
