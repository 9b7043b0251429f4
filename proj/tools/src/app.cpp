#include "bores_cli/app.hpp"

#include "bores/errors.hpp"
#include "bores_cli/acceptance.hpp"
#include "bores_cli/config.hpp"
#include "bores_cli/pipeline.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

namespace bores::cli {

namespace {

void setup_logging(bool quiet) {
    auto logger = spdlog::get("bores");
    if (!logger) logger = spdlog::stderr_logger_mt("bores");
    spdlog::set_default_logger(logger);
    spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Internal bore fronts: continuation, limit classification and free-boundary diagnostics", "bores"};
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("-q,--quiet", quiet, "only log warnings and errors");

    std::string config_path, out_dir, seed_state;
    int threads = 1;
    auto* run = app.add_subcommand("run", "trace branches and write artifacts");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--seed-state", seed_state, "start the branches from this stored state");

    DiagnoseRequest dreq;
    std::string state_path;
    std::vector<double> center;
    auto* diag = app.add_subcommand("diagnose", "evaluate functionals on a stored state or a built-in field");
    diag->add_option("--config", config_path, "config file providing [diagnostics] defaults");
    diag->add_option("--out", out_dir, "output directory")->required();
    diag->add_option("--state", state_path, "stored state JSON");
    diag->add_option("--field", dreq.field, "built-in field when no state is given")
        ->check(CLI::IsMember(builtin_fields()));
    diag->add_option("--functional", dreq.functionals, "functionals to evaluate")
        ->check(CLI::IsMember(known_functionals()));
    diag->add_option("--center", center, "centre x y")->expected(2);
    diag->add_option("--radius", dreq.radius, "largest radius");
    diag->add_option("--radii-count", dreq.radii_count, "number of radii");
    diag->add_option("--per-octave", dreq.per_octave, "radii per halving of r");
    diag->add_option("--bumps", dreq.bumps, "test fields for the variational residual");
    diag->add_option("--seed", dreq.seed, "seed of the test fields");

    auto* dump = app.add_subcommand("dump-defaults", "print the default config with documentation");

    AcceptanceOptions aopts;
    auto* verify = app.add_subcommand("verify", "run the built-in acceptance suite");
    verify->add_option("--threads", aopts.threads, "threads of the parallel determinism run")
        ->check(CLI::PositiveNumber);
    verify->add_option("--only", aopts.only, "criteria to run")->check(CLI::Range(1, criterion_count));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }
    setup_logging(quiet);

    try {
        if (*dump) {
            RunConfig defaults;
            std::cout << config_to_string(defaults, true);
            return exit_ok;
        }
        if (*run) {
            const RunConfig cfg = load_config(config_path);
            RunOptions opts;
            opts.out_dir = out_dir.empty() ? cfg.out_dir : out_dir;
            opts.threads = threads;
            if (!seed_state.empty()) opts.seed_state = seed_state;
            const auto artifacts = run_pipeline(cfg, opts);
            write_artifacts(opts.out_dir, artifacts);
            spdlog::info("wrote {} files to {}", artifacts.size(), opts.out_dir.string());
            return exit_ok;
        }
        if (*diag) {
            if (!config_path.empty()) {
                const RunConfig cfg = load_config(config_path);
                const auto& d = cfg.diagnostics;
                if (diag->count("--functional") == 0 && !d.functionals.empty()) dreq.functionals = d.functionals;
                if (diag->count("--radius") == 0) dreq.radius = d.radius;
                if (diag->count("--radii-count") == 0) dreq.radii_count = d.radii_count;
                if (diag->count("--per-octave") == 0) dreq.per_octave = d.per_octave;
                if (diag->count("--bumps") == 0) dreq.bumps = d.bumps;
                if (diag->count("--seed") == 0) dreq.seed = d.seed;
            }
            if (!state_path.empty()) dreq.state = state_path;
            if (center.size() == 2) dreq.center = {center[0], center[1]};
            const auto artifacts = diagnose(dreq);
            write_artifacts(out_dir, artifacts);
            spdlog::info("wrote {} files to {}", artifacts.size(), out_dir);
            return exit_ok;
        }
        if (*verify) {
            aopts.on_result = [](const CriterionResult& r) { std::cout << format_result(r) << std::endl; };
            const auto results = run_acceptance(aopts);
            bool all = true;
            for (const auto& r : results) all = all && r.passed;
            return all ? exit_ok : exit_failure;
        }
    } catch (const config_error& e) {
        spdlog::error("{}", e.what());
        return exit_config;
    } catch (const setup_error& e) {
        spdlog::error("setup error: {}", e.what());
        return exit_setup;
    } catch (const invariant_error& e) {
        spdlog::error("invariant breach: {}", e.what());
        return exit_invariant;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return exit_failure;
    }
    return exit_failure;
}

} // namespace bores::cli
