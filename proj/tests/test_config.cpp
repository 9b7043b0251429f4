#include "bores/errors.hpp"
#include "bores_cli/config.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

using namespace bores;
using namespace bores::cli;

namespace {

const std::string minimal = "[fluids]\nrho1 = 4\nrho2 = 1\n";

config_error parse_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const config_error& e) {
        return e;
    }
    ADD_FAILURE() << "no config_error for:\n" << text;
    return config_error("", -1, "");
}

} // namespace

TEST(Config, MinimalFileTakesDefaults) {
    const RunConfig cfg = parse_config(minimal);
    RunConfig expected;
    expected.fluids = {4.0, 1.0, false};
    EXPECT_EQ(cfg, expected);
}

TEST(Config, DefaultsRoundTrip) {
    const RunConfig cfg;
    EXPECT_EQ(parse_config(config_to_string(cfg, true)), cfg);
    EXPECT_EQ(parse_config(config_to_string(cfg, false)), cfg);
}

TEST(Config, RandomValuesRoundTripExactly) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        RunConfig cfg;
        cfg.fluids = {1.0 + 10.0 * U(rng), 0.5 * U(rng) + 0.1, false};
        cfg.L = 4.0 + 20.0 * U(rng);
        cfg.nq = 2 * static_cast<int>(20 + 100 * U(rng)) + 1;
        cfg.newton_tol = std::pow(10.0, -14.0 + 6.0 * U(rng));
        cfg.policy.seed_offset = 0.01 + 0.1 * U(rng);
        cfg.policy.growth = 1.0 + U(rng);
        cfg.thresholds.flat_rate = U(rng) * 0.1 + 1e-3;
        cfg.contact.gap_power = 0.5 + U(rng);
        cfg.diagnostics.functionals = {"weiss_M", "acf_phi"};
        cfg.diagnostics.seed = rng();
        cfg.directions = {Direction::elev, Direction::depr};
        cfg.sanity = i % 2 == 0;
        cfg.out_dir = "run_" + std::to_string(i);
        ASSERT_NO_THROW(cfg.validate());
        EXPECT_EQ(parse_config(config_to_string(cfg)), cfg) << config_to_string(cfg);
    }
}

TEST(Config, EmptyDirectionListIsAllowed) {
    const RunConfig cfg = parse_config(minimal + "[branch]\ndirections =\n");
    EXPECT_TRUE(cfg.directions.empty());
}

TEST(Config, MissingRequiredFieldNamesIt) {
    const config_error e = parse_error("[fluids]\nrho1 = 4\n");
    EXPECT_EQ(e.field, "fluids.rho2");
    EXPECT_EQ(e.line, 1);
}

TEST(Config, BadValueReportsItsLine) {
    const config_error e = parse_error(minimal + "\n[grid]\nnq = lots\n");
    EXPECT_EQ(e.field, "grid.nq");
    EXPECT_EQ(e.line, 6);
    const config_error trailing = parse_error(minimal + "[grid]\nL = 3.5x\n");
    EXPECT_EQ(trailing.field, "grid.L");
}

TEST(Config, UnknownKeyIsRejected) {
    const config_error e = parse_error(minimal + "[grid]\nnr = 4\n");
    EXPECT_EQ(e.field, "grid.nr");
    EXPECT_EQ(e.line, 5);
    EXPECT_EQ(parse_error(minimal + "[mesh]\nnq = 4\n").field, "mesh.nq");
}

TEST(Config, SyntaxErrorReportsItsLine) {
    const config_error e = parse_error(minimal + "[grid\n");
    EXPECT_EQ(e.line, 4);
}

TEST(Config, InvalidDensitiesAreAFieldError) {
    const config_error e = parse_error("[fluids]\nrho1 = 1\nrho2 = 4\n");
    EXPECT_EQ(e.field, "fluids");
    const config_error b = parse_error("[fluids]\nrho1 = 1\nrho2 = 2\nboussinesq = true\n");
    EXPECT_EQ(b.field, "fluids");
}

TEST(Config, RangeChecksNameTheField) {
    EXPECT_EQ(parse_error(minimal + "[grid]\nnq = 2\n").field, "grid");
    EXPECT_EQ(parse_error(minimal + "[contact]\nband_factor = 0.5\n").field, "contact.band_factor");
    EXPECT_EQ(parse_error(minimal + "[diagnostics]\nfunctionals = weiss_M, nonsense\n").field,
              "diagnostics.functionals");
    EXPECT_EQ(parse_error(minimal + "[branch]\ndirections = up\n").field, "branch.directions");
}

TEST(Config, HashIsStableAndSensitive) {
    const RunConfig a = parse_config(minimal);
    const RunConfig b = parse_config("; comment\n[fluids]\nrho2 = 1\nrho1 = 4.0\n");
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
    RunConfig c = a;
    c.policy.max_steps += 1;
    EXPECT_NE(config_hash(a), config_hash(c));
}

TEST(Config, UnreadableFile) {
    EXPECT_THROW(load_config("/nonexistent/bores.ini"), config_error);
}

TEST(Config, KnownFunctionals) {
    const auto& k = known_functionals();
    for (const char* name : {"weiss_M", "AB", "energy_bound", "acf_phi", "gc_M", "variational_residual"}) {
        EXPECT_NE(std::find(k.begin(), k.end(), name), k.end()) << name;
    }
}
