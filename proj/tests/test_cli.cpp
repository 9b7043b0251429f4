#include "bores_cli/app.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

using namespace bores::cli;
namespace fs = std::filesystem;

namespace {

int cli(std::initializer_list<std::string> args) {
    std::vector<std::string> store{"bores", "-q"};
    store.insert(store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& s : store) argv.push_back(s.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("bores_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string write(const std::string& name, const std::string& text) {
        const fs::path p = dir / name;
        std::ofstream(p) << text;
        return p.string();
    }

    fs::path dir;
};

} // namespace

TEST_F(CliTest, DumpDefaults) { EXPECT_EQ(cli({"dump-defaults"}), exit_ok); }

TEST_F(CliTest, UnknownSubcommandIsAConfigError) { EXPECT_EQ(cli({"frobnicate"}), exit_config); }

TEST_F(CliTest, MissingDensityIsAConfigError) {
    const auto cfg = write("bad.ini", "[fluids]\nrho1 = 4\n");
    EXPECT_EQ(cli({"run", "--config", cfg, "--out", (dir / "out").string()}), exit_config);
}

TEST_F(CliTest, RunWithoutBranchesWritesAManifest) {
    const auto cfg = write("min.ini", "[fluids]\nrho1 = 4\nrho2 = 1\n[grid]\nnq = 41\nnp1 = 5\nnp2 = 5\n[branch]\ndirections =\n");
    const fs::path out = dir / "out";
    ASSERT_EQ(cli({"run", "--config", cfg, "--out", out.string()}), exit_ok);
    std::ifstream in(out / "manifest.json");
    ASSERT_TRUE(in.good());
    const auto m = nlohmann::json::parse(in);
    EXPECT_EQ(m.at("schema"), "bores.manifest");
    EXPECT_TRUE(m.at("sanity").at("passed").get<bool>());
    EXPECT_TRUE(m.at("branches").empty());
    EXPECT_TRUE(fs::exists(out / "config.ini"));
}

TEST_F(CliTest, UnreadableSeedStateIsASetupError) {
    const auto cfg = write("min.ini", "[fluids]\nrho1 = 4\nrho2 = 1\n[grid]\nnq = 41\nnp1 = 5\nnp2 = 5\n[branch]\nmax_steps = 3\n");
    EXPECT_EQ(cli({"run", "--config", cfg, "--out", (dir / "out").string(), "--seed-state",
                   (dir / "missing.json").string()}),
              exit_setup);
}

TEST_F(CliTest, DiagnoseBuiltinField) {
    const fs::path out = dir / "diag";
    ASSERT_EQ(cli({"diagnose", "--out", out.string(), "--field", "stokes_corner", "--functional", "weiss_M",
                   "--radius", "0.5", "--radii-count", "4"}),
              exit_ok);
    std::ifstream in(out / "diagnose.json");
    ASSERT_TRUE(in.good());
}

TEST_F(CliTest, DiagnoseOutsideTheChannelIsASetupError) {
    const auto cfg = write("min.ini", "[fluids]\nrho1 = 4\nrho2 = 1\n[grid]\nnq = 41\nnp1 = 5\nnp2 = 5\n[branch]\nmax_steps = 3\n");
    const fs::path out = dir / "out";
    ASSERT_EQ(cli({"run", "--config", cfg, "--out", out.string()}), exit_ok);
    fs::path state;
    for (const auto& e : fs::directory_iterator(out)) {
        if (e.path().filename().string().starts_with("state_")) state = e.path();
    }
    ASSERT_FALSE(state.empty());
    EXPECT_EQ(cli({"diagnose", "--out", (dir / "d").string(), "--state", state.string(), "--functional", "weiss_M",
                   "--center", "0", "5"}),
              exit_setup);
}

TEST_F(CliTest, VerifyRejectsUnknownCriterion) { EXPECT_EQ(cli({"verify", "--only", "99"}), exit_config); }
