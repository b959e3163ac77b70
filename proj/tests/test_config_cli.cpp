#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "tcsde/cli.hpp"
#include "tcsde/config.hpp"
#include "tcsde/errors.hpp"

using namespace tcsde;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("tcsde_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string config_error_key(const std::map<std::string, std::string>& overrides) {
    try {
        parse_config(std::nullopt, overrides);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

}  // namespace

TEST(ParseConfig, Defaults) {
    unsetenv("TCM_SEED");
    const RunConfig cfg = parse_config(std::nullopt, {});
    EXPECT_EQ(cfg.problem, "example1");
    EXPECT_EQ(cfg.truncation.epsilon, 0.02);
    EXPECT_EQ(cfg.trajectories, 100u);
    EXPECT_EQ(cfg.p_bar, 2.0);
    EXPECT_EQ(cfg.seed, 42u);
    EXPECT_EQ(cfg.subordinator.alpha, 0.9);
    EXPECT_EQ(cfg.ladder, (std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4}));
    EXPECT_EQ(cfg.h_ref, 1e-5);
}

TEST(ParseConfig, InvariantViolationsNameTheKey) {
    EXPECT_EQ(config_error_key({{"trunc.epsilon", "0.3"}}), "trunc.epsilon");
    EXPECT_EQ(config_error_key({{"run.ladder", "1e-1,1e-2"}, {"run.href", "3e-3"}}), "run.ladder");
    EXPECT_EQ(config_error_key({{"run.trajectories", "0"}}), "run.trajectories");
    EXPECT_EQ(config_error_key({{"run.bogus", "1"}}), "run.bogus");
    EXPECT_EQ(config_error_key({{"subordinator.alpha", "1.5"}}), "subordinator.alpha");
    EXPECT_EQ(config_error_key({{"run.href", "abc"}}), "run.href");
}

TEST(ParseConfig, FileThenEnvironmentThenFlags) {
    const auto dir = scratch_dir("config");
    const auto path = dir / "run.cfg";
    std::ofstream(path) << "# experiment\nproblem.name = example2\nrun.seed = 5\ntrunc.epsilon = 1e-2  # small\n"
                           "run.ladder = 1e-1, 1e-2\nrun.href = 1e-3\n";
    unsetenv("TCM_SEED");
    RunConfig cfg = parse_config(path.string(), {});
    EXPECT_EQ(cfg.problem, "example2");
    EXPECT_EQ(cfg.seed, 5u);
    EXPECT_EQ(cfg.truncation.epsilon, 0.01);
    EXPECT_EQ(cfg.ladder.size(), 2u);

    setenv("TCM_SEED", "77", 1);
    EXPECT_EQ(parse_config(path.string(), {}).seed, 77u);
    EXPECT_EQ(parse_config(path.string(), {{"run.seed", "8"}}).seed, 8u);
    unsetenv("TCM_SEED");

    std::ofstream(path) << "nonsense line\n";
    EXPECT_THROW(parse_config(path.string(), {}), ConfigError);
}

TEST(ParseConfig, GbmDefaultsToNonBindingTruncation) {
    const RunConfig cfg = parse_config(std::nullopt, {{"problem.name", "gbm"}});
    EXPECT_EQ(cfg.truncation.mu_exponent, 1.0);
    EXPECT_GT(truncation_radius(cfg.truncation, 0.0625), 1e5);
    const RunConfig explicit_mu = parse_config(std::nullopt, {{"problem.name", "gbm"}, {"trunc.mu_coeff", "3"}});
    EXPECT_EQ(explicit_mu.truncation.mu_coeff, 3.0);
    EXPECT_EQ(explicit_mu.truncation.mu_exponent, 5.0);
}

TEST(Cli, SimulateDeterministicQuarterSteps) {
    const auto dir = scratch_dir("simulate");
    std::ostringstream out, err;
    const int rc = cli::main({"simulate", "--problem", "example1", "--h", "0.25", "--subordinator", "deterministic",
                              "--out", dir.string()},
                             out, err);
    ASSERT_EQ(rc, 0) << err.str();
    std::istringstream csv(slurp(dir / "trajectory.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "n,tau_n,E_h,X_1");
    std::vector<std::string> rows;
    while (std::getline(csv, line)) rows.push_back(line);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0], "0,0,0,1");
    EXPECT_EQ(rows[4].rfind("4,1,1,", 0), 0u);
    EXPECT_EQ(slurp(dir / "grid.csv"), "i,tau_i\n0,0\n1,0.25\n2,0.5\n3,0.75\n4,1\n5,1.25\n");
}

TEST(Cli, ConvergenceCsvIsByteIdenticalAcrossThreadCounts) {
    const auto a = scratch_dir("conv_a");
    const auto b = scratch_dir("conv_b");
    const std::vector<std::string> base{"convergence", "--ladder", "1e-1,1e-2", "--href", "1e-3", "-M", "16",
                                        "--no-timestamp", "--plot"};
    auto args_a = base, args_b = base;
    args_a.insert(args_a.end(), {"--threads", "1", "--out", a.string()});
    args_b.insert(args_b.end(), {"--threads", "3", "--out", b.string()});
    std::ostringstream out, err;
    ASSERT_EQ(cli::main(args_a, out, err), 0) << err.str();
    ASSERT_EQ(cli::main(args_b, out, err), 0) << err.str();
    EXPECT_EQ(slurp(a / "convergence.csv"), slurp(b / "convergence.csv"));
    EXPECT_TRUE(std::filesystem::exists(a / "convergence.svg"));
    EXPECT_NE(out.str().find("slope = "), std::string::npos);
}

TEST(Cli, ErrorsGiveNonzeroExit) {
    std::ostringstream out, err;
    EXPECT_NE(cli::main({"convergence", "--epsilon", "0.3"}, out, err), 0);
    EXPECT_NE(err.str().find("trunc.epsilon"), std::string::npos);
    EXPECT_NE(cli::main({"convergence", "--ladder", "1e-1,1e-2", "--href", "3e-3"}, out, err), 0);
    EXPECT_NE(cli::main({"frobnicate"}, out, err), 0);
}

TEST(Cli, CheckAssumptionsWritesReport) {
    const auto dir = scratch_dir("check");
    std::ostringstream out, err;
    ASSERT_EQ(cli::main({"check-assumptions", "--problem", "example1", "--radius", "3", "--samples", "2000", "--p", "3",
                         "--q", "3", "--out", dir.string()},
                        out, err),
              0)
        << err.str();
    const std::string csv = slurp(dir / "assumptions.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
    EXPECT_EQ(csv.find(",true,"), std::string::npos);
    EXPECT_NE(out.str().find("not violated on sample"), std::string::npos);
}

TEST(Cli, SubordinatorTestReportsPass) {
    const auto dir = scratch_dir("subtest");
    std::ostringstream out, err;
    ASSERT_EQ(cli::main({"subordinator-test", "--alpha", "0.9", "--samples", "1e5", "--out", dir.string()}, out, err),
              0)
        << err.str();
    EXPECT_NE(out.str().find("PASS ("), std::string::npos);
    EXPECT_TRUE(std::filesystem::exists(dir / "subordinator_test.csv"));
}
