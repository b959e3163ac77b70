#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tcsde/mc_harness.hpp"
#include "tcsde/scheme.hpp"
#include "tcsde/subordinator.hpp"
#include "tcsde/truncation.hpp"

namespace tcsde {

/// Everything a CLI run needs. Keys in the flat config format are listed in
/// `config_keys()`; flags mirror them.
struct RunConfig {
    std::string problem = "example1";
    SubordinatorModel subordinator = SubordinatorModel::stable(0.9);
    std::vector<double> ladder{1e-1, 1e-2, 1e-3, 1e-4};
    double h_ref = 1e-5;
    std::size_t trajectories = 100;
    double p_bar = 2.0;
    TruncationConfig truncation;
    std::uint64_t seed = 42;
    std::string output_dir = ".";
    unsigned threads = 0;
    bool skip_blowups = false;
    SchemeKind scheme = SchemeKind::TruncatedMilstein;
    std::optional<ErrorNodes> nodes;  // unset: fine grid against a reference path, coarse grid against an exact solution
    bool plot = false;
    bool timestamp = true;

    double simulate_h = 0.01;

    double check_radius = 3.0;
    std::size_t check_samples = 100'000;
    double check_p = 3.0;
    double check_q = 3.0;
    double check_safety = 2.0;
    std::optional<std::vector<double>> check_candidates;

    std::size_t subtest_samples = 1'000'000;
    std::vector<double> subtest_steps{1e-2, 1e-3};
    std::vector<double> subtest_lambdas{0.5, 1.0, 2.0};
};

/// Every accepted `section.key`.
const std::vector<std::string>& config_keys();

/// Reads `section.key = value` lines; `#` starts a comment. Throws ConfigError.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Defaults, then the file (if any), then TCM_SEED, then `overrides`.
/// Throws ConfigError naming the offending key.
RunConfig parse_config(const std::optional<std::string>& path, const std::map<std::string, std::string>& overrides);

/// Parses a real with full consumption; accepts scientific notation.
double parse_real(std::string_view key, std::string_view text);

}  // namespace tcsde
