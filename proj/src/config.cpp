#include "tcsde/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tcsde/errors.hpp"

namespace tcsde {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::uint64_t parse_unsigned(std::string_view key, std::string_view text) {
    text = trim(text);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size()) return value;
    // Allow "1e6" style counts.
    const double real = parse_real(key, text);
    if (real < 0.0 || real != static_cast<double>(static_cast<std::uint64_t>(real))) {
        throw ConfigError(std::string(key), "expected a nonnegative integer, got '" + std::string(text) + "'");
    }
    return static_cast<std::uint64_t>(real);
}

bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError(std::string(key), "expected a boolean, got '" + std::string(text) + "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    std::string_view rest = trim(text);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        out.push_back(parse_real(key, rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    if (out.empty()) throw ConfigError(std::string(key), "expected a comma-separated list of numbers");
    return out;
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value, bool& mu_set) {
    if (key == "problem.name") {
        cfg.problem = std::string(trim(value));
    } else if (key == "subordinator.family") {
        const auto v = trim(value);
        if (v == "stable") {
            cfg.subordinator.family = SubordinatorModel::Family::Stable;
        } else if (v == "deterministic") {
            cfg.subordinator.family = SubordinatorModel::Family::Deterministic;
        } else {
            throw ConfigError(key, "expected 'stable' or 'deterministic', got '" + std::string(v) + "'");
        }
    } else if (key == "subordinator.alpha") {
        cfg.subordinator.alpha = parse_real(key, value);
    } else if (key == "subordinator.scale") {
        cfg.subordinator.scale = parse_real(key, value);
    } else if (key == "run.ladder") {
        cfg.ladder = parse_list(key, value);
    } else if (key == "run.href") {
        cfg.h_ref = parse_real(key, value);
    } else if (key == "run.trajectories") {
        cfg.trajectories = parse_unsigned(key, value);
    } else if (key == "run.p_bar") {
        cfg.p_bar = parse_real(key, value);
    } else if (key == "run.seed") {
        cfg.seed = parse_unsigned(key, value);
    } else if (key == "run.threads") {
        cfg.threads = static_cast<unsigned>(parse_unsigned(key, value));
    } else if (key == "run.skip_blowups") {
        cfg.skip_blowups = parse_bool(key, value);
    } else if (key == "run.scheme") {
        const auto v = trim(value);
        if (v == "milstein") {
            cfg.scheme = SchemeKind::TruncatedMilstein;
        } else if (v == "em") {
            cfg.scheme = SchemeKind::TruncatedEM;
        } else {
            throw ConfigError(key, "expected 'milstein' or 'em', got '" + std::string(v) + "'");
        }
    } else if (key == "run.nodes") {
        const auto v = trim(value);
        if (v == "fine") {
            cfg.nodes = ErrorNodes::FineGrid;
        } else if (v == "coarse") {
            cfg.nodes = ErrorNodes::CoarseGrid;
        } else if (v == "auto") {
            cfg.nodes.reset();
        } else {
            throw ConfigError(key, "expected 'fine', 'coarse' or 'auto', got '" + std::string(v) + "'");
        }
    } else if (key == "run.output_dir") {
        cfg.output_dir = std::string(trim(value));
    } else if (key == "run.plot") {
        cfg.plot = parse_bool(key, value);
    } else if (key == "run.timestamp") {
        cfg.timestamp = parse_bool(key, value);
    } else if (key == "trunc.mu_coeff") {
        cfg.truncation.mu_coeff = parse_real(key, value);
        mu_set = true;
    } else if (key == "trunc.mu_exponent") {
        cfg.truncation.mu_exponent = parse_real(key, value);
        mu_set = true;
    } else if (key == "trunc.epsilon") {
        cfg.truncation.epsilon = parse_real(key, value);
    } else if (key == "trunc.kappa_floor") {
        cfg.truncation.kappa_floor = parse_bool(key, value);
    } else if (key == "simulate.h") {
        cfg.simulate_h = parse_real(key, value);
    } else if (key == "check.radius") {
        cfg.check_radius = parse_real(key, value);
    } else if (key == "check.samples") {
        cfg.check_samples = parse_unsigned(key, value);
    } else if (key == "check.p") {
        cfg.check_p = parse_real(key, value);
    } else if (key == "check.q") {
        cfg.check_q = parse_real(key, value);
    } else if (key == "check.safety") {
        cfg.check_safety = parse_real(key, value);
    } else if (key == "check.candidates") {
        cfg.check_candidates = parse_list(key, value);
    } else if (key == "subtest.samples") {
        cfg.subtest_samples = parse_unsigned(key, value);
    } else if (key == "subtest.steps") {
        cfg.subtest_steps = parse_list(key, value);
    } else if (key == "subtest.lambdas") {
        cfg.subtest_lambdas = parse_list(key, value);
    } else {
        throw ConfigError(key, "unknown configuration key");
    }
}

void validate(const RunConfig& cfg) {
    if (cfg.problem != "example1" && cfg.problem != "example2" && cfg.problem != "gbm") {
        throw ConfigError("problem.name", "expected example1, example2 or gbm, got '" + cfg.problem + "'");
    }
    try {
        cfg.subordinator.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("subordinator.alpha", e.what());
    }
    const TruncationConfig& t = cfg.truncation;
    if (!(t.epsilon > 0.0 && t.epsilon <= 0.25)) throw ConfigError("trunc.epsilon", "epsilon must lie in (0, 1/4]");
    if (!(t.mu_coeff > 0.0)) throw ConfigError("trunc.mu_coeff", "must be positive");
    if (!(t.mu_exponent > 0.0)) throw ConfigError("trunc.mu_exponent", "must be positive");
    if (cfg.trajectories < 1) throw ConfigError("run.trajectories", "M must be at least 1");
    if (!(cfg.p_bar >= 2.0)) throw ConfigError("run.p_bar", "must be at least 2");
    if (!(cfg.h_ref > 0.0 && cfg.h_ref <= 1.0)) throw ConfigError("run.href", "must lie in (0, 1]");
    for (double h : cfg.ladder) {
        if (!(h > 0.0 && h <= 1.0)) throw ConfigError("run.ladder", "step sizes must lie in (0, 1]");
        try {
            step_ratio(h, cfg.h_ref);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("run.ladder", e.what());
        }
    }
    if (!(cfg.simulate_h > 0.0 && cfg.simulate_h <= 1.0)) throw ConfigError("simulate.h", "must lie in (0, 1]");
    if (!(cfg.check_radius > 0.0)) throw ConfigError("check.radius", "must be positive");
    if (cfg.check_samples < 1000) throw ConfigError("check.samples", "at least 1000 samples are required");
    if (!(cfg.check_p > 2.0)) throw ConfigError("check.p", "must exceed 2");
    if (!(cfg.check_q > 2.0)) throw ConfigError("check.q", "must exceed 2");
    if (!(cfg.check_safety >= 1.0)) throw ConfigError("check.safety", "must be at least 1");
    if (cfg.check_candidates && cfg.check_candidates->size() != 5) {
        throw ConfigError("check.candidates", "expected five constants");
    }
    if (cfg.subtest_samples < 2) throw ConfigError("subtest.samples", "at least two samples are required");
    for (double h : cfg.subtest_steps) {
        if (!(h > 0.0)) throw ConfigError("subtest.steps", "step sizes must be positive");
    }
    for (double l : cfg.subtest_lambdas) {
        if (!(l > 0.0)) throw ConfigError("subtest.lambdas", "lambda must be positive");
    }
}

}  // namespace

double parse_real(std::string_view key, std::string_view text) {
    text = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(std::string(key), "expected a number, got '" + std::string(text) + "'");
    }
    return value;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "problem.name",     "subordinator.family", "subordinator.alpha", "subordinator.scale", "run.ladder",
        "run.href",         "run.trajectories",    "run.p_bar",          "run.seed",           "run.threads",
        "run.skip_blowups", "run.scheme",          "run.nodes",          "run.output_dir",     "run.plot",
        "run.timestamp",    "trunc.mu_coeff",      "trunc.mu_exponent",  "trunc.epsilon",      "trunc.kappa_floor",
        "simulate.h",       "check.radius",        "check.samples",      "check.p",            "check.q",
        "check.safety",     "check.candidates",    "subtest.samples",    "subtest.steps",      "subtest.lambdas",
    };
    return keys;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config", path + ":" + std::to_string(number) + ": expected 'section.key = value'");
        }
        out[std::string(trim(view.substr(0, eq)))] = std::string(trim(view.substr(eq + 1)));
    }
    return out;
}

RunConfig parse_config(const std::optional<std::string>& path, const std::map<std::string, std::string>& overrides) {
    RunConfig cfg;
    bool mu_set = false;
    if (path) {
        for (const auto& [key, value] : read_config_file(*path)) apply(cfg, key, value, mu_set);
    }
    if (const char* env = std::getenv("TCM_SEED"); env != nullptr && *env != '\0') {
        cfg.seed = parse_unsigned("TCM_SEED", env);
    }
    for (const auto& [key, value] : overrides) apply(cfg, key, value, mu_set);

    // GBM is globally Lipschitz: default to a growth bound whose radius never binds.
    if (cfg.problem == "gbm" && !mu_set) {
        cfg.truncation.mu_coeff = 1e-6;
        cfg.truncation.mu_exponent = 1.0;
    }
    validate(cfg);
    return cfg;
}

}  // namespace tcsde
