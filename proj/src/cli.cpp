#include "tcsde/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>

#include "tcsde/errors.hpp"
#include "tcsde/mc_harness.hpp"
#include "tcsde/problems.hpp"
#include "tcsde/random.hpp"
#include "tcsde/scheme.hpp"

namespace tcsde::cli {

namespace {

std::ofstream open_output(const RunConfig& config, const std::string& name) {
    std::filesystem::create_directories(config.output_dir);
    const auto path = std::filesystem::path(config.output_dir) / name;
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    return file;
}

int simulate(const RunConfig& config, std::ostream& out) {
    const SdeProblem problem = problem_by_name(config.problem);
    const CoupledNoise noise =
        generate_coupled_noise(config.subordinator, config.simulate_h, problem.horizon, config.seed, 0);
    const TimeChangeGrid grid = grid_from_noise(noise, problem.horizon);
    const Trajectory path = simulate_path(problem, config.truncation, grid,
                                          wiener_increments(noise, grid.last_index()), config.scheme);

    auto traj = open_output(config, "trajectory.csv");
    traj << std::setprecision(15) << "n,tau_n,E_h";
    for (Eigen::Index i = 0; i < problem.dim; ++i) traj << ",X_" << i + 1;
    traj << '\n';
    for (std::size_t n = 0; n < path.size(); ++n) {
        traj << n << ',' << grid.node(n) << ',' << grid.inverse(grid.node(n));
        for (Eigen::Index i = 0; i < problem.dim; ++i) traj << ',' << path.state(n)(i);
        traj << '\n';
    }
    auto grid_csv = open_output(config, "grid.csv");
    grid_csv << std::setprecision(15) << "i,tau_i\n";
    for (std::size_t i = 0; i < grid.nodes().size(); ++i) grid_csv << i << ',' << grid.node(i) << '\n';

    out << "simulated " << problem.name << " with h = " << config.simulate_h << ": " << path.size()
        << " states, N = " << grid.last_index() << ", X(T) = " << path.state(path.size() - 1).transpose() << '\n';
    return 0;
}

int convergence(const RunConfig& config, std::ostream& out) {
    const SdeProblem problem = problem_by_name(config.problem);
    StrongErrorOptions options;
    options.scheme = config.scheme;
    options.threads = config.threads;
    options.skip_blowups = config.skip_blowups;
    if (config.problem == "gbm") {
        const double y0 = problem.initial(0);
        options.exact = [y0](double e, double w) { return Vector::Constant(1, gbm_exact(0.1, 0.2, y0, e, w)); };
    }
    options.nodes = config.nodes.value_or(options.exact ? ErrorNodes::CoarseGrid : ErrorNodes::FineGrid);

    const ErrorTable table = strong_error_table(problem, config.truncation, config.subordinator, config.ladder,
                                                config.h_ref, config.trajectories, config.p_bar, config.seed, options);
    const RegressionResult fit = fit_convergence_order(table);

    auto csv = open_output(config, "convergence.csv");
    write_error_csv(csv, table, &fit, config.timestamp);
    if (config.plot) {
        auto svg = open_output(config, "convergence.svg");
        write_error_svg(svg, table, fit);
    }
    write_error_csv(out, table, &fit, false);
    out << "slope = " << std::setprecision(6) << fit.slope << '\n';
    return 0;
}

int check(const RunConfig& config, std::ostream& out) {
    const SdeProblem problem = problem_by_name(config.problem);
    SamplingSpec spec;
    spec.radius = config.check_radius;
    spec.samples = config.check_samples;
    spec.p = config.check_p;
    spec.q = config.check_q;
    spec.seed = config.seed;
    if (config.check_candidates) {
        std::copy(config.check_candidates->begin(), config.check_candidates->end(), spec.candidates.begin());
    } else {
        spec.candidates = fit_candidates(problem, spec, config.check_safety);
    }
    const auto reports = check_assumptions(problem, spec);

    auto csv = open_output(config, "assumptions.csv");
    csv << std::setprecision(15) << "assumption,samples,worst_ratio,fitted_constant,candidate,violated,witness_t,witness_s,witness_x,witness_y\n";
    auto vec = [](const Vector& v) {
        std::ostringstream s;
        s << std::setprecision(15);
        for (Eigen::Index i = 0; i < v.size(); ++i) s << (i ? ";" : "") << v(i);
        return s.str();
    };
    out << std::left << std::setw(22) << "assumption" << std::setw(14) << "worst ratio" << std::setw(14)
        << "candidate" << "status\n";
    for (const AssumptionReport& r : reports) {
        csv << assumption_name(r.id) << ',' << r.samples << ',' << r.worst_ratio << ',' << r.fitted_constant << ','
            << r.candidate << ',' << (r.violated ? "true" : "false") << ',' << r.witness.t << ',' << r.witness.s
            << ',' << vec(r.witness.x) << ',' << vec(r.witness.y) << '\n';
        out << std::setw(22) << assumption_name(r.id) << std::setw(14) << std::setprecision(6) << r.worst_ratio
            << std::setw(14) << r.candidate << (r.violated ? "VIOLATED" : "not violated on sample") << '\n';
    }
    return 0;
}

int subordinator_test(const RunConfig& config, std::ostream& out) {
    auto csv = open_output(config, "subordinator_test.csv");
    csv << std::setprecision(15) << "h,lambda,empirical,stderr,expected,pass\n";
    std::size_t passed = 0, total = 0;
    out << describe(config.subordinator) << ", " << config.subtest_samples << " samples per step size\n";
    for (std::size_t s = 0; s < config.subtest_steps.size(); ++s) {
        RandomStream rng = make_stream(config.seed, s, StreamLane::Subordinator);
        const auto checks = laplace_transform_check(config.subordinator, config.subtest_steps[s],
                                                    config.subtest_lambdas, config.subtest_samples, rng);
        for (const LaplaceCheck& c : checks) {
            const bool ok = c.within(3.0);
            passed += ok;
            ++total;
            csv << c.h << ',' << c.lambda << ',' << c.empirical << ',' << c.standard_error << ',' << c.expected << ','
                << (ok ? "true" : "false") << '\n';
            out << "h=" << c.h << " lambda=" << c.lambda << " mean=" << std::setprecision(8) << c.empirical
                << " expected=" << c.expected << " se=" << c.standard_error << "  " << (ok ? "PASS" : "FAIL") << '\n';
        }
    }
    out << (passed == total ? "PASS" : "FAIL") << " (" << passed << "/" << total << " cells within 3 s.e.)\n";
    return 0;
}

}  // namespace

int run(Command command, const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (command) {
            case Command::Simulate: return simulate(config, out);
            case Command::Convergence: return convergence(config, out);
            case Command::CheckAssumptions: return check(config, out);
            case Command::SubordinatorTest: return subordinator_test(config, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

namespace {

struct FlagTable {
    std::map<std::string, std::string> overrides;
    std::optional<std::string> config_path;

    void option(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        app->add_option_function<std::string>(flag, [this, key](const std::string& v) { overrides[key] = v; }, help);
    }
    void flag(CLI::App* app, const std::string& flag, const std::string& key, const std::string& value,
              const std::string& help) {
        app->add_flag_callback(flag, [this, key, value] { overrides[key] = value; }, help);
    }

    void common(CLI::App* app) {
        app->set_help_flag("--help", "print this help message and exit");
        app->add_option_function<std::string>("--config", [this](const std::string& v) { config_path = v; },
                                              "flat section.key = value config file");
        option(app, "--problem", "problem.name", "example1 | example2 | gbm");
        option(app, "--subordinator", "subordinator.family", "stable | deterministic");
        option(app, "--alpha", "subordinator.alpha", "stability index in (0,1)");
        option(app, "--scale", "subordinator.scale", "Laplace exponent scale");
        option(app, "--seed", "run.seed", "random seed");
        option(app, "--threads", "run.threads", "worker threads (0 = all cores)");
        option(app, "--out", "run.output_dir", "output directory");
        option(app, "--scheme", "run.scheme", "milstein | em");
        option(app, "--epsilon", "trunc.epsilon", "truncation schedule exponent in (0, 1/4]");
        option(app, "--mu-coeff", "trunc.mu_coeff", "growth bound coefficient");
        option(app, "--mu-exponent", "trunc.mu_exponent", "growth bound exponent");
        flag(app, "--kappa-floor", "trunc.kappa_floor", "true", "clamp kappa(h) below at mu(1)");
    }
};

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Truncated Milstein simulation of time-changed SDEs"};
    app.require_subcommand(1);
    FlagTable flags;

    auto* simulate_cmd = app.add_subcommand("simulate", "simulate one trajectory and dump it as CSV");
    flags.common(simulate_cmd);
    flags.option(simulate_cmd, "--h", "simulate.h", "internal step size");

    auto* conv = app.add_subcommand("convergence", "estimate the strong convergence order");
    flags.common(conv);
    flags.option(conv, "--ladder", "run.ladder", "comma-separated step sizes");
    flags.option(conv, "--href", "run.href", "reference step size");
    flags.option(conv, "-M,--trajectories", "run.trajectories", "number of trajectories");
    flags.option(conv, "--p-bar", "run.p_bar", "error norm exponent");
    flags.option(conv, "--nodes", "run.nodes", "fine | coarse | auto");
    flags.flag(conv, "--skip-blowups", "run.skip_blowups", "true", "tolerate and count non-finite trajectories");
    flags.flag(conv, "--plot", "run.plot", "true", "also write convergence.svg");
    flags.flag(conv, "--no-timestamp", "run.timestamp", "false", "omit the timestamp comment line");

    auto* chk = app.add_subcommand("check-assumptions", "sample the structural conditions on f and g");
    flags.common(chk);
    flags.option(chk, "--radius", "check.radius", "sampling box radius");
    flags.option(chk, "--samples", "check.samples", "sample count");
    flags.option(chk, "--p", "check.p", "moment exponent p > 2");
    flags.option(chk, "--q", "check.q", "moment exponent q > 2");
    flags.option(chk, "--safety", "check.safety", "safety factor for fitted candidates");
    flags.option(chk, "--candidates", "check.candidates", "five explicit candidate constants");

    auto* sub = app.add_subcommand("subordinator-test", "Laplace-transform check of subordinator increments");
    flags.common(sub);
    flags.option(sub, "--samples", "subtest.samples", "draws per step size");
    flags.option(sub, "--steps", "subtest.steps", "comma-separated step sizes");
    flags.option(sub, "--lambdas", "subtest.lambdas", "comma-separated Laplace arguments");

    std::vector<const char*> argv{"tcsde"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    Command command = Command::Simulate;
    if (conv->parsed()) command = Command::Convergence;
    if (chk->parsed()) command = Command::CheckAssumptions;
    if (sub->parsed()) command = Command::SubordinatorTest;

    RunConfig config;
    try {
        config = parse_config(flags.config_path, flags.overrides);
    } catch (const std::exception& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    }
    return run(command, config, out, err);
}

}  // namespace tcsde::cli
