#include "tcsde/mc_harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tcsde/errors.hpp"
#include "tcsde/random.hpp"

namespace tcsde {

CoupledNoise generate_coupled_noise(const SubordinatorModel& model, double step, double horizon, std::uint64_t seed,
                                    std::size_t trajectory, std::size_t block, std::size_t max_nodes) {
    model.validate();
    if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("noise step must lie in (0, 1]");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (block == 0) throw std::invalid_argument("block must be positive");

    RandomStream clock_rng = make_stream(seed, trajectory, StreamLane::Subordinator);
    RandomStream wiener_rng = make_stream(seed, trajectory, StreamLane::Wiener);
    std::normal_distribution<double> normal(0.0, std::sqrt(step));

    CoupledNoise noise;
    noise.step = step;
    noise.seed = seed;
    noise.trajectory = trajectory;
    auto draw = [&] {
        if (noise.tau.size() >= max_nodes) {
            throw ResourceLimitError("coupled noise exceeded " + std::to_string(max_nodes) + " nodes");
        }
        noise.tau.push_back(noise.tau.back() + sample_increment(model, step, clock_rng));
        noise.wiener.push_back(noise.wiener.back() + normal(wiener_rng));
    };
    while (noise.tau.back() <= horizon) draw();
    while (noise.increments() % block != 0) draw();
    return noise;
}

std::vector<CoupledNoise> generate_coupled_noise_batch(const SubordinatorModel& model, double step, double horizon,
                                                 std::size_t count, std::uint64_t seed, std::size_t block) {
    if (count == 0) throw std::invalid_argument("at least one trajectory is required");
    std::vector<CoupledNoise> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count; ++j) out.push_back(generate_coupled_noise(model, step, horizon, seed, j, block));
    return out;
}

CoupledNoise aggregate(const CoupledNoise& noise, std::size_t k) {
    if (k == 0) throw std::invalid_argument("aggregation factor must be positive");
    if (noise.increments() % k != 0) {
        throw std::invalid_argument("aggregation factor " + std::to_string(k) + " does not divide " +
                                    std::to_string(noise.increments()) + " increments");
    }
    if (k == 1) return noise;
    CoupledNoise coarse;
    coarse.step = noise.step * static_cast<double>(k);
    coarse.seed = noise.seed;
    coarse.trajectory = noise.trajectory;
    const std::size_t n = noise.increments() / k;
    coarse.tau.resize(n + 1);
    coarse.wiener.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        coarse.tau[i] = noise.tau[i * k];
        coarse.wiener[i] = noise.wiener[i * k];
    }
    return coarse;
}

TimeChangeGrid grid_from_noise(const CoupledNoise& noise, double horizon) {
    return TimeChangeGrid::from_cumulative(noise.step, horizon, noise.tau);
}

std::vector<double> wiener_increments(const CoupledNoise& noise, std::size_t count) {
    if (count > noise.increments()) throw std::invalid_argument("not enough Wiener increments");
    std::vector<double> dw(count);
    for (std::size_t i = 0; i < count; ++i) dw[i] = noise.wiener[i + 1] - noise.wiener[i];
    return dw;
}

std::size_t step_ratio(double h, double h_ref) {
    if (!(h_ref > 0.0) || !(h > 0.0)) throw std::invalid_argument("step sizes must be positive");
    const double ratio = h / h_ref;
    const double k = std::round(ratio);
    if (k < 1.0 || std::abs(ratio - k) > 1e-9 * ratio) {
        std::ostringstream msg;
        msg << "step " << h << " is not an integer multiple of the reference step " << h_ref;
        throw std::invalid_argument(msg.str());
    }
    return static_cast<std::size_t>(k);
}

std::string describe(const SubordinatorModel& model) {
    std::ostringstream s;
    if (model.family == SubordinatorModel::Family::Deterministic) {
        s << "deterministic";
    } else {
        s << "stable(alpha=" << model.alpha << ";scale=" << model.scale << ")";
    }
    return s.str();
}

namespace {

struct TrajectoryOutcome {
    std::vector<double> sup_error;   // per ladder row
    std::vector<double> sup_square;  // per ladder row
    std::vector<bool> blown;         // per ladder row
    std::exception_ptr failure;
};

TrajectoryOutcome run_trajectory(const SdeProblem& problem, const TruncationConfig& cfg,
                                 const SubordinatorModel& model, const std::vector<std::size_t>& factors,
                                 std::size_t block, double h_ref, std::uint64_t seed, std::size_t j,
                                 const StrongErrorOptions& options) {
    const std::size_t rows = factors.size();
    TrajectoryOutcome out{std::vector<double>(rows, 0.0), std::vector<double>(rows, 0.0),
                          std::vector<bool>(rows, false), nullptr};
    const double horizon = problem.horizon;
    const CoupledNoise fine = generate_coupled_noise(model, h_ref, horizon, seed, j, block, options.max_nodes);
    const TimeChangeGrid fine_grid = grid_from_noise(fine, horizon);
    const std::size_t fine_last = fine_grid.last_index();

    // Reference states at fine nodes 0..fine_last.
    Matrix reference;
    if (options.exact) {
        reference.resize(problem.dim, static_cast<Eigen::Index>(fine_last + 1));
        for (std::size_t i = 0; i <= fine_last; ++i) {
            reference.col(static_cast<Eigen::Index>(i)) =
                options.exact(static_cast<double>(i) * h_ref, fine.wiener[i]);
        }
    } else {
        try {
            reference = simulate_path(problem, cfg, fine_grid, wiener_increments(fine, fine_last), options.scheme)
                            .states;
        } catch (const NumericOverflowError& e) {
            if (!options.skip_blowups) {
                throw NumericOverflowError(std::string(e.what()) + " in reference path of trajectory " +
                                               std::to_string(j),
                                           e.step(), j);
            }
            std::fill(out.blown.begin(), out.blown.end(), true);
            return out;
        }
    }

    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t k = factors[r];
        const CoupledNoise coarse = aggregate(fine, k);
        const TimeChangeGrid grid = grid_from_noise(coarse, horizon);
        Trajectory path;
        try {
            path = simulate_path(problem, cfg, grid, wiener_increments(coarse, grid.last_index()), options.scheme);
        } catch (const NumericOverflowError& e) {
            if (!options.skip_blowups) {
                throw NumericOverflowError(std::string(e.what()) + " in trajectory " + std::to_string(j) +
                                               " at h = " + std::to_string(grid.step()),
                                           e.step(), j);
            }
            out.blown[r] = true;
            continue;
        }
        double worst = 0.0;
        if (options.nodes == ErrorNodes::FineGrid) {
            for (std::size_t i = 0; i <= fine_last; ++i) {
                const auto coarse_col = static_cast<Eigen::Index>(i / k);
                worst = std::max(worst, (reference.col(static_cast<Eigen::Index>(i)) - path.states.col(coarse_col)).norm());
            }
        } else {
            for (std::size_t n = 0; n < path.size(); ++n) {
                const auto n_col = static_cast<Eigen::Index>(n);
                worst = std::max(worst, (reference.col(n_col * static_cast<Eigen::Index>(k)) - path.states.col(n_col)).norm());
            }
        }
        out.sup_error[r] = worst;
        out.sup_square[r] = path.states.colwise().squaredNorm().maxCoeff();
    }
    return out;
}

}  // namespace

ErrorTable strong_error_table(const SdeProblem& problem, const TruncationConfig& cfg, const SubordinatorModel& model,
                              std::span<const double> ladder, double h_ref, std::size_t trajectories, double p_bar,
                              std::uint64_t seed, const StrongErrorOptions& options) {
    cfg.validate();
    model.validate();
    if (ladder.empty()) throw std::invalid_argument("step-size ladder is empty");
    if (trajectories == 0) throw std::invalid_argument("at least one trajectory is required");
    if (!(p_bar >= 2.0)) throw std::invalid_argument("error norm exponent must be at least 2");
    if (!(h_ref > 0.0 && h_ref <= 1.0)) throw std::invalid_argument("reference step must lie in (0, 1]");

    std::vector<double> steps(ladder.begin(), ladder.end());
    std::sort(steps.begin(), steps.end(), std::greater<>());
    std::vector<std::size_t> factors;
    std::size_t block = 1;
    for (double h : steps) {
        if (h > 1.0) throw std::invalid_argument("ladder step sizes must lie in (0, 1]");
        factors.push_back(step_ratio(h, h_ref));
        block = std::lcm(block, factors.back());
    }

    std::vector<TrajectoryOutcome> outcomes(trajectories);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < trajectories; j = next++) {
            try {
                outcomes[j] = run_trajectory(problem, cfg, model, factors, block, h_ref, seed, j, options);
            } catch (...) {
                outcomes[j].failure = std::current_exception();
            }
        }
    };
    unsigned threads = options.threads != 0 ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, trajectories));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
    }
    for (const TrajectoryOutcome& o : outcomes) {
        if (o.failure) std::rethrow_exception(o.failure);
    }

    ErrorTable table;
    table.problem = problem.name;
    table.subordinator = describe(model);
    table.seed = seed;
    table.h_ref = h_ref;
    for (std::size_t r = 0; r < steps.size(); ++r) {
        ErrorRow row;
        row.h = steps[r];
        row.p_bar = p_bar;
        double sum = 0.0, sum_sq = 0.0, moment = 0.0;
        for (const TrajectoryOutcome& o : outcomes) {
            if (o.blown[r]) {
                ++row.blowups;
                continue;
            }
            const double v = std::pow(o.sup_error[r], p_bar);
            sum += v;
            sum_sq += v * v;
            moment += o.sup_square[r];
            ++row.trajectories;
        }
        if (row.trajectories == 0) throw NumericOverflowError("every trajectory blew up at h = " + std::to_string(row.h), 0);
        const double m = static_cast<double>(row.trajectories);
        const double mean = sum / m;
        row.error = std::pow(mean, 1.0 / p_bar);
        row.mean_sup_square = moment / m;
        if (row.trajectories > 1 && mean > 0.0) {
            const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
            // Delta method for mean^(1/p).
            row.stderr_estimate = std::sqrt(var / m) * row.error / (p_bar * mean);
        }
        table.rows.push_back(row);
    }
    return table;
}

RegressionResult fit_convergence_order(const ErrorTable& table) {
    if (table.rows.size() < 2) throw std::invalid_argument("need at least two rows to fit a convergence order");
    std::vector<double> xs, ys;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const ErrorRow& row = table.rows[r];
        if (!(row.error > 0.0) || !std::isfinite(row.error)) {
            std::ostringstream msg;
            msg << "row " << r << " (h = " << row.h << ") has non-positive error " << row.error;
            throw std::invalid_argument(msg.str());
        }
        xs.push_back(std::log10(row.h));
        ys.push_back(std::log10(row.error));
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("step sizes must not all coincide");
    RegressionResult fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < xs.size(); ++i) fit.residuals.push_back(ys[i] - (fit.intercept + fit.slope * xs[i]));
    return fit;
}

void write_error_csv(std::ostream& out, const ErrorTable& table, const RegressionResult* fit, bool timestamp) {
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::defaultfloat << std::setprecision(15);
    out << "h,M,p_bar,error,stderr,log10_h,log10_error\n";
    for (const ErrorRow& row : table.rows) {
        out << row.h << ',' << row.trajectories << ',' << row.p_bar << ',' << row.error << ',' << row.stderr_estimate
            << ',' << std::log10(row.h) << ',' << std::log10(row.error) << '\n';
    }
    if (fit != nullptr) {
        out << "# slope=" << fit->slope << '\n';
        out << "# intercept=" << fit->intercept << '\n';
    }
    out << "# problem=" << table.problem << '\n';
    out << "# subordinator=" << table.subordinator << '\n';
    out << "# seed=" << table.seed << '\n';
    out << "# h_ref=" << table.h_ref << '\n';
    std::size_t blowups = 0;
    for (const ErrorRow& row : table.rows) blowups += row.blowups;
    out << "# blowups=" << blowups << '\n';
    if (timestamp) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm utc{};
        gmtime_r(&now, &utc);
        out << "# generated=" << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ") << '\n';
    }
    out.flags(flags);
    out.precision(precision);
}

void write_error_svg(std::ostream& out, const ErrorTable& table, const RegressionResult& fit) {
    constexpr double width = 640, height = 480, margin = 60;
    double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
    for (const ErrorRow& row : table.rows) {
        if (!(row.error > 0.0)) continue;
        x_lo = std::min(x_lo, std::log10(row.h));
        x_hi = std::max(x_hi, std::log10(row.h));
        y_lo = std::min(y_lo, std::log10(row.error));
        y_hi = std::max(y_hi, std::log10(row.error));
    }
    if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
    if (!(y_hi > y_lo)) y_hi = y_lo + 1.0;
    const double pad_x = 0.05 * (x_hi - x_lo), pad_y = 0.1 * (y_hi - y_lo);
    x_lo -= pad_x, x_hi += pad_x, y_lo -= pad_y, y_hi += pad_y;
    auto px = [&](double lx) { return margin + (lx - x_lo) / (x_hi - x_lo) * (width - 2 * margin); };
    auto py = [&](double ly) { return height - margin - (ly - y_lo) / (y_hi - y_lo) * (height - 2 * margin); };

    out << std::fixed << std::setprecision(2);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">log10 h</text>\n";
    out << "<text x=\"15\" y=\"" << height / 2 << "\" transform=\"rotate(-90 15 " << height / 2
        << ")\" text-anchor=\"middle\">log10 error</text>\n";
    out << "<line x1=\"" << px(x_lo) << "\" y1=\"" << py(fit.intercept + fit.slope * x_lo) << "\" x2=\"" << px(x_hi)
        << "\" y2=\"" << py(fit.intercept + fit.slope * x_hi) << "\" stroke=\"steelblue\" stroke-dasharray=\"6,4\"/>\n";
    for (const ErrorRow& row : table.rows) {
        if (!(row.error > 0.0)) continue;
        out << "<circle cx=\"" << px(std::log10(row.h)) << "\" cy=\"" << py(std::log10(row.error))
            << "\" r=\"4\" fill=\"firebrick\"/>\n";
    }
    out << std::setprecision(4);
    out << "<text x=\"" << margin + 10 << "\" y=\"" << margin + 10 << "\">" << table.problem
        << ": slope = " << fit.slope << "</text>\n";
    out << "</svg>\n";
}

}  // namespace tcsde
