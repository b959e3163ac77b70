#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tcsde/problem.hpp"
#include "tcsde/scheme.hpp"
#include "tcsde/subordinator.hpp"
#include "tcsde/truncation.hpp"

namespace tcsde {

/// Subordinator and Wiener paths of one trajectory on the internal-time
/// lattice i * step, stored as running sums so that coarser lattices are
/// exact sub-samples: tau[i] = D_h(i step), wiener[i] = W(i step).
struct CoupledNoise {
    double step = 0.0;
    std::vector<double> tau{0.0};
    std::vector<double> wiener{0.0};
    std::uint64_t seed = 0;
    std::size_t trajectory = 0;

    std::size_t increments() const noexcept { return tau.size() - 1; }
    double delta(std::size_t i) const { return tau.at(i + 1) - tau.at(i); }
    double dw(std::size_t i) const { return wiener.at(i + 1) - wiener.at(i); }
};

/// Noise for trajectory `trajectory`, a pure function of (seed, trajectory).
/// Draws increments until D passes `horizon`, then extends the count to the
/// next multiple of `block` so aggregation by any divisor of `block` covers
/// the stopping rule.
CoupledNoise generate_coupled_noise(const SubordinatorModel& model, double step, double horizon, std::uint64_t seed,
                                    std::size_t trajectory, std::size_t block = 1,
                                    std::size_t max_nodes = kDefaultMaxNodes);

std::vector<CoupledNoise> generate_coupled_noise_batch(const SubordinatorModel& model, double step, double horizon,
                                                 std::size_t count, std::uint64_t seed, std::size_t block = 1);

/// Sums k consecutive increments of both streams. Throws std::invalid_argument
/// when k does not divide the increment count.
CoupledNoise aggregate(const CoupledNoise& noise, std::size_t k);

/// First-passage grid of the noise's subordinator path.
TimeChangeGrid grid_from_noise(const CoupledNoise& noise, double horizon);

/// First `count` Wiener increments.
std::vector<double> wiener_increments(const CoupledNoise& noise, std::size_t count);

enum class ErrorNodes {
    FineGrid,    // sup over reference nodes, coarse path extended piecewise-constantly
    CoarseGrid,  // sup over the coarse path's own nodes
};

/// Closed-form solution at internal time e given W(e).
using ExactSolution = std::function<Vector(double internal_time, double wiener_value)>;

struct StrongErrorOptions {
    SchemeKind scheme = SchemeKind::TruncatedMilstein;
    ErrorNodes nodes = ErrorNodes::FineGrid;
    unsigned threads = 0;  // 0: hardware concurrency
    bool skip_blowups = false;
    /// Replaces the reference path when set.
    ExactSolution exact;
    std::size_t max_nodes = kDefaultMaxNodes;
};

struct ErrorRow {
    double h = 0.0;
    std::size_t trajectories = 0;
    double p_bar = 2.0;
    double error = 0.0;
    double stderr_estimate = 0.0;
    double mean_sup_square = 0.0;  // mean over trajectories of sup_n |X_n|^2
    std::size_t blowups = 0;
};

struct ErrorTable {
    std::string problem;
    std::string subordinator;
    std::uint64_t seed = 0;
    double h_ref = 0.0;
    std::vector<ErrorRow> rows;  // decreasing h
};

/// Coupled-path strong error e(h) = (mean_j sup_t |X_ref - X_h|^p)^(1/p) for
/// every h in `ladder`, each an integer multiple of h_ref.
ErrorTable strong_error_table(const SdeProblem& problem, const TruncationConfig& cfg, const SubordinatorModel& model,
                              std::span<const double> ladder, double h_ref, std::size_t trajectories, double p_bar,
                              std::uint64_t seed, const StrongErrorOptions& options = {});

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> residuals;
};

/// Least squares of log10 e(h) on log10 h.
RegressionResult fit_convergence_order(const ErrorTable& table);

/// Integer k with h = k h_ref, or std::invalid_argument.
std::size_t step_ratio(double h, double h_ref);

std::string describe(const SubordinatorModel& model);

/// `h,M,p_bar,error,stderr,log10_h,log10_error` rows followed by `#` comment lines.
void write_error_csv(std::ostream& out, const ErrorTable& table, const RegressionResult* fit, bool timestamp);

/// Log-log plot of error against h with the fitted line.
void write_error_svg(std::ostream& out, const ErrorTable& table, const RegressionResult& fit);

}  // namespace tcsde
