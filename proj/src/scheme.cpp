#include "tcsde/scheme.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "tcsde/errors.hpp"
#include "tcsde/random.hpp"

namespace tcsde {

namespace {

Vector advance(const SdeProblem& problem, double radius, double h, double tau, const Vector& x, double dw,
               SchemeKind scheme) {
    const Vector projected = project(x, radius);
    const Vector g = problem.diffusion(tau, projected);
    Vector next = x + problem.drift(tau, projected) * h + g * dw;
    if (scheme == SchemeKind::TruncatedMilstein) {
        next.noalias() += (0.5 * (dw * dw - h)) * (problem.diffusion_jacobian(tau, projected) * g);
    }
    if (!next.allFinite()) throw NumericOverflowError("non-finite state at tau = " + std::to_string(tau), 0);
    return next;
}

}  // namespace

Vector milstein_step(const SdeProblem& problem, const TruncationConfig& cfg, double h, double tau, const Vector& x,
                     double dw) {
    return advance(problem, truncation_radius(cfg, h), h, tau, x, dw, SchemeKind::TruncatedMilstein);
}

Vector em_step(const SdeProblem& problem, const TruncationConfig& cfg, double h, double tau, const Vector& x,
               double dw) {
    return advance(problem, truncation_radius(cfg, h), h, tau, x, dw, SchemeKind::TruncatedEM);
}

Trajectory simulate_path(const SdeProblem& problem, const TruncationConfig& cfg, const TimeChangeGrid& grid,
                         std::span<const double> wiener, SchemeKind scheme) {
    const std::size_t steps = grid.last_index();
    if (wiener.size() != steps) {
        throw std::invalid_argument("expected " + std::to_string(steps) + " Wiener increments, got " +
                                    std::to_string(wiener.size()));
    }
    if (problem.initial.size() != problem.dim) throw std::invalid_argument("initial value has wrong dimension");
    const double h = grid.step();
    const double radius = truncation_radius(cfg, h);

    Trajectory path{h, scheme, Matrix(problem.dim, static_cast<Eigen::Index>(steps + 1))};
    path.states.col(0) = problem.initial;
    Vector x = problem.initial;
    for (std::size_t n = 0; n < steps; ++n) {
        try {
            x = advance(problem, radius, h, grid.node(n), x, wiener[n], scheme);
        } catch (const NumericOverflowError& e) {
            throw NumericOverflowError(std::string(e.what()) + " (step " + std::to_string(n) + ")", n);
        }
        path.states.col(static_cast<Eigen::Index>(n + 1)) = x;
    }
    return path;
}

double jacobian_mismatch(const SdeProblem& problem, double radius, std::size_t samples, std::uint64_t seed) {
    RandomStream rng = make_stream(seed, 0, StreamLane::Sampling);
    std::uniform_real_distribution<double> time(0.0, problem.horizon);
    std::uniform_real_distribution<double> coord(-radius, radius);
    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const double t = time(rng);
        Vector y(problem.dim);
        for (Eigen::Index i = 0; i < problem.dim; ++i) y(i) = coord(rng);
        const Matrix analytic = problem.diffusion_jacobian(t, y);
        for (Eigen::Index l = 0; l < problem.dim; ++l) {
            const double step = 1e-6 * (1.0 + std::abs(y(l)));
            Vector up = y, down = y;
            up(l) += step;
            down(l) -= step;
            const Vector column = (problem.diffusion(t, up) - problem.diffusion(t, down)) / (2.0 * step);
            const double err = (analytic.col(l) - column).norm() / (1.0 + analytic.col(l).norm());
            worst = std::max(worst, err);
        }
    }
    return worst;
}

}  // namespace tcsde
