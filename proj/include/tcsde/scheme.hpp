#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "tcsde/problem.hpp"
#include "tcsde/subordinator.hpp"
#include "tcsde/truncation.hpp"

namespace tcsde {

enum class SchemeKind { TruncatedMilstein, TruncatedEM };

/// Lg(t, y) = sum_l g^l(t, y) G^l(t, y).
inline Vector lg(const SdeProblem& problem, double t, const Vector& y) {
    return problem.diffusion_jacobian(t, y) * problem.diffusion(t, y);
}

/// X + f_h h + g_h dW + 1/2 Lg_h (dW^2 - h). Throws NumericOverflowError on a non-finite result.
Vector milstein_step(const SdeProblem& problem, const TruncationConfig& cfg, double h, double tau, const Vector& x,
                     double dw);

/// X + f_h h + g_h dW.
Vector em_step(const SdeProblem& problem, const TruncationConfig& cfg, double h, double tau, const Vector& x,
               double dw);

/// States X_{tau_0}, ..., X_{tau_N} stored column-wise.
struct Trajectory {
    double step = 0.0;
    SchemeKind scheme = SchemeKind::TruncatedMilstein;
    Matrix states;

    std::size_t size() const noexcept { return static_cast<std::size_t>(states.cols()); }
    auto state(std::size_t n) const { return states.col(static_cast<Eigen::Index>(n)); }
};

/// Runs the chosen stepper along `grid` from the problem's initial value.
/// `wiener` holds W((n+1)h) - W(nh) for n = 0..N-1 and must have exactly N entries.
Trajectory simulate_path(const SdeProblem& problem, const TruncationConfig& cfg, const TimeChangeGrid& grid,
                         std::span<const double> wiener, SchemeKind scheme = SchemeKind::TruncatedMilstein);

/// Largest relative mismatch between the supplied diffusion Jacobian and a
/// central finite difference of the diffusion, max |G - G_fd| / (1 + |G|),
/// over `samples` points drawn from [0, T] x [-radius, radius]^d.
double jacobian_mismatch(const SdeProblem& problem, double radius, std::size_t samples, std::uint64_t seed);

}  // namespace tcsde
