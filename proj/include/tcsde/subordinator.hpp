#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "tcsde/random.hpp"

namespace tcsde {

/// Strictly increasing Levy clock D(t) with D(0) = 0.
///
/// `Stable` is the one-sided alpha-stable subordinator with Laplace exponent
/// scale * lambda^alpha. `Deterministic` is D(t) = t, which turns the
/// time-changed scheme into the classical one.
struct SubordinatorModel {
    enum class Family { Stable, Deterministic };

    Family family = Family::Stable;
    double alpha = 0.9;
    double scale = 1.0;

    static SubordinatorModel stable(double alpha, double scale = 1.0);
    static SubordinatorModel deterministic();

    /// Throws std::invalid_argument on alpha outside (0,1) or non-positive scale.
    void validate() const;

    /// -log E[exp(-lambda D(1))].
    double laplace_exponent(double lambda) const;
};

/// Draws one increment distributed as D(h). Strictly positive.
double sample_increment(const SubordinatorModel& model, double h, RandomStream& rng);

inline constexpr std::size_t kDefaultMaxNodes = 100'000'000;

/// First-passage grid tau_0 = 0 < tau_1 < ... < tau_{N+1} with
/// tau_N <= T < tau_{N+1}, and the discretized inverse E_h built on it.
class TimeChangeGrid {
public:
    /// Takes the prefix of `cumulative` (D_h(t_i), starting at 0) that
    /// satisfies the stopping rule. Throws std::invalid_argument if the
    /// nodes never pass T or are not strictly increasing from zero.
    static TimeChangeGrid from_cumulative(double h, double horizon, std::span<const double> cumulative);

    double step() const noexcept { return h_; }
    double horizon() const noexcept { return horizon_; }
    /// Index N of the last node inside [0, T].
    std::size_t last_index() const noexcept { return tau_.size() - 2; }
    const std::vector<double>& nodes() const noexcept { return tau_; }
    double node(std::size_t i) const { return tau_.at(i); }

    /// Index i with t in [tau_i, tau_{i+1}). Throws std::domain_error outside [0, T].
    std::size_t interval_of(double t) const;
    /// E_h(t) = i h for t in [tau_i, tau_{i+1}).
    double inverse(double t) const;

private:
    TimeChangeGrid(double h, double horizon, std::vector<double> tau)
        : h_(h), horizon_(horizon), tau_(std::move(tau)) {}

    double h_;
    double horizon_;
    std::vector<double> tau_;
};

/// Iterates D_h(t_i) = D_h(t_{i-1}) + Delta_i until T in [D_h(t_N), D_h(t_{N+1})).
/// Throws ResourceLimitError when more than `max_nodes` nodes would be needed.
TimeChangeGrid build_time_change_grid(const SubordinatorModel& model, double h, double horizon,
                                      RandomStream& rng, std::size_t max_nodes = kDefaultMaxNodes);

inline double evaluate_inverse(const TimeChangeGrid& grid, double t) { return grid.inverse(t); }

}  // namespace tcsde

namespace tcsde {

/// Monte Carlo estimate of E exp(-lambda D(h)) against exp(-h psi(lambda)).
struct LaplaceCheck {
    double h = 0.0;
    double lambda = 0.0;
    double empirical = 0.0;
    double standard_error = 0.0;
    double expected = 0.0;

    bool within(double standard_errors = 3.0) const {
        return std::abs(empirical - expected) <= standard_errors * standard_error;
    }
};

/// One check per lambda, all from the same `samples` draws of D(h).
std::vector<LaplaceCheck> laplace_transform_check(const SubordinatorModel& model, double h,
                                                  std::span<const double> lambdas, std::size_t samples,
                                                  RandomStream& rng);

}  // namespace tcsde
