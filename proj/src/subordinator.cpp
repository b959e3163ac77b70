#include "tcsde/subordinator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tcsde/errors.hpp"

namespace tcsde {

SubordinatorModel SubordinatorModel::stable(double alpha, double scale) {
    SubordinatorModel m{Family::Stable, alpha, scale};
    m.validate();
    return m;
}

SubordinatorModel SubordinatorModel::deterministic() { return {Family::Deterministic, 1.0, 1.0}; }

void SubordinatorModel::validate() const {
    if (family == Family::Stable && !(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("stable subordinator needs alpha in (0,1), got " + std::to_string(alpha));
    }
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("subordinator scale must be positive");
    }
}

double SubordinatorModel::laplace_exponent(double lambda) const {
    if (family == Family::Deterministic) return lambda;
    return scale * std::pow(lambda, alpha);
}

namespace {

// Kanter's representation: with U ~ U(0, pi) and E ~ Exp(1),
//   S = (A(U) / E)^((1 - a) / a),  A(u) = [sin(a u) / sin u]^(1/(1-a)) sin((1-a) u) / sin(a u)
// has E exp(-lambda S) = exp(-lambda^a).
double standard_positive_stable(double a, RandomStream& rng) {
    std::uniform_real_distribution<double> uniform(0.0, std::numbers::pi);
    std::exponential_distribution<double> exponential(1.0);
    for (;;) {
        const double u = uniform(rng);
        const double e = exponential(rng);
        if (u <= 0.0 || e <= 0.0) continue;
        const double sau = std::sin(a * u);
        const double num = std::pow(sau / std::sin(u), 1.0 / (1.0 - a)) * std::sin((1.0 - a) * u) / sau;
        const double s = std::pow(num / e, (1.0 - a) / a);
        if (s > 0.0 && std::isfinite(s)) return s;
    }
}

}  // namespace

double sample_increment(const SubordinatorModel& model, double h, RandomStream& rng) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw std::invalid_argument("subordinator increment needs h > 0");
    }
    switch (model.family) {
        case SubordinatorModel::Family::Deterministic:
            return h;
        case SubordinatorModel::Family::Stable:
            // D(h) = (scale h)^(1/alpha) S by self-similarity.
            return std::pow(model.scale * h, 1.0 / model.alpha) * standard_positive_stable(model.alpha, rng);
    }
    throw std::logic_error("unknown subordinator family");
}

TimeChangeGrid TimeChangeGrid::from_cumulative(double h, double horizon, std::span<const double> cumulative) {
    if (!(h > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("grid horizon must be positive");
    if (cumulative.empty() || cumulative.front() != 0.0) {
        throw std::invalid_argument("grid nodes must start at zero");
    }
    std::vector<double> tau{0.0};
    for (std::size_t i = 1; i < cumulative.size(); ++i) {
        if (!(cumulative[i] > cumulative[i - 1])) {
            throw std::invalid_argument("grid nodes must be strictly increasing (node " + std::to_string(i) + ")");
        }
        tau.push_back(cumulative[i]);
        if (cumulative[i] > horizon) return TimeChangeGrid(h, horizon, std::move(tau));
    }
    throw std::invalid_argument("grid nodes do not pass the horizon");
}

std::size_t TimeChangeGrid::interval_of(double t) const {
    if (!(t >= 0.0 && t <= horizon_)) {
        throw std::domain_error("time " + std::to_string(t) + " outside [0, T]");
    }
    // min{n : tau_n > t} - 1
    const auto it = std::upper_bound(tau_.begin(), tau_.end(), t);
    return static_cast<std::size_t>(it - tau_.begin()) - 1;
}

double TimeChangeGrid::inverse(double t) const { return static_cast<double>(interval_of(t)) * h_; }

TimeChangeGrid build_time_change_grid(const SubordinatorModel& model, double h, double horizon, RandomStream& rng,
                                      std::size_t max_nodes) {
    model.validate();
    if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("grid step must lie in (0, 1]");
    if (!(horizon > 0.0)) throw std::invalid_argument("grid horizon must be positive");
    std::vector<double> tau{0.0};
    double d = 0.0;
    while (d <= horizon) {
        if (tau.size() >= max_nodes) {
            throw ResourceLimitError("time-change grid exceeded " + std::to_string(max_nodes) + " nodes");
        }
        d += sample_increment(model, h, rng);
        tau.push_back(d);
    }
    return TimeChangeGrid::from_cumulative(h, horizon, tau);
}

}  // namespace tcsde

namespace tcsde {

std::vector<LaplaceCheck> laplace_transform_check(const SubordinatorModel& model, double h,
                                                  std::span<const double> lambdas, std::size_t samples,
                                                  RandomStream& rng) {
    model.validate();
    if (samples < 2) throw std::invalid_argument("at least two samples are required");
    std::vector<double> sum(lambdas.size(), 0.0), sum_sq(lambdas.size(), 0.0);
    for (std::size_t s = 0; s < samples; ++s) {
        const double delta = sample_increment(model, h, rng);
        for (std::size_t l = 0; l < lambdas.size(); ++l) {
            const double v = std::exp(-lambdas[l] * delta);
            sum[l] += v;
            sum_sq[l] += v * v;
        }
    }
    const double n = static_cast<double>(samples);
    std::vector<LaplaceCheck> out;
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const double mean = sum[l] / n;
        const double var = std::max(0.0, (sum_sq[l] - n * mean * mean) / (n - 1.0));
        out.push_back({h, lambdas[l], mean, std::sqrt(var / n), std::exp(-h * model.laplace_exponent(lambdas[l]))});
    }
    return out;
}

}  // namespace tcsde
