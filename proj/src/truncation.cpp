#include "tcsde/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tcsde {

void TruncationConfig::validate() const {
    if (!(mu_coeff > 0.0) || !std::isfinite(mu_coeff)) throw std::invalid_argument("mu coefficient must be positive");
    if (!(mu_exponent > 0.0) || !std::isfinite(mu_exponent)) {
        throw std::invalid_argument("mu exponent must be positive");
    }
    if (!(epsilon > 0.0 && epsilon <= 0.25)) throw std::invalid_argument("epsilon must lie in (0, 1/4]");
}

double TruncationConfig::mu(double u) const { return mu_coeff * std::pow(u, mu_exponent); }

double TruncationConfig::mu_inverse(double v) const { return std::pow(v / mu_coeff, 1.0 / mu_exponent); }

double TruncationConfig::kappa(double h) const {
    const double k = std::pow(h, -epsilon);
    return kappa_floor ? std::max(mu(1.0), k) : k;
}

double TruncationConfig::kappa_hat() const { return std::max(1.0, mu(1.0)); }

double truncation_radius(const TruncationConfig& cfg, double h) {
    if (!(h > 0.0 && h <= 1.0)) throw std::domain_error("step size must lie in (0, 1]");
    return cfg.mu_inverse(cfg.kappa(h));
}

TruncatedCoefficients coefficients_at(const SdeProblem& problem, double t, const Vector& projected) {
    TruncatedCoefficients c;
    c.drift = problem.drift(t, projected);
    c.diffusion = problem.diffusion(t, projected);
    c.diffusion_jacobian = problem.diffusion_jacobian(t, projected);
    c.lg = c.diffusion_jacobian * c.diffusion;
    return c;
}

TruncatedCoefficients truncated_coefficients(const SdeProblem& problem, const TruncationConfig& cfg, double h,
                                             double t, const Vector& x) {
    return coefficients_at(problem, t, project(x, truncation_radius(cfg, h)));
}

}  // namespace tcsde
