#pragma once

#include <Eigen/Dense>

#include "tcsde/problem.hpp"

namespace tcsde {

/// Growth bound mu(u) = mu_coeff * u^mu_exponent and schedule kappa(h) = h^-epsilon.
struct TruncationConfig {
    double mu_coeff = 2.0;
    double mu_exponent = 5.0;
    double epsilon = 0.02;
    /// Clamp kappa from below at mu(1).
    bool kappa_floor = false;

    /// Throws std::invalid_argument on non-positive mu parameters or epsilon outside (0, 1/4].
    void validate() const;

    double mu(double u) const;
    double mu_inverse(double v) const;
    double kappa(double h) const;
    /// Bound on h^(1/4) kappa(h) over (0, 1].
    double kappa_hat() const;
};

/// mu^{-1}(kappa(h)). Throws std::domain_error for h outside (0, 1].
double truncation_radius(const TruncationConfig& cfg, double h);

/// Radial projection onto the closed ball of the given radius; zero maps to zero.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime, 1>
project(const Eigen::MatrixBase<Derived>& x, typename Derived::Scalar radius) {
    using Result = Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime, 1>;
    const auto norm = x.norm();
    if (norm <= radius) return Result(x);
    return Result(x * (radius / norm));
}

struct TruncatedCoefficients {
    Vector drift;
    Vector diffusion;
    Matrix diffusion_jacobian;
    Vector lg;
};

/// Coefficients evaluated at an already projected state.
TruncatedCoefficients coefficients_at(const SdeProblem& problem, double t, const Vector& projected);

/// f_h, g_h, G_h^l and Lg_h at (t, x) for step size h.
TruncatedCoefficients truncated_coefficients(const SdeProblem& problem, const TruncationConfig& cfg, double h,
                                             double t, const Vector& x);

}  // namespace tcsde
