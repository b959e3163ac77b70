#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "tcsde/errors.hpp"
#include "tcsde/mc_harness.hpp"
#include "tcsde/problems.hpp"
#include "tcsde/scheme.hpp"

using namespace tcsde;

namespace {

SdeProblem constant_diffusion(double c) {
    SdeProblem p;
    p.name = "constant_diffusion";
    p.dim = 1;
    p.drift = [](double, const Vector&) { return Vector::Zero(1); };
    p.diffusion = [c](double, const Vector&) { return Vector::Constant(1, c); };
    p.diffusion_jacobian = [](double, const Vector&) { return Matrix::Zero(1, 1); };
    p.initial = Vector::Ones(1);
    return p;
}

SdeProblem drift_only() {
    SdeProblem p = example1();
    p.diffusion = [](double, const Vector&) { return Vector::Zero(1); };
    p.diffusion_jacobian = [](double, const Vector&) { return Matrix::Zero(1, 1); };
    return p;
}

SdeProblem zero_problem() {
    SdeProblem p = constant_diffusion(0.0);
    p.initial = Vector::Constant(1, 0.7);
    return p;
}

TruncationConfig wide_truncation() {
    TruncationConfig cfg;
    cfg.mu_coeff = 1e-6;
    cfg.mu_exponent = 1.0;
    return cfg;
}

}  // namespace

TEST(Lg, ConstantDiffusionGivesZero) {
    EXPECT_EQ(lg(constant_diffusion(0.3), 0.2, Vector::Constant(1, 5.0))(0), 0.0);
}

TEST(Lg, Example1) {
    EXPECT_DOUBLE_EQ(lg(example1(), 0.5, Vector::Ones(1))(0), 0.125);
}

TEST(Lg, Example2MatchesHandAndFiniteDifferences) {
    const SdeProblem p = example2();
    const Vector y = Vector::Ones(2);
    const Vector value = lg(p, 0.5, y);
    EXPECT_NEAR(value(0), 0.5, 1e-15);
    EXPECT_NEAR(value(1), 0.5, 1e-15);
    // sum_l g^l dg/dy^l with the derivative taken numerically.
    Vector fd = Vector::Zero(2);
    const Vector g = p.diffusion(0.5, y);
    for (int l = 0; l < 2; ++l) {
        Vector up = y, down = y;
        up(l) += 1e-6;
        down(l) -= 1e-6;
        fd += g(l) * (p.diffusion(0.5, up) - p.diffusion(0.5, down)) / 2e-6;
    }
    EXPECT_TRUE(fd.isApprox(value, 1e-8));
}

TEST(JacobianConsistency, BenchmarkProblems) {
    EXPECT_LT(jacobian_mismatch(example1(), 3.0, 2000, 1), 1e-6);
    EXPECT_LT(jacobian_mismatch(example2(), 3.0, 2000, 2), 1e-6);
    EXPECT_LT(jacobian_mismatch(geometric_brownian_motion(), 3.0, 2000, 3), 1e-6);
}

TEST(JacobianConsistency, DetectsTranscriptionError) {
    SdeProblem p = example1();
    p.diffusion_jacobian = [](double t, const Vector& y) { return Matrix::Constant(1, 1, t * (1 - t) * y(0)); };
    EXPECT_GT(jacobian_mismatch(p, 3.0, 200, 1), 1e-2);
}

TEST(MilsteinStep, HandComputedExample1) {
    const SdeProblem p = example1();
    const TruncationConfig cfg;
    const Vector x = Vector::Constant(1, 0.5);
    const double f = std::pow(0.25, 0.25) * 0.5 - std::pow(0.5, 5);
    EXPECT_NEAR(milstein_step(p, cfg, 0.01, 0.5, x, 0.1)(0), 0.5 + f * 0.01 + 0.0625 * 0.1, 1e-15);
    EXPECT_NEAR(milstein_step(p, cfg, 0.01, 0.5, x, 0.1)(0), 0.509473033905933, 1e-12);
    EXPECT_NEAR(em_step(p, cfg, 0.01, 0.5, x, 0.1)(0), 0.509473033905933, 1e-12);
    EXPECT_NEAR(em_step(p, cfg, 0.01, 0.5, x, 0.2)(0), 0.515723033905933, 1e-12);
    EXPECT_NEAR(milstein_step(p, cfg, 0.01, 0.5, x, 0.2)(0), 0.515957408905933, 1e-12);
}

TEST(MilsteinStep, ZeroDiffusionIsDriftOnlyEuler) {
    const SdeProblem p = drift_only();
    const TruncationConfig cfg;
    const Vector x = Vector::Constant(1, 0.4);
    const Vector expected = x + p.drift(0.3, x) * 0.01;
    EXPECT_EQ(milstein_step(p, cfg, 0.01, 0.3, x, 0.7), expected);
    EXPECT_EQ(em_step(p, cfg, 0.01, 0.3, x, 0.7), expected);
}

TEST(MilsteinStep, ConstantDiffusionAddsNoiseOnly) {
    const SdeProblem p = constant_diffusion(0.3);
    const Vector x = Vector::Constant(1, 0.25);
    EXPECT_EQ(milstein_step(p, TruncationConfig{}, 0.01, 0.2, x, 0.125)(0), 0.25 + 0.3 * 0.125);
}

TEST(MilsteinStep, NonFiniteStateIsAnError) {
    SdeProblem p = constant_diffusion(0.0);
    p.drift = [](double, const Vector&) { return Vector::Constant(1, std::numeric_limits<double>::max()); };
    const Vector x = Vector::Constant(1, std::numeric_limits<double>::max());
    EXPECT_THROW(milstein_step(p, wide_truncation(), 1.0, 0.0, x, 0.0), NumericOverflowError);
}

TEST(MilsteinStep, ReducesToEulerWhenLgVanishes) {
    const SdeProblem p = constant_diffusion(0.8);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 1000; ++i) {
        const double h = std::pow(10.0, -4.0 * unit(rng));
        const Vector x = Vector::Constant(1, normal(rng));
        const double dw = std::sqrt(h) * normal(rng);
        const double tau = unit(rng);
        EXPECT_EQ(milstein_step(p, TruncationConfig{}, h, tau, x, dw), em_step(p, TruncationConfig{}, h, tau, x, dw));
    }
}

TEST(SimulatePath, ZeroCoefficientsKeepInitialValue) {
    const SdeProblem p = zero_problem();
    RandomStream rng(1);
    const auto grid = build_time_change_grid(SubordinatorModel::stable(0.9), 0.01, 1.0, rng);
    const std::vector<double> dw(grid.last_index(), 0.3);
    const Trajectory path = simulate_path(p, TruncationConfig{}, grid, dw);
    ASSERT_EQ(path.size(), grid.last_index() + 1);
    for (std::size_t n = 0; n < path.size(); ++n) EXPECT_EQ(path.state(n)(0), 0.7);
}

TEST(SimulatePath, IncrementCountMustMatch) {
    RandomStream rng(1);
    const auto grid = build_time_change_grid(SubordinatorModel::deterministic(), 0.25, 1.0, rng);
    const std::vector<double> dw(3, 0.0);
    EXPECT_THROW(simulate_path(example1(), TruncationConfig{}, grid, dw), std::invalid_argument);
}

// Textbook Milstein for dX = mu X dt + sigma X dW, coded independently.
TEST(SimulatePath, ClassicalLimitMatchesTextbookMilstein) {
    const double mu = 0.1, sigma = 0.2, h = 1.0 / 64;
    const SdeProblem p = geometric_brownian_motion(mu, sigma);
    const CoupledNoise noise = generate_coupled_noise(SubordinatorModel::deterministic(), h, 1.0, 5, 0);
    const auto grid = grid_from_noise(noise, 1.0);
    ASSERT_EQ(grid.last_index(), 64u);
    const auto dw = wiener_increments(noise, 64);
    const Trajectory path = simulate_path(p, wide_truncation(), grid, dw);
    double x = 1.0;
    for (std::size_t n = 0; n < 64; ++n) {
        x = x + mu * x * h + sigma * x * dw[n] + 0.5 * sigma * sigma * x * (dw[n] * dw[n] - h);
        EXPECT_NEAR(path.state(n + 1)(0), x, 1e-14 * std::abs(x));
    }
}

TEST(SimulatePath, Example1ReproducibleAndFinite) {
    const auto run = [] {
        const CoupledNoise noise = generate_coupled_noise(SubordinatorModel::stable(0.9), 0.1, 1.0, 77, 3);
        const auto grid = grid_from_noise(noise, 1.0);
        return simulate_path(example1(), TruncationConfig{}, grid, wiener_increments(noise, grid.last_index()));
    };
    const Trajectory a = run();
    const Trajectory b = run();
    EXPECT_TRUE(a.states.allFinite());
    EXPECT_EQ(a.states, b.states);
    EXPECT_EQ(a.states(0, 0), 1.0);
}

TEST(SimulatePath, TruncationIsLocal) {
    // With the state confined to the ball, a wider radius changes nothing.
    SdeProblem p = example1();
    p.initial = Vector::Constant(1, 0.2);
    const CoupledNoise noise = generate_coupled_noise(SubordinatorModel::stable(0.9), 0.01, 1.0, 3, 0);
    const auto grid = grid_from_noise(noise, 1.0);
    const auto dw = wiener_increments(noise, grid.last_index());
    const TruncationConfig tight;
    const Trajectory truncated = simulate_path(p, tight, grid, dw);
    ASSERT_LE(truncated.states.cwiseAbs().maxCoeff(), truncation_radius(tight, 0.01));
    EXPECT_EQ(truncated.states, simulate_path(p, wide_truncation(), grid, dw).states);
}
