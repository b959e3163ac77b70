#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "tcsde/problems.hpp"
#include "tcsde/truncation.hpp"

using namespace tcsde;

TEST(TruncationConfig, EpsilonRange) {
    TruncationConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.epsilon = 0.3;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.epsilon = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.epsilon = 0.25;
    EXPECT_NO_THROW(cfg.validate());
}

// Closed form (h^-eps / 2)^(1/5), evaluated with mpmath to 30 digits.
TEST(TruncationRadius, QuinticGrowthBound) {
    const TruncationConfig cfg;
    EXPECT_NEAR(truncation_radius(cfg, 0.1), 0.878605668482297, 1e-12);
    EXPECT_NEAR(truncation_radius(cfg, 0.01), 0.886735306639092, 1e-12);
}

TEST(TruncationRadius, FloorClampsAtUnitRadius) {
    TruncationConfig cfg;
    cfg.kappa_floor = true;
    EXPECT_DOUBLE_EQ(truncation_radius(cfg, 1.0), 1.0);
    cfg.kappa_floor = false;
    EXPECT_LT(truncation_radius(cfg, 1.0), 1.0);
}

TEST(TruncationRadius, DomainIsUnitInterval) {
    const TruncationConfig cfg;
    EXPECT_THROW(truncation_radius(cfg, 0.0), std::domain_error);
    EXPECT_THROW(truncation_radius(cfg, 1.5), std::domain_error);
}

TEST(TruncationConfig, KappaDecreasingAndBoundedByKappaHat) {
    for (bool floor : {false, true}) {
        TruncationConfig cfg;
        cfg.kappa_floor = floor;
        double previous = INFINITY;
        for (int i = 1; i <= 1000; ++i) {
            const double h = std::pow(10.0, -8.0 + 8.0 * i / 1000.0);
            const double k = cfg.kappa(h);
            EXPECT_LE(k, previous);
            if (!floor) EXPECT_LT(k, previous);
            previous = k;
            EXPECT_LE(std::pow(h, 0.25) * k, cfg.kappa_hat() * (1 + 1e-15));
        }
    }
}

TEST(Project, InsideBallUnchanged) {
    Eigen::Vector2d x(0.3, -0.4);
    EXPECT_EQ(project(x, 1.0), x);
}

TEST(Project, ZeroStaysZero) {
    EXPECT_EQ(project(Eigen::Vector3d::Zero(), 0.5), Eigen::Vector3d::Zero());
}

TEST(Project, OutsideBallScaled) {
    const Eigen::Vector2d p = project(Eigen::Vector2d(3.0, 4.0), 1.0);
    EXPECT_DOUBLE_EQ(p(0), 0.6);
    EXPECT_DOUBLE_EQ(p(1), 0.8);
}

TEST(Project, IdempotentNormClampingDirectionPreserving) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal(0.0, 2.0);
    std::uniform_real_distribution<double> radius_dist(0.1, 4.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const Eigen::Index d = 1 + trial % 5;
        Vector x(d);
        for (Eigen::Index i = 0; i < d; ++i) x(i) = normal(rng);
        const double r = radius_dist(rng);
        const Vector p = project(x, r);
        EXPECT_TRUE(project(p, r).isApprox(p, 1e-15));
        EXPECT_NEAR(p.norm(), std::min(x.norm(), r), 1e-12);
        const double scale = p.dot(x) / x.squaredNorm();
        EXPECT_GT(scale, 0.0);
        EXPECT_LE(scale, 1.0 + 1e-15);
        EXPECT_TRUE(p.isApprox(scale * x, 1e-12));
    }
}

TEST(TruncatedCoefficients, InactiveProjectionGivesRawValues) {
    const SdeProblem p = example1();
    const auto c = truncated_coefficients(p, TruncationConfig{}, 0.01, 0.5, Vector::Constant(1, 0.5));
    EXPECT_NEAR(c.drift(0), 0.322303390593274, 1e-13);
    EXPECT_DOUBLE_EQ(c.diffusion(0), 0.0625);
    EXPECT_DOUBLE_EQ(c.lg(0), 0.015625);
}

TEST(TruncatedCoefficients, ZeroFixedPoint) {
    const SdeProblem p = example1();
    const auto c = truncated_coefficients(p, TruncationConfig{}, 0.01, 0.3, Vector::Zero(1));
    EXPECT_EQ(c.drift(0), 0.0);
    EXPECT_EQ(c.diffusion(0), 0.0);
    EXPECT_EQ(c.lg(0), 0.0);
}

TEST(TruncatedCoefficients, LargeStateEvaluatedAtRadius) {
    const SdeProblem p = example1();
    const TruncationConfig cfg;
    const auto c = truncated_coefficients(p, cfg, 0.01, 0.5, Vector::Constant(1, 2.0));
    // Composition of the public operations.
    const Vector at_radius = project(Vector::Constant(1, 2.0), truncation_radius(cfg, 0.01));
    EXPECT_EQ(c.drift, p.drift(0.5, at_radius));
    EXPECT_EQ(c.diffusion, p.diffusion(0.5, at_radius));
    // Independent values at r = 0.886735306639092.
    EXPECT_NEAR(c.drift(0), 0.0787774503704424, 1e-12);
    EXPECT_NEAR(c.diffusion(0), 0.196574876010081, 1e-12);
    EXPECT_NEAR(c.diffusion_jacobian(0, 0), 0.443367653319546, 1e-12);
}

TEST(TruncatedCoefficients, BoundedByKappa) {
    const SdeProblem p = example1();
    const TruncationConfig cfg;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 10'000; ++i) {
        const double h = std::pow(10.0, -6.0 * unit(rng));
        const double t = unit(rng);
        const Vector x = Vector::Constant(1, 20.0 * (unit(rng) - 0.5));
        const auto c = truncated_coefficients(p, cfg, h, t, x);
        const double k = cfg.kappa(h);
        EXPECT_LE(c.drift.norm(), k);
        EXPECT_LE(c.diffusion.norm(), k);
        EXPECT_LE(c.diffusion_jacobian.col(0).norm(), k);
    }
}

TEST(TruncatedCoefficients, AgreeWithRawInsideRadius) {
    const SdeProblem p = example2();
    const TruncationConfig cfg;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> coord(-0.6, 0.6);
    for (int i = 0; i < 500; ++i) {
        const Vector x = Vector::NullaryExpr(2, [&] { return coord(rng); });
        if (x.norm() > truncation_radius(cfg, 0.001)) continue;
        const auto c = truncated_coefficients(p, cfg, 0.001, 0.4, x);
        EXPECT_EQ(c.drift, p.drift(0.4, x));
        EXPECT_EQ(c.diffusion, p.diffusion(0.4, x));
    }
}
