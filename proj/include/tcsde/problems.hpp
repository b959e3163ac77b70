#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "tcsde/problem.hpp"

namespace tcsde {

// Benchmark problems.

/// Scalar problem with drift [t(1-t)]^{1/4} y - y^5 and diffusion t(1-t) y^2, Y0 = 1, T = 1.
SdeProblem example1();

/// Two-dimensional cross-coupled problem with drift
/// ([t(1-t)]^{1/5} x1 - x2^5, [t(1-t)]^{1/5} x2 - x1^5) and diffusion
/// ([t(1-t)]^{1/2} x2^2, [t(1-t)]^{1/2} x1^2), Y0 = (1, 1), T = 1.
SdeProblem example2();

/// dY = mu Y dE + sigma Y dW(E).
SdeProblem geometric_brownian_motion(double mu = 0.1, double sigma = 0.2, double y0 = 1.0, double horizon = 1.0);

/// Y0 exp((mu - sigma^2 / 2) e + sigma w), the solution at internal time e with W(e) = w.
double gbm_exact(double mu, double sigma, double y0, double internal_time, double wiener_value);

/// f(t, y) = -y, g = 0.
SdeProblem linear_contraction();

/// f(t, y) = +y^5, g = 0. Fails the one-sided Lipschitz condition.
SdeProblem quintic_growth();

/// Looks up a problem by CLI name: example1, example2, gbm.
SdeProblem problem_by_name(std::string_view name);

// Sampling diagnostics for the structural conditions on f and g.

enum class Assumption : std::size_t {
    LocalLipschitz = 0,     // |df| v |dg| v |dLg| <= C (1 + |x|^a + |y|^a) |x - y|
    OneSidedLipschitz = 1,  // (x-y).(f(x)-f(y)) + (5p-1)|g(x)-g(y)|^2 <= K |x-y|^2
    Coercivity = 2,         // x.f(x) + (5q-1)|g(x)|^2 <= K1 (1 + |x|^2)
    DerivativeGrowth = 3,   // first/second derivatives of f, g <= M' (1 + |x|^{a+1})
    TemporalHolder = 4,     // |f(s,x)-f(t,x)| <= H1 (1 + |x|^{a+1}) |s-t|^gamma_f, same for g
};

inline constexpr std::size_t kAssumptionCount = 5;

std::string_view assumption_name(Assumption a);

using CandidateConstants = std::array<double, kAssumptionCount>;

struct SamplingSpec {
    double radius = 3.0;
    std::size_t samples = 100'000;
    double p = 3.0;
    double q = 3.0;
    std::uint64_t seed = 42;
    CandidateConstants candidates{};
};

struct Witness {
    double t = 0.0;
    double s = 0.0;
    Vector x;
    Vector y;
};

/// Falsification by sampling: `violated == false` means "not violated on the sample", never "holds".
struct AssumptionReport {
    Assumption id{};
    std::size_t samples = 0;
    double worst_ratio = -std::numeric_limits<double>::infinity();
    double fitted_constant = 0.0;  // smallest nonnegative constant consistent with the sample
    double candidate = 0.0;
    bool violated = false;
    Witness witness;
};

/// Draws random (t, s, x, y) in [0, T]^2 x [-radius, radius]^{2d}, evaluates
/// every defining ratio and compares the worst case with the candidate.
/// Sample i depends only on (seed, i), so a larger sample count is a superset.
std::vector<AssumptionReport> check_assumptions(const SdeProblem& problem, const SamplingSpec& spec);

/// Candidates equal to `safety` times the worst ratio seen on an independent
/// sample of the same box (seed derived from spec.seed).
CandidateConstants fit_candidates(const SdeProblem& problem, const SamplingSpec& spec, double safety = 2.0);

}  // namespace tcsde
