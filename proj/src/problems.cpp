#include "tcsde/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "tcsde/random.hpp"
#include "tcsde/scheme.hpp"

namespace tcsde {

namespace {

double time_weight(double t) { return std::max(0.0, t * (1.0 - t)); }

}  // namespace

SdeProblem example1() {
    SdeProblem p;
    p.name = "example1";
    p.dim = 1;
    p.drift = [](double t, const Vector& y) {
        const double v = y(0);
        return Vector::Constant(1, std::pow(time_weight(t), 0.25) * v - std::pow(v, 5));
    };
    p.diffusion = [](double t, const Vector& y) { return Vector::Constant(1, time_weight(t) * y(0) * y(0)); };
    p.diffusion_jacobian = [](double t, const Vector& y) {
        return Matrix::Constant(1, 1, 2.0 * time_weight(t) * y(0));
    };
    p.initial = Vector::Ones(1);
    p.alpha = 4.0;
    p.gamma_f = 0.25;
    p.gamma_g = 1.0;
    p.horizon = 1.0;
    return p;
}

SdeProblem example2() {
    SdeProblem p;
    p.name = "example2";
    p.dim = 2;
    p.drift = [](double t, const Vector& x) {
        const double c = std::pow(time_weight(t), 0.2);
        Vector out(2);
        out << c * x(0) - std::pow(x(1), 5), c * x(1) - std::pow(x(0), 5);
        return out;
    };
    p.diffusion = [](double t, const Vector& x) {
        const double c = std::sqrt(time_weight(t));
        Vector out(2);
        out << c * x(1) * x(1), c * x(0) * x(0);
        return out;
    };
    p.diffusion_jacobian = [](double t, const Vector& x) {
        const double c = std::sqrt(time_weight(t));
        Matrix j(2, 2);
        j << 0.0, 2.0 * c * x(1),
             2.0 * c * x(0), 0.0;
        return j;
    };
    p.initial = Vector::Ones(2);
    p.alpha = 4.0;
    p.gamma_f = 0.2;
    p.gamma_g = 0.5;
    p.horizon = 1.0;
    return p;
}

SdeProblem geometric_brownian_motion(double mu, double sigma, double y0, double horizon) {
    SdeProblem p;
    p.name = "gbm";
    p.dim = 1;
    p.drift = [mu](double, const Vector& y) { return Vector(mu * y); };
    p.diffusion = [sigma](double, const Vector& y) { return Vector(sigma * y); };
    p.diffusion_jacobian = [sigma](double, const Vector&) { return Matrix::Constant(1, 1, sigma); };
    p.initial = Vector::Constant(1, y0);
    p.alpha = 0.0;
    p.gamma_f = 1.0;
    p.gamma_g = 1.0;
    p.horizon = horizon;
    return p;
}

double gbm_exact(double mu, double sigma, double y0, double internal_time, double wiener_value) {
    return y0 * std::exp((mu - 0.5 * sigma * sigma) * internal_time + sigma * wiener_value);
}

SdeProblem linear_contraction() {
    SdeProblem p;
    p.name = "linear_contraction";
    p.dim = 1;
    p.drift = [](double, const Vector& y) { return Vector(-y); };
    p.diffusion = [](double, const Vector&) { return Vector::Zero(1); };
    p.diffusion_jacobian = [](double, const Vector&) { return Matrix::Zero(1, 1); };
    p.initial = Vector::Ones(1);
    p.alpha = 1.0;
    return p;
}

SdeProblem quintic_growth() {
    SdeProblem p;
    p.name = "quintic_growth";
    p.dim = 1;
    p.drift = [](double, const Vector& y) { return Vector::Constant(1, std::pow(y(0), 5)); };
    p.diffusion = [](double, const Vector&) { return Vector::Zero(1); };
    p.diffusion_jacobian = [](double, const Vector&) { return Matrix::Zero(1, 1); };
    p.initial = Vector::Ones(1);
    p.alpha = 4.0;
    return p;
}

SdeProblem problem_by_name(std::string_view name) {
    if (name == "example1") return example1();
    if (name == "example2") return example2();
    if (name == "gbm") return geometric_brownian_motion();
    throw std::invalid_argument("unknown problem '" + std::string(name) + "' (expected example1, example2 or gbm)");
}

std::string_view assumption_name(Assumption a) {
    switch (a) {
        case Assumption::LocalLipschitz: return "local_lipschitz";
        case Assumption::OneSidedLipschitz: return "one_sided_lipschitz";
        case Assumption::Coercivity: return "coercivity";
        case Assumption::DerivativeGrowth: return "derivative_growth";
        case Assumption::TemporalHolder: return "temporal_holder";
    }
    return "unknown";
}

namespace {

struct Sample {
    double t;
    double s;
    Vector x;
    Vector y;
};

Sample draw_sample(const SdeProblem& problem, double radius, std::uint64_t seed, std::size_t index) {
    RandomStream rng = make_stream(seed, index, StreamLane::Sampling);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> coord(-radius, radius);
    Sample smp{problem.horizon * unit(rng), problem.horizon * unit(rng), Vector(problem.dim), Vector(problem.dim)};
    for (Eigen::Index i = 0; i < problem.dim; ++i) smp.x(i) = coord(rng);
    if (unit(rng) < 0.5) {
        for (Eigen::Index i = 0; i < problem.dim; ++i) smp.y(i) = coord(rng);
    } else {
        // Near-diagonal pair: ratios over |x - y| peak as y -> x.
        const double scale = radius * std::pow(10.0, -4.0 * unit(rng));
        for (Eigen::Index i = 0; i < problem.dim; ++i) {
            smp.y(i) = std::clamp(smp.x(i) + scale * (2.0 * unit(rng) - 1.0), -radius, radius);
        }
    }
    return smp;
}

// Frobenius norm of the central-difference Jacobian of `field` at x.
Matrix fd_jacobian(const SdeProblem::Field& field, double t, const Vector& x, double step) {
    Matrix jac(x.size(), x.size());
    for (Eigen::Index l = 0; l < x.size(); ++l) {
        Vector up = x, down = x;
        up(l) += step;
        down(l) -= step;
        jac.col(l) = (field(t, up) - field(t, down)) / (2.0 * step);
    }
    return jac;
}

double fd_second_derivative_norm(const SdeProblem::Field& field, double t, const Vector& x, double step) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        Vector up = x, down = x;
        up(k) += step;
        down(k) -= step;
        sum += ((fd_jacobian(field, t, up, step) - fd_jacobian(field, t, down, step)) / (2.0 * step)).squaredNorm();
    }
    return std::sqrt(sum);
}

}  // namespace

std::vector<AssumptionReport> check_assumptions(const SdeProblem& problem, const SamplingSpec& spec) {
    if (!(spec.radius > 0.0)) throw std::invalid_argument("sampling box radius must be positive");
    if (spec.samples < 1000) throw std::invalid_argument("at least 1000 samples are required");
    if (!(spec.p > 2.0) || !(spec.q > 2.0)) throw std::invalid_argument("p and q must exceed 2");

    std::vector<AssumptionReport> reports(kAssumptionCount);
    for (std::size_t a = 0; a < kAssumptionCount; ++a) {
        reports[a].id = static_cast<Assumption>(a);
        reports[a].samples = spec.samples;
        reports[a].candidate = spec.candidates[a];
    }
    auto record = [&](Assumption a, double ratio, const Sample& smp) {
        AssumptionReport& r = reports[static_cast<std::size_t>(a)];
        if (std::isfinite(ratio) && ratio > r.worst_ratio) {
            r.worst_ratio = ratio;
            r.witness = Witness{smp.t, smp.s, smp.x, smp.y};
        }
    };

    const double alpha = problem.alpha;
    for (std::size_t i = 0; i < spec.samples; ++i) {
        const Sample smp = draw_sample(problem, spec.radius, spec.seed, i);
        const double t = smp.t;
        const Vector& x = smp.x;
        const Vector& y = smp.y;
        const double nx = x.norm();
        const double ny = y.norm();

        const Vector fx = problem.drift(t, x);
        const Vector gx = problem.diffusion(t, x);
        const double dist = (x - y).norm();
        if (dist > 0.0) {
            const Vector df = fx - problem.drift(t, y);
            const Vector dg = gx - problem.diffusion(t, y);
            const Vector dlg = lg(problem, t, x) - lg(problem, t, y);
            const double lip = std::max({df.norm(), dg.norm(), dlg.norm()}) /
                               ((1.0 + std::pow(nx, alpha) + std::pow(ny, alpha)) * dist);
            record(Assumption::LocalLipschitz, lip, smp);

            const double mono = ((x - y).dot(df) + (5.0 * spec.p - 1.0) * dg.squaredNorm()) / (dist * dist);
            record(Assumption::OneSidedLipschitz, mono, smp);
        }

        record(Assumption::Coercivity, (x.dot(fx) + (5.0 * spec.q - 1.0) * gx.squaredNorm()) / (1.0 + nx * nx), smp);

        const double growth = 1.0 + std::pow(nx, alpha + 1.0);
        const double step = 1e-4 * (1.0 + nx);
        const double deriv = std::max({fd_jacobian(problem.drift, t, x, step).norm(),
                                       fd_second_derivative_norm(problem.drift, t, x, step),
                                       fd_jacobian(problem.diffusion, t, x, step).norm(),
                                       fd_second_derivative_norm(problem.diffusion, t, x, step)});
        record(Assumption::DerivativeGrowth, deriv / growth, smp);

        const double gap = std::abs(smp.s - t);
        if (gap > 0.0) {
            const double hf = (problem.drift(smp.s, x) - fx).norm() / (growth * std::pow(gap, problem.gamma_f));
            const double hg = (problem.diffusion(smp.s, x) - gx).norm() / (growth * std::pow(gap, problem.gamma_g));
            record(Assumption::TemporalHolder, std::max(hf, hg), smp);
        }
    }

    for (AssumptionReport& r : reports) {
        r.fitted_constant = std::max(0.0, r.worst_ratio);
        r.violated = r.worst_ratio > r.candidate;
    }
    return reports;
}

CandidateConstants fit_candidates(const SdeProblem& problem, const SamplingSpec& spec, double safety) {
    if (!(safety >= 1.0)) throw std::invalid_argument("safety factor must be at least 1");
    SamplingSpec fit = spec;
    fit.seed = splitmix64(spec.seed ^ 0xf17c0ffeeULL);
    fit.candidates.fill(std::numeric_limits<double>::infinity());
    CandidateConstants out{};
    const auto reports = check_assumptions(problem, fit);
    for (std::size_t a = 0; a < kAssumptionCount; ++a) out[a] = safety * reports[a].fitted_constant;
    return out;
}

}  // namespace tcsde
