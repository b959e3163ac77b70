#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace tcsde {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// dY = f(t, Y) dE(t) + g(t, Y) dW(E(t)) with a single driving Wiener process.
///
/// `diffusion_jacobian` returns the d x d matrix whose column l is
/// G^l = d g / d y^l, so that Lg = G g.
struct SdeProblem {
    using Field = std::function<Vector(double, const Vector&)>;
    using JacobianField = std::function<Matrix(double, const Vector&)>;

    std::string name;
    Eigen::Index dim = 1;
    Field drift;
    Field diffusion;
    JacobianField diffusion_jacobian;
    Vector initial;
    double alpha = 1.0;    // polynomial growth exponent
    double gamma_f = 1.0;  // temporal Holder exponent of the drift
    double gamma_g = 1.0;  // temporal Holder exponent of the diffusion
    double horizon = 1.0;
};

}  // namespace tcsde
