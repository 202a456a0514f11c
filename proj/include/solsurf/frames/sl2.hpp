#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "solsurf/error.hpp"

namespace solsurf {

using Mat2 = Eigen::Matrix2d;

/// Factors of X = L(alpha, beta) R(gamma) with L = [[alpha, 0], [beta, 1/alpha]]
/// lower triangular and R = [[cos g, sin g], [-sin g, cos g]].
struct Sl2Factors {
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 0.0;  ///< in (-pi, pi]

    Mat2 lower() const {
        Mat2 l;
        l << alpha, 0.0, beta, 1.0 / alpha;
        return l;
    }
    Mat2 rotation() const {
        Mat2 r;
        r << std::cos(gamma), std::sin(gamma), -std::sin(gamma), std::cos(gamma);
        return r;
    }
    Mat2 product() const { return lower() * rotation(); }
};

/// Decomposes a real det-1 matrix. alpha is the length of the first row and
/// gamma its angle; beta comes from whichever of the two quotient formulas has
/// the larger denominator:
///   beta = x22 alpha/x12 - x11/(x12 alpha)   (x12 != 0)
///   beta = x21 alpha/x11 + x12/(x11 alpha)   (x11 != 0)
inline Sl2Factors sl2_decompose(const Mat2& X, double det_tol = 1e-10) {
    require(std::abs(X.determinant() - 1.0) <= det_tol, "sl2_decompose: det X != 1");
    const double x11 = X(0, 0), x12 = X(0, 1), x21 = X(1, 0), x22 = X(1, 1);
    Sl2Factors f;
    f.alpha = std::hypot(x11, x12);
    require(f.alpha > 0.0, "sl2_decompose: first row vanishes");
    f.gamma = std::atan2(x12, x11);
    if (f.gamma == -M_PI) f.gamma = M_PI;
    if (std::abs(x12) >= std::abs(x11)) f.beta = x22 * f.alpha / x12 - x11 / (x12 * f.alpha);
    else f.beta = x21 * f.alpha / x11 + x12 / (x11 * f.alpha);
    return f;
}

}  // namespace solsurf
