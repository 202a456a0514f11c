#pragma once

#include <cmath>
#include <string>

#include "solsurf/frames/zero_curvature.hpp"
#include "solsurf/numerics/diff.hpp"
#include "solsurf/numerics/report.hpp"

namespace solsurf {

/// Real-plane grid read as (x, t): x along u, t along v.
enum class Signature { so3, so21 };

/// Given entries of a 3x3 Lax pair Phi_t = U Phi, Phi_x = V Phi in so(3) or
/// so(2,1); u23 and v23 are derived.
struct So3Coefficients {
    RealField u12, u13, v12, v13;
};

struct GaussReduction {
    RealField u23, v23;
    RealField det;       ///< u12 v13 - u13 v12
    RealField gauss;     ///< signed residual of the reduced second-order equation
    Mask evaluated;      ///< nodes with |det| above threshold
    ResidualReport report;
};

/// Builds U and V (as per-node 3x3 matrices) for the given signature.
inline Mat3 so_matrix(double a12, double a13, double a23, Signature s) {
    Mat3 m = Mat3::Zero();
    m(0, 1) = a12;
    m(0, 2) = a13;
    m(1, 2) = a23;
    m(2, 1) = -a23;
    const double sg = s == Signature::so3 ? -1.0 : 1.0;
    m(1, 0) = sg * a12;
    m(2, 0) = sg * a13;
    return m;
}

/// Solves the first two compatibility equations for u23, v23 and substitutes
/// them into the third:
///   u23 = [(v12_t - u12_x) u12 + (v13_t - u13_x) u13] / D,
///   v23 = [(v13_t - u13_x) v13 + (v12_t - u12_x) v12] / D,
///   gauss = u23_x - v23_t + s (u13 v12 - u12 v13), D = u12 v13 - u13 v12,
/// with s = +1 for so(3) and -1 for so(2,1). Also reports the three first-order
/// component residuals and the matrix zero-curvature residual of (U, V).
/// Entries: "gauss", "component_1", "component_2", "component_3", "zero_curvature".
inline GaussReduction so3_gauss_residual(const So3Coefficients& c, Signature sig, Order order = Order::second,
                                         double tol = 1e-4, int margin = 2, double min_det = 1e-10) {
    const Grid2& g = c.u12.grid;
    for (const RealField* f : {&c.u13, &c.v12, &c.v13}) check_same_grid(g, f->grid);
    const double s = sig == Signature::so3 ? 1.0 : -1.0;
    const RealField u12x = diff(c.u12, Dir::u, order), u13x = diff(c.u13, Dir::u, order);
    const RealField v12t = diff(c.v12, Dir::v, order), v13t = diff(c.v13, Dir::v, order);
    GaussReduction r{RealField(g), RealField(g), RealField(g), RealField(g), Mask(g, 1), {}};
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double D = c.u12[k] * c.v13[k] - c.u13[k] * c.v12[k];
        r.det[k] = D;
        if (!(std::abs(D) > min_det)) {
            r.evaluated[k] = 0;
            r.u23[k] = r.v23[k] = 0.0;
            continue;
        }
        const double a = v12t[k] - u12x[k], b = v13t[k] - u13x[k];
        r.u23[k] = (a * c.u12[k] + b * c.u13[k]) / D;
        r.v23[k] = (b * c.v13[k] + a * c.v12[k]) / D;
    }
    const RealField u23x = diff(r.u23, Dir::u, order), v23t = diff(r.v23, Dir::v, order);
    RealField c1(g), c2(g), c3(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double cross = c.u13[k] * c.v12[k] - c.u12[k] * c.v13[k];
        r.gauss[k] = u23x[k] - v23t[k] + s * cross;
        // first two component equations share their form in both signatures
        c1[k] = std::abs(u12x[k] - v12t[k] + r.u23[k] * c.v13[k] - c.u13[k] * r.v23[k]);
        c2[k] = std::abs(u13x[k] - v13t[k] + c.u12[k] * r.v23[k] - r.u23[k] * c.v12[k]);
        c3[k] = std::abs(r.gauss[k]);
    }
    Mask m = mask_and(erode(r.evaluated, 2 * stencil_radius(static_cast<int>(order))), interior_mask(g, margin));
    r.report.add(measure("gauss", c3, &m, tol));
    r.report.add(measure("component_1", c1, &m, tol));
    r.report.add(measure("component_2", c2, &m, tol));
    r.report.add(measure("component_3", c3, &m, tol));
    const AlgebraTag tag = sig == Signature::so3 ? AlgebraTag::so3 : AlgebraTag::so21;
    MatrixField3 U(g, tag), V(g, tag);
    for (std::size_t k = 0; k < g.size(); ++k) {
        U[k] = so_matrix(c.u12[k], c.u13[k], r.u23[k], sig);
        V[k] = so_matrix(c.v12[k], c.v13[k], r.v23[k], sig);
    }
    U.validate();
    V.validate();
    auto zc = zero_curvature_residual(U, V, Orientation::tx, order, tol, &m);
    r.report.merge(zc.report);
    return r;
}

/// The three quadratic forms of the Darboux-frame construction as symmetric
/// 2x2 matrices in the (dt, dx) basis: I = w1^2 + w2^2, II = w1 w13 + w2 w23,
/// III = w13^2 + w23^2 with w1 = w13 = u12 dt + v12 dx, w2 = w23 = u13 dt + v13 dx.
struct FrameForms {
    Field<Eigen::Matrix2d> I, II, III;
};

inline FrameForms so3_frame_forms(const So3Coefficients& c) {
    const Grid2& g = c.u12.grid;
    FrameForms f{Field<Eigen::Matrix2d>(g), Field<Eigen::Matrix2d>(g), Field<Eigen::Matrix2d>(g)};
    auto sym = [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) -> Eigen::Matrix2d {
        return 0.5 * (a * b.transpose() + b * a.transpose());
    };
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Eigen::Vector2d w1(c.u12[k], c.v12[k]), w2(c.u13[k], c.v13[k]);
        const Eigen::Vector2d w13 = w1, w23 = w2;
        f.I[k] = sym(w1, w1) + sym(w2, w2);
        f.II[k] = sym(w1, w13) + sym(w2, w23);
        f.III[k] = sym(w13, w13) + sym(w23, w23);
    }
    return f;
}

/// Residual of the rank-one conservation law u23_x - (sigma u23)_t.
inline ResidualReport rank1_conservation_residual(const RealField& u23, const RealField& sigma,
                                                  Order order = Order::second, double tol = 1e-5,
                                                  RealField* signed_out = nullptr) {
    check_same_grid(u23.grid, sigma.grid);
    const RealField su = map([](double a, double b) { return a * b; }, sigma, u23);
    const RealField r = map([](double a, double b) { return a - b; }, diff(u23, Dir::u, order), diff(su, Dir::v, order));
    if (signed_out) *signed_out = r;
    ResidualReport rep;
    rep.add(measure("conservation", map([](double x) { return std::abs(x); }, r), nullptr, tol));
    return rep;
}

/// Coefficients of the worked examples; phi sampled on the (x, t) grid.
enum class ReductionExample { trig, hyperbolic, exponential, cubic };

inline So3Coefficients reduction_coefficients(const RealField& phi, ReductionExample ex, Order order = Order::second) {
    const Grid2& g = phi.grid;
    So3Coefficients c{RealField(g, 0.0), RealField(g, 0.0), RealField(g, 0.0), RealField(g, 0.0)};
    switch (ex) {
        case ReductionExample::trig:
            c.u12 = map([](double p) { return std::cos(0.5 * p); }, phi);
            c.v13 = map([](double p) { return std::sin(0.5 * p); }, phi);
            break;
        case ReductionExample::hyperbolic:
            c.u12 = map([](double p) { return std::cosh(0.5 * p); }, phi);
            c.v13 = map([](double p) { return std::sinh(0.5 * p); }, phi);
            break;
        case ReductionExample::exponential:
            c.u12 = map([](double p) { return std::exp(p); }, phi);
            c.v13 = c.u12;
            break;
        case ReductionExample::cubic:
            // u12 = phi_t with the squared entry placed in v13 so the rank
            // condition can hold
            c.u12 = diff(phi, Dir::v, order);
            c.v13 = map([](double p) { return p * p; }, phi);
            break;
    }
    return c;
}

/// Signed residual of the scalar equation each example reduces to:
/// so(3):   trig  phi_tt - phi_xx + sin phi,  hyperbolic  phi_tt + phi_xx + sinh phi,
///          exponential  phi_tt + phi_xx + e^{2 phi};
/// so(2,1): trig  phi_tt - phi_xx - sin phi,  hyperbolic  phi_tt + phi_xx - sinh phi,
///          exponential  phi_tt + phi_xx - e^{2 phi}.
inline RealField reduction_pde_residual(const RealField& phi, ReductionExample ex, Signature sig,
                                        Order order = Order::second) {
    require(ex != ReductionExample::cubic, "no scalar form recorded for the cubic example");
    const RealField ptt = diff2(phi, Dir::v, Dir::v, order), pxx = diff2(phi, Dir::u, Dir::u, order);
    const double s = sig == Signature::so3 ? 1.0 : -1.0;
    return map(
        [ex, s](double tt, double xx, double p) {
            switch (ex) {
                case ReductionExample::trig: return tt - xx + s * std::sin(p);
                case ReductionExample::hyperbolic: return tt + xx + s * std::sinh(p);
                default: return tt + xx + s * std::exp(2.0 * p);
            }
        },
        ptt, pxx, phi);
}

/// Factor c with gauss = c * pde residual for the examples above.
inline double reduction_factor(ReductionExample ex, Signature) {
    return ex == ReductionExample::exponential ? -1.0 : -0.5;
}

}  // namespace solsurf
