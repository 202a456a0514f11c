#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "solsurf/geometry/surface.hpp"
#include "solsurf/numerics/contour.hpp"
#include "solsurf/weierstrass/spinors.hpp"

namespace solsurf {

/// Inducing normalization: factors (2i, -2) or the classical (i, -1).
enum class Normalization { generalized, classical };

struct InduceOptions {
    Normalization norm = Normalization::generalized;
    Quadrature quad = Quadrature::fourth;
    int spot_checks = 10;
    unsigned seed = 12345;
    double conservation_tol = 1e-4;  ///< precondition on the quadratic laws
    double path_tol = 1e-6;
    const MeanCurvatureField* H = nullptr;  ///< prescribed H for the precondition; nullptr means H = 1
};

struct InducedSurface {
    Immersion3 X;
    Mask valid;
    ResidualReport report;
};

namespace detail {

// Integrand pairs (omega_z, omega_zbar) of X1 + i X2, X1 - i X2 and X3.
struct Integrands {
    ComplexField w_z, w_zb, v_z, v_zb, v_printed_z, v_printed_zb, x3_z, x3_zb;
};

inline Integrands integrands(const SpinorPair& s, double c) {
    const Grid2& g = s.grid();
    Integrands I{ComplexField(g, 0.0), ComplexField(g, 0.0), ComplexField(g, 0.0), ComplexField(g, 0.0),
                 ComplexField(g, 0.0), ComplexField(g, 0.0), ComplexField(g, 0.0), ComplexField(g, 0.0)};
    const cd ci(0.0, c);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!s.valid[k]) continue;
        const cd a = s.psi1.f[k], b = s.psi2.f[k];
        I.w_z[k] = ci * std::conj(a * a);
        I.w_zb[k] = -ci * std::conj(b * b);
        I.v_z[k] = ci * b * b;
        I.v_zb[k] = -ci * a * a;
        I.v_printed_z[k] = ci * a * a;
        I.v_printed_zb[k] = -ci * a * a;
        I.x3_z[k] = -c * std::conj(a) * b;
        I.x3_zb[k] = -c * a * std::conj(b);
    }
    return I;
}

inline bool path_allowed(const ContourPath& p, const Mask& m) {
    for (const Node& n : p.nodes)
        if (!m(n.i, n.j)) return false;
    return true;
}

}  // namespace detail

/// Surface from the spinor pair by path integrals from `base`:
/// X1 + i X2 = c i int(conj(psi1)^2 dz - conj(psi2)^2 dzbar),
/// X1 - i X2 = c i int(psi2^2 dz - psi1^2 dzbar),
/// X3 = -c int(conj(psi1) psi2 dz + psi1 conj(psi2) dzbar), c = 2 (or 1).
/// Paths follow the base row then columns, detouring around excluded nodes.
inline InducedSurface induce_surface(const SpinorPair& s, Node base, const InduceOptions& opt = {},
                                     const Mask* mask = nullptr) {
    const Grid2& g = s.grid();
    const Mask allowed = mask ? mask_and(s.valid, *mask) : s.valid;
    InducedSurface out{Immersion3(g, Vec3::Constant(std::nan(""))), Mask(g, 0), {}};
    const ResidualReport cons = conservation_residual(s, opt.H, opt.conservation_tol, &allowed);
    for (const char* law : {"law_1", "law_2", "law_3"})
        require(cons.get(law).pass, std::string("spinors violate conservation law ") + law + " (residual " +
                                        std::to_string(cons.get(law).max) + ")");
    const double c = opt.norm == Normalization::generalized ? 2.0 : 1.0;
    const detail::Integrands I = detail::integrands(s, c);
    const PathTree tree = PathTree::build(g, base, &allowed);
    const ComplexField W = tree.integrate(I.w_z, I.w_zb, opt.quad, &allowed);
    const ComplexField V = tree.integrate(I.v_z, I.v_zb, opt.quad, &allowed);
    const ComplexField Vp = tree.integrate(I.v_printed_z, I.v_printed_zb, opt.quad, &allowed);
    const ComplexField Z = tree.integrate(I.x3_z, I.x3_zb, opt.quad, &allowed);
    RealField conj_gap(g, 0.0), printed_gap(g, 0.0), x3_imag(g, 0.0);
    Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!tree.reached[k]) continue;
        out.valid[k] = 1;
        out.X[k] = Vec3(W[k].real(), W[k].imag(), Z[k].real());
        lo = lo.cwiseMin(out.X[k]);
        hi = hi.cwiseMax(out.X[k]);
        conj_gap[k] = std::abs(V[k] - std::conj(W[k]));
        printed_gap[k] = std::abs(Vp[k] - std::conj(W[k]));
        x3_imag[k] = std::abs(Z[k].imag());
    }
    ResidualReport& r = out.report;
    r.add(measure("conjugation_gap", conj_gap, &out.valid, 1e-10));
    r.add(measure("printed_second_integral_gap", printed_gap, &out.valid, 0.0, Bound::info));
    r.add(measure("x3_imaginary", x3_imag, &out.valid, 1e-10));

    // spot checks: tree path vs a staircase between random reachable nodes
    std::vector<std::size_t> nodes(tree.order);
    std::sort(nodes.begin(), nodes.end());
    std::mt19937 rng(opt.seed);
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
    Check pc;
    pc.name = "path_independence";
    pc.tol = opt.path_tol;
    for (int tries = 0; pc.nodes < static_cast<std::size_t>(opt.spot_checks) && tries < 100 * opt.spot_checks;
         ++tries) {
        const std::size_t ka = nodes[pick(rng)], kb = nodes[pick(rng)];
        if (ka == kb) continue;
        const Node a{static_cast<int>(ka % g.nu), static_cast<int>(ka / g.nu)};
        const Node b{static_cast<int>(kb % g.nu), static_cast<int>(kb / g.nu)};
        ContourPath p = staircase(g, a, b, false);
        if (!detail::path_allowed(p, allowed)) p = staircase(g, a, b, true);
        if (!detail::path_allowed(p, allowed)) continue;
        const cd dw = contour_integral(I.w_z, I.w_zb, p, opt.quad, &allowed);
        const cd dz = contour_integral(I.x3_z, I.x3_zb, p, opt.quad, &allowed);
        const Vec3 alt(dw.real(), dw.imag(), dz.real());
        const double gap = (alt - (out.X[kb] - out.X[ka])).norm();
        pc.max = std::max(pc.max, gap);
        pc.mean += gap;
        ++pc.nodes;
    }
    if (pc.nodes) pc.mean /= static_cast<double>(pc.nodes);
    pc.note = std::to_string(pc.nodes) + " node pairs";
    r.add(pc);
    const double diameter = (hi - lo).norm();
    if (pc.max > 1e-4 * diameter) r.warnings.push_back("inexact closure");
    r.merge(cons, "precondition_");
    return out;
}

/// Left side of (X1^2+X2^2)^2 - (2 + a^2/4 e^{2X3})(X1^2+X2^2)
///              + a^2/2 e^{2X3} X2 + 1 - a^2/4 e^{2X3}.
inline double quartic_lhs(const Vec3& X, double a) {
    const double s = X[0] * X[0] + X[1] * X[1], e = a * a * std::exp(2.0 * X[2]);
    return s * s - (2.0 + 0.25 * e) * s + 0.5 * e * X[1] + 1.0 - 0.25 * e;
}

inline Vec3 quartic_gradient(const Vec3& X, double a) {
    const double s = X[0] * X[0] + X[1] * X[1], e = a * a * std::exp(2.0 * X[2]);
    const double ds = 2.0 * s - (2.0 + 0.25 * e);
    return {2.0 * X[0] * ds, 2.0 * X[1] * ds + 0.5 * e, -0.5 * e * s + e * X[1] - 0.5 * e};
}

/// Translation t moving X_ref onto the quartic zero set with least |t|
/// (Gauss-Newton from t = 0), applied to every node; then the fraction of
/// nodes with |LHS| <= tol.
inline ResidualReport quartic_check(InducedSurface& s, double a, Node ref, double tol = 1e-4,
                                    double fraction = 0.99, const Mask* mask = nullptr) {
    const Grid2& g = s.X.grid;
    require(s.valid(ref.i, ref.j), "reference node is not on the surface");
    const Vec3 x0 = s.X(ref.i, ref.j);
    Vec3 t = Vec3::Zero();
    for (int it = 0; it < 100; ++it) {
        const double q = quartic_lhs(x0 + t, a);
        const Vec3 gr = quartic_gradient(x0 + t, a);
        if (std::abs(q) < 1e-15 || gr.squaredNorm() == 0.0) break;
        t -= q * gr / gr.squaredNorm();
    }
    for (std::size_t k = 0; k < g.size(); ++k)
        if (s.valid[k]) s.X[k] += t;
    const Mask m = mask ? mask_and(s.valid, *mask) : s.valid;
    RealField q(g, 0.0);
    std::size_t good = 0, total = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!m[k]) continue;
        q[k] = std::abs(quartic_lhs(s.X[k], a));
        good += q[k] <= tol ? 1 : 0;
        ++total;
    }
    ResidualReport r;
    r.add(measure("quartic_max", q, &m, tol, Bound::info));
    Check frac;
    frac.name = "quartic_fraction";
    frac.max = total ? static_cast<double>(good) / static_cast<double>(total) : 0.0;
    frac.tol = fraction;
    frac.bound = Bound::at_least;
    frac.nodes = total;
    frac.note = "fraction of nodes with |LHS| <= " + std::to_string(tol) + "; reference residual after fit " +
                std::to_string(std::abs(quartic_lhs(x0 + t, a)));
    r.add(frac);
    return r;
}

struct SurfaceChecks {
    double h_tol = 1e-3, conformal_tol = 1e-4, curvature_tol = 1e-2;
    Order order = Order::fourth;
    bool check_curvature = true;  ///< compare K with -d dbar ln p / p^2
    double min_p = 0.0;           ///< nodes with p below this are branch points of the surface and left out
};

/// Geometry of the induced mesh: constancy of H (relative standard deviation,
/// mean recorded) or agreement with a prescribed nonconstant H, conformality (F, E/G - 1), metric factor E/(4p^2) and K
/// against the curvature of the metric built from p.
inline ResidualReport induced_geometry(const InducedSurface& s, const SpinorPair& sp, const Mask* mask = nullptr,
                                       const SurfaceChecks& opt = {},
                                       Normalization norm = Normalization::generalized,
                                       const MeanCurvatureField* prescribed = nullptr) {
    const Grid2& g = s.X.grid;
    const FormField ff = fundamental_forms(s.X, +1, opt.order);
    Mask m = erode(s.valid, 2 * stencil_radius(static_cast<int>(opt.order)));
    m = mask_and(m, ff.regular);
    m = mask_and(m, interior_mask(g, 1));
    if (mask) m = mask_and(m, *mask);
    std::size_t low_p = 0;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (m[k] && !(sp.p[k] >= opt.min_p)) m[k] = 0, ++low_p;
    const double metric_scale = norm == Normalization::generalized ? 4.0 : 1.0;
    RealField F(g, 0.0), EG(g, 0.0), factor(g, 0.0), K(g, 0.0);
    const RealField Kp = curvature_from_p(sp, metric_scale / 4.0);
    double sum = 0.0, sum2 = 0.0, kmax = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!m[k]) continue;
        sum += ff.H[k];
        sum2 += ff.H[k] * ff.H[k];
        ++n;
        F[k] = std::abs(ff.F[k]);
        EG[k] = std::abs(ff.E[k] / ff.G[k] - 1.0);
        factor[k] = ff.E[k] / (metric_scale * sp.p[k] * sp.p[k]);
        kmax = std::max(kmax, std::abs(Kp[k]));
    }
    require(n > 1, "no regular nodes on the induced surface");
    const double mean = sum / n, sd = std::sqrt(std::max(0.0, sum2 / n - mean * mean));
    ResidualReport r;
    Check h;
    h.name = "h_relative_std";
    h.max = sd / std::abs(mean);
    h.mean = mean;
    h.tol = opt.h_tol;
    h.nodes = n;
    h.note = "mean H " + std::to_string(mean);
    if (prescribed && !prescribed->constant) {
        // H varies by design: compare with the prescribed function instead,
        // up to the orientation sign of the mean
        h.bound = Bound::info;
        RealField dh(g, 0.0);
        const double sg = mean >= 0.0 ? 1.0 : -1.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (m[k]) dh[k] = std::abs(sg * ff.H[k] * std::sqrt(metric_scale) / 2.0 - prescribed->H[k]) / prescribed->H[k];
        r.add(measure("h_vs_prescribed", dh, &m, opt.h_tol));
    }
    if (low_p) h.note += "; " + std::to_string(low_p) + " nodes with p < " + std::to_string(opt.min_p) + " excluded";
    r.add(h);
    r.add(measure("conformal_F", F, &m, opt.conformal_tol));
    r.add(measure("conformal_E_over_G", EG, &m, opt.conformal_tol));
    double fmin = 1e300, fmax = -1e300;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (m[k]) {
            fmin = std::min(fmin, factor[k]);
            fmax = std::max(fmax, factor[k]);
        }
    Check fc;
    fc.name = "metric_factor_spread";
    fc.max = (fmax - fmin) / std::abs(fmax);
    fc.tol = opt.conformal_tol;
    fc.note = "E / (c^2 p^2) in [" + std::to_string(fmin) + ", " + std::to_string(fmax) + "]";
    fc.nodes = n;
    r.add(fc);
    if (opt.check_curvature) {
        // flat surfaces have K = 0: fall back to the curvature scale H^2
        const double scale = std::max({kmax, mean * mean, 1e-300});
        for (std::size_t k = 0; k < g.size(); ++k)
            if (m[k]) K[k] = std::abs(ff.K[k] - Kp[k]) / scale;
        Check& kc = r.add(measure("curvature_vs_p", K, &m, opt.curvature_tol));
        kc.note = "relative to " + std::to_string(scale) + " (max |K| or mean H squared)";
    }
    return r;
}

}  // namespace solsurf
