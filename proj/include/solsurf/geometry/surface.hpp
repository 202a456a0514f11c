#pragma once

#include <cmath>
#include <string>

#include "solsurf/numerics/diff.hpp"
#include "solsurf/numerics/matrix.hpp"
#include "solsurf/numerics/report.hpp"

namespace solsurf {

/// Surface sampled on a grid: one point of R^3 per node.
using Immersion3 = Field<Vec3>;

/// First and second fundamental form coefficients with derived curvatures.
/// Nodes with |r_u x r_v| <= eps_reg are marked non-regular; their K and H
/// are NaN.
struct FormField {
    Grid2 grid;
    RealField E, F, G, e, f, g, K, H;
    Mask regular;

    FormField() = default;
    explicit FormField(const Grid2& gr)
        : grid(gr), E(gr), F(gr), G(gr), e(gr), f(gr), g(gr), K(gr), H(gr), regular(gr, 1) {}

    /// Fills K and H from the six coefficients; marks EG - F^2 <= 0 as singular.
    void derive_curvatures() {
        const double nan = std::nan("");
        for (std::size_t k = 0; k < E.size(); ++k) {
            const double W = E[k] * G[k] - F[k] * F[k];
            if (!(W > 0.0) || !regular[k]) {
                regular[k] = 0;
                K[k] = H[k] = nan;
                continue;
            }
            K[k] = (e[k] * g[k] - f[k] * f[k]) / W;
            H[k] = (e[k] * G[k] - 2.0 * f[k] * F[k] + g[k] * E[k]) / (2.0 * W);
        }
    }

    std::size_t singular_count() const {
        std::size_t n = 0;
        for (auto r : regular.values) n += r ? 0 : 1;
        return n;
    }
};

inline RealField component(const Immersion3& s, int c) {
    return map([c](const Vec3& p) { return p[c]; }, s);
}

namespace detail {

// sign_at(k, n) returns the orientation (+1/-1) of the unit normal n at node k
template <class Sign>
FormField forms_impl(const Immersion3& s, Order order, double eps_reg, Sign&& sign_at) {
    const Grid2& gr = s.grid;
    Field<Vec3> ru(gr), rv(gr), ruu(gr), ruv(gr), rvv(gr);
    for (int c = 0; c < 3; ++c) {
        RealField x = component(s, c);
        RealField xu = diff(x, Dir::u, order), xv = diff(x, Dir::v, order);
        RealField xuu = diff2(x, Dir::u, Dir::u, order), xvv = diff2(x, Dir::v, Dir::v, order);
        RealField xuv = diff(xu, Dir::v, order);
        for (std::size_t k = 0; k < gr.size(); ++k) {
            ru[k][c] = xu[k];
            rv[k][c] = xv[k];
            ruu[k][c] = xuu[k];
            ruv[k][c] = xuv[k];
            rvv[k][c] = xvv[k];
        }
    }
    FormField ff(gr);
    for (std::size_t k = 0; k < gr.size(); ++k) {
        const Vec3 n = ru[k].cross(rv[k]);
        const double len = n.norm();
        ff.E[k] = ru[k].dot(ru[k]);
        ff.F[k] = ru[k].dot(rv[k]);
        ff.G[k] = rv[k].dot(rv[k]);
        if (!(len > eps_reg) || !all_finite(s[k])) {
            ff.regular[k] = 0;
            continue;
        }
        const Vec3 N = n / len;
        const double sg = sign_at(k, N);
        ff.e[k] = -sg * ruu[k].dot(N);
        ff.f[k] = -sg * ruv[k].dot(N);
        ff.g[k] = -sg * rvv[k].dot(N);
    }
    ff.derive_curvatures();
    return ff;
}

}  // namespace detail

/// Fundamental forms of an immersion by finite differences. The sign of the
/// second form is fixed so that a sphere with outward normal (normal_sign = +1
/// and r_u x r_v pointing outward) has H = +1: e = -r_uu . N, f = -r_uv . N,
/// g = -r_vv . N, N = normal_sign * (r_u x r_v)/|r_u x r_v|.
inline FormField fundamental_forms(const Immersion3& s, int normal_sign = +1, Order order = Order::second,
                                   double eps_reg = 1e-10) {
    require(normal_sign == 1 || normal_sign == -1, "normal_sign must be +1 or -1");
    return detail::forms_impl(s, order, eps_reg, [normal_sign](std::size_t, const Vec3&) { return normal_sign; });
}

/// Same, with the unit normal at each node oriented to agree with a smooth
/// reference field: N = sign((r_u x r_v) . n_ref) (r_u x r_v)/|r_u x r_v|.
/// Keeps the second form continuous across folds where r_u x r_v flips.
inline FormField fundamental_forms_oriented(const Immersion3& s, const Field<Vec3>& n_ref, Order order = Order::second,
                                            double eps_reg = 1e-10) {
    check_same_grid(s.grid, n_ref.grid);
    return detail::forms_impl(s, order, eps_reg,
                              [&](std::size_t k, const Vec3& N) { return N.dot(n_ref[k]) >= 0.0 ? 1.0 : -1.0; });
}

/// Christoffel symbols of the first fundamental form.
struct Christoffel {
    RealField g111, g211, g112, g212, g122, g222;  // Gamma^k_ij stored as g k i j
};

inline Christoffel christoffels(const FormField& ff, Order order = Order::second) {
    const RealField Eu = diff(ff.E, Dir::u, order), Ev = diff(ff.E, Dir::v, order);
    const RealField Fu = diff(ff.F, Dir::u, order), Fv = diff(ff.F, Dir::v, order);
    const RealField Gu = diff(ff.G, Dir::u, order), Gv = diff(ff.G, Dir::v, order);
    Christoffel c{RealField(ff.grid), RealField(ff.grid), RealField(ff.grid),
                  RealField(ff.grid), RealField(ff.grid), RealField(ff.grid)};
    for (std::size_t k = 0; k < ff.E.size(); ++k) {
        const double E = ff.E[k], F = ff.F[k], G = ff.G[k];
        const double W2 = 2.0 * (E * G - F * F);
        c.g111[k] = (G * Eu[k] - 2.0 * F * Fu[k] + F * Ev[k]) / W2;
        c.g211[k] = (2.0 * E * Fu[k] - E * Ev[k] - F * Eu[k]) / W2;
        c.g112[k] = (G * Ev[k] - F * Gu[k]) / W2;
        c.g212[k] = (E * Gu[k] - F * Ev[k]) / W2;
        c.g122[k] = (2.0 * G * Fv[k] - G * Gu[k] - F * Gv[k]) / W2;
        c.g222[k] = (E * Gv[k] - 2.0 * F * Fv[k] + F * Gu[k]) / W2;
    }
    return c;
}

/// Intrinsic curvature from E, F, G alone:
/// K = [ (W/E Gamma^2_11)_v - (W/E Gamma^2_12)_u ] / W with W = sqrt(EG - F^2).
inline RealField intrinsic_curvature(const FormField& ff, Order order = Order::second) {
    const Christoffel c = christoffels(ff, order);
    RealField a(ff.grid), b(ff.grid), W(ff.grid);
    for (std::size_t k = 0; k < ff.E.size(); ++k) {
        W[k] = std::sqrt(ff.E[k] * ff.G[k] - ff.F[k] * ff.F[k]);
        a[k] = W[k] / ff.E[k] * c.g211[k];
        b[k] = W[k] / ff.E[k] * c.g212[k];
    }
    const RealField av = diff(a, Dir::v, order), bu = diff(b, Dir::u, order);
    return map([](double x, double y, double w) { return (x - y) / w; }, av, bu, W);
}

/// Residuals of the two Mainardi-Codazzi equations at regular nodes.
inline ResidualReport mainardi_codazzi_residual(const FormField& ff, double tol = 1e-5,
                                                Order order = Order::second, const Mask* extra = nullptr) {
    const Christoffel c = christoffels(ff, order);
    const RealField ev = diff(ff.e, Dir::v, order), fu = diff(ff.f, Dir::u, order);
    const RealField fv = diff(ff.f, Dir::v, order), gu = diff(ff.g, Dir::u, order);
    RealField r1(ff.grid), r2(ff.grid);
    for (std::size_t k = 0; k < r1.size(); ++k) {
        const double e = ff.e[k], f = ff.f[k], g = ff.g[k];
        r1[k] = std::abs(ev[k] - fu[k] - (e * c.g112[k] + f * (c.g212[k] - c.g111[k]) - g * c.g211[k]));
        r2[k] = std::abs(fv[k] - gu[k] - (e * c.g122[k] + f * (c.g222[k] - c.g112[k]) - g * c.g212[k]));
    }
    Mask m = extra ? mask_and(ff.regular, *extra) : ff.regular;
    ResidualReport rep;
    rep.add(measure("codazzi_1", r1, &m, tol));
    rep.add(measure("codazzi_2", r2, &m, tol));
    return rep;
}

/// Forms of a surface parametrised by arc length along asymptotic lines:
/// I = du^2 + 2 cos w du dv + dv^2, II = (2/rho) sin w du dv.
inline FormField pseudospherical_forms(const RealField& omega, double rho) {
    require(rho != 0.0, "rho must be nonzero");
    FormField ff(omega.grid);
    for (std::size_t k = 0; k < omega.size(); ++k) {
        ff.E[k] = 1.0;
        ff.F[k] = std::cos(omega[k]);
        ff.G[k] = 1.0;
        ff.e[k] = 0.0;
        ff.f[k] = std::sin(omega[k]) / rho;
        ff.g[k] = 0.0;
    }
    ff.derive_curvatures();
    return ff;
}

/// Compatibility report for the pseudospherical forms built from omega:
/// Mainardi-Codazzi residuals, the sine-Gordon residual |w_uv - sin w / rho^2|
/// and the Gauss residual |K_intrinsic - K_extrinsic|. The Codazzi pair holds
/// for any omega; the last two vanish exactly when omega solves sine-Gordon.
/// Statistics skip `margin` boundary rows and nodes with |sin w| < min_sin
/// (coinciding asymptotic directions).
inline ResidualReport check_pseudospherical(const RealField& omega, double rho, double tol = 1e-5,
                                            Order order = Order::second, int margin = 2, double min_sin = 1e-3,
                                            double gauss_tol = 1e-5) {
    FormField ff = pseudospherical_forms(omega, rho);
    // intrinsic curvature differentiates twice, so keep two stencil widths
    // away from degenerate nodes
    Mask m = mask_and(erode(ff.regular, 2 * stencil_radius(static_cast<int>(order))),
                      interior_mask(ff.grid, margin));
    for (std::size_t k = 0; k < m.size(); ++k)
        if (std::abs(std::sin(omega[k])) < min_sin) m[k] = 0;
    ResidualReport rep = mainardi_codazzi_residual(ff, tol, order, &m);
    const RealField wuv = diff(diff(omega, Dir::u, order), Dir::v, order);
    const RealField sg = map([rho](double a, double w) { return std::abs(a - std::sin(w) / (rho * rho)); }, wuv, omega);
    rep.add(measure("sine_gordon", sg, &m, tol));
    const RealField Kin = intrinsic_curvature(ff, order);
    const RealField gauss = map([](double a, double b) { return std::abs(a - b); }, Kin, ff.K);
    rep.add(measure("gauss", gauss, &m, gauss_tol));
    double max_f = 0.0;
    for (double x : ff.f.values) max_f = std::max(max_f, std::abs(x));
    Check deg;
    deg.name = "degenerate_second_form";
    deg.bound = Bound::info;
    deg.max = max_f;
    deg.nodes = omega.size();
    if (max_f < 1e-14) {
        deg.note = "second fundamental form vanishes identically";
        rep.warnings.push_back("degenerate second form: sin(omega) = 0 everywhere");
    }
    rep.add(deg);
    return rep;
}

}  // namespace solsurf
