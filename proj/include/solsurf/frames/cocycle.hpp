#pragma once

#include <array>
#include <cmath>
#include <string>

#include "solsurf/numerics/diff.hpp"
#include "solsurf/numerics/dual.hpp"
#include "solsurf/numerics/report.hpp"

namespace solsurf {

/// One-form a dx + b dt on a real-plane grid (x along u, t along v).
struct OneForm {
    RealField a, b;
};

using Cocycle = std::array<OneForm, 3>;

/// Residual fields of the sl(2) structure equations
/// d s1 = s3 ^ s2, d s2 = s1 ^ s3, d s3 = s1 ^ s2,
/// with d(a dx + b dt) = (b_x - a_t) dx^dt and
/// (a dx + b dt) ^ (c dx + e dt) = (a e - b c) dx^dt. Signed values.
inline std::array<RealField, 3> mc_residual_fields(const Cocycle& s, Order order = Order::second) {
    for (const auto& f : s) {
        check_same_grid(s[0].a.grid, f.a.grid);
        check_same_grid(s[0].a.grid, f.b.grid);
    }
    auto d = [order](const OneForm& w) {
        return map([](double bx, double at) { return bx - at; }, diff(w.b, Dir::u, order), diff(w.a, Dir::v, order));
    };
    auto wedge = [](const OneForm& p, const OneForm& q) {
        return map([](double a, double b, double c, double e) { return a * e - b * c; }, p.a, p.b, q.a, q.b);
    };
    auto sub = [](const RealField& x, const RealField& y) { return map([](double a, double b) { return a - b; }, x, y); };
    return {sub(d(s[0]), wedge(s[2], s[1])), sub(d(s[1]), wedge(s[0], s[2])), sub(d(s[2]), wedge(s[0], s[1]))};
}

inline RealField abs_field(const RealField& f) {
    return map([](double x) { return std::abs(x); }, f);
}

/// Report entries "mc_1", "mc_2", "mc_3" (absolute residuals).
inline ResidualReport mc_cocycle_residual(const Cocycle& s, Order order = Order::second,
                                          std::array<double, 3> tol = {1e-5, 1e-5, 1e-5}, const Mask* mask = nullptr) {
    const auto r = mc_residual_fields(s, order);
    ResidualReport rep;
    for (int k = 0; k < 3; ++k) rep.add(measure("mc_" + std::to_string(k + 1), abs_field(r[k]), mask, tol[k]));
    return rep;
}

/// Exact variant: forms(x, t) is a generic callable returning
/// {a1, b1, a2, b2, a3, b3}; derivatives by dual numbers.
template <class Forms>
std::array<RealField, 3> mc_residual_fields_exact(const Grid2& g, Forms forms) {
    auto comp = [forms](int k) { return [forms, k](auto x, auto t) { return forms(x, t)[k]; }; };
    std::array<RealField, 3> out{RealField(g), RealField(g), RealField(g)};
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const double x = g.u(i), t = g.v(j);
            const auto w = forms(x, t);
            auto dform = [&](int n) { return d_du(comp(2 * n + 1))(x, t) - d_dv(comp(2 * n))(x, t); };
            auto wedge = [&](int p, int q) { return w[2 * p] * w[2 * q + 1] - w[2 * p + 1] * w[2 * q]; };
            out[0](i, j) = dform(0) - wedge(2, 1);
            out[1](i, j) = dform(1) - wedge(0, 2);
            out[2](i, j) = dform(2) - wedge(0, 1);
        }
    return out;
}

template <class Forms>
ResidualReport mc_cocycle_residual_exact(const Grid2& g, Forms forms, std::array<double, 3> tol = {1e-12, 1e-12, 1e-12},
                                         const Mask* mask = nullptr) {
    const auto r = mc_residual_fields_exact(g, forms);
    ResidualReport rep;
    for (int k = 0; k < 3; ++k) rep.add(measure("mc_" + std::to_string(k + 1), abs_field(r[k]), mask, tol[k]));
    return rep;
}

/// Sine-Gordon cocycle: s1 = sin u dt, s2 = dx + cos u dt, s3 = u_x dx.
/// The first two structure equations hold identically; the third reads
/// sin u - u_xt.
inline Cocycle sg_cocycle(const RealField& u, Order order = Order::second) {
    const Grid2& g = u.grid;
    RealField zero(g, 0.0), one(g, 1.0);
    return {OneForm{zero, map([](double x) { return std::sin(x); }, u)},
            OneForm{one, map([](double x) { return std::cos(x); }, u)}, OneForm{diff(u, Dir::u, order), zero}};
}

/// Exact sine-Gordon cocycle for a generic callable u(x, t).
template <class U>
auto sg_cocycle_exact(U u) {
    return [u](auto x, auto t) {
        using std::cos;
        using std::sin;
        const auto s = u(x, t);
        using T = std::decay_t<decltype(s)>;
        const T ux = d_du(u)(x, t);
        return std::array<T, 6>{T(0.0), sin(s), T(1.0), cos(s), ux, T(0.0)};
    };
}

/// KdV cocycle from the sl(2) prolongation:
/// s1 = 2 u_x dt, s2 = -(1 + u) dx - (2u + 2u^2 - u_xx) dt,
/// s3 = (1 - u) dx + (2u - 2u^2 + u_xx) dt.
/// The first structure equation holds identically; the other two are
/// multiples of u_t - 6 u u_x + u_xxx.
inline Cocycle kdv_cocycle(const RealField& u, Order order = Order::second) {
    const RealField ux = diff(u, Dir::u, order), uxx = diff2(u, Dir::u, Dir::u, order);
    const RealField zero(u.grid, 0.0);
    return {OneForm{zero, map([](double p) { return 2.0 * p; }, ux)},
            OneForm{map([](double x) { return -(1.0 + x); }, u),
                    map([](double x, double q) { return -(2.0 * x + 2.0 * x * x - q); }, u, uxx)},
            OneForm{map([](double x) { return 1.0 - x; }, u),
                    map([](double x, double q) { return 2.0 * x - 2.0 * x * x + q; }, u, uxx)}};
}

template <class U>
auto kdv_cocycle_exact(U u) {
    return [u](auto x, auto t) {
        const auto s = u(x, t);
        using T = std::decay_t<decltype(s)>;
        const T ux = d_du(u)(x, t);
        const T uxx = d_du(d_du(u))(x, t);
        return std::array<T, 6>{T(0.0),          ux * 2.0,
                                -(s + 1.0),      -(s * 2.0 + s * s * 2.0 - uxx),
                                -(s - 1.0),      s * 2.0 - s * s * 2.0 + uxx};
    };
}

/// Pullback forms of the left-invariant forms under (x, t) -> A(alpha, beta) B(gamma):
/// w1 = 2 cos 2g da/a + sin 2g (b da - a db),
/// w2 = -2 sin 2g da/a + cos 2g (b da - a db),
/// w3 = b da - a db + 2 dg.
/// They satisfy the structure equations for any smooth alpha > 0, beta, gamma.
inline Cocycle pullback_forms(const RealField& alpha, const RealField& beta, const RealField& gamma,
                              Order order = Order::second) {
    auto build = [&](Dir d) {
        const RealField da = diff(alpha, d, order), db = diff(beta, d, order), dg = diff(gamma, d, order);
        std::array<RealField, 3> w{RealField(alpha.grid), RealField(alpha.grid), RealField(alpha.grid)};
        for (std::size_t k = 0; k < alpha.size(); ++k) {
            const double a = alpha[k], b = beta[k], c2 = std::cos(2.0 * gamma[k]), s2 = std::sin(2.0 * gamma[k]);
            const double t1 = 2.0 * da[k] / a, t2 = b * da[k] - a * db[k];
            w[0][k] = c2 * t1 + s2 * t2;
            w[1][k] = -s2 * t1 + c2 * t2;
            w[2][k] = t2 + 2.0 * dg[k];
        }
        return w;
    };
    const auto x = build(Dir::u), t = build(Dir::v);
    return {OneForm{x[0], t[0]}, OneForm{x[1], t[1]}, OneForm{x[2], t[2]}};
}

}  // namespace solsurf
