#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "solsurf/numerics/diff.hpp"
#include "solsurf/numerics/dual.hpp"
#include "solsurf/numerics/ode.hpp"
#include "solsurf/numerics/report.hpp"

namespace solsurf {

/// Real-plane grid read as (x, t): x along u, t along v.
enum class SGForm {
    light_cone,  ///< u_xt - sin u
    lab_plus,    ///< u_tt - u_xx + sin u
    lab_minus    ///< u_tt - u_xx - sin u
};

/// Residual of the sine-Gordon equation in the chosen form, by finite
/// differences. Entry "sine_gordon"; statistics skip `margin` boundary rows.
inline ResidualReport sg_residual(const RealField& u, SGForm form = SGForm::light_cone, Order order = Order::fourth,
                                  double tol = 1e-6, int margin = 0, RealField* abs_out = nullptr) {
    RealField r(u.grid);
    if (form == SGForm::light_cone) {
        const RealField uxt = diff(diff(u, Dir::u, order), Dir::v, order);
        r = map([](double a, double x) { return std::abs(a - std::sin(x)); }, uxt, u);
    } else {
        const double s = form == SGForm::lab_plus ? 1.0 : -1.0;
        const RealField utt = diff2(u, Dir::v, Dir::v, order), uxx = diff2(u, Dir::u, Dir::u, order);
        r = map([s](double tt, double xx, double x) { return std::abs(tt - xx + s * std::sin(x)); }, utt, uxx, u);
    }
    if (abs_out) *abs_out = r;
    const Mask m = interior_mask(u.grid, margin);
    ResidualReport rep;
    rep.add(measure("sine_gordon", r, &m, tol));
    return rep;
}

/// Solution of u_xt = sin u with first derivatives; the residual is measured.
struct SGSolution {
    RealField u, u_x, u_t;
    RealField residual;  ///< |u_xt - sin u|

    double max_residual(int margin = 0) const {
        const Mask m = interior_mask(u.grid, margin);
        return measure("", residual, &m).max;
    }
};

/// From a generic callable u(x, t); derivatives exact.
template <class F>
SGSolution sg_solution(const Grid2& g, F u) {
    SGSolution s;
    s.u = sample(g, [&](double x, double t) { return u(x, t); });
    s.u_x = sample(g, [&](double x, double t) { return d_du(u)(x, t); });
    s.u_t = sample(g, [&](double x, double t) { return d_dv(u)(x, t); });
    s.residual = sample(g, [&](double x, double t) { return std::abs(d_dv(d_du(u))(x, t) - std::sin(u(x, t))); });
    return s;
}

/// From a sampled field; derivatives by finite differences.
inline SGSolution sg_solution(const RealField& u, Order order = Order::fourth) {
    SGSolution s;
    s.u = u;
    s.u_x = diff(u, Dir::u, order);
    s.u_t = diff(u, Dir::v, order);
    s.residual = RealField(u.grid);
    sg_residual(u, SGForm::light_cone, order, 0.0, 0, &s.residual);
    return s;
}

/// Vacuum-generated kink 4 atan(exp(a x + t/a + c)) with c fixed by the value
/// `seed` at (x0, t0).
struct VacuumKink {
    double a = 1.0, c = 0.0;

    VacuumKink(double a_param, double x0, double t0, double seed) : a(a_param) {
        require(a_param != 0.0, "a_param must be nonzero");
        require(seed > 0.0 && seed < 2.0 * M_PI, "kink seed must lie in (0, 2 pi)");
        c = std::log(std::tan(0.25 * seed)) - a * x0 - t0 / a;
    }
    template <class T>
    T operator()(T x, T t) const {
        using std::atan;
        using std::exp;
        return atan(exp(x * a + t * (1.0 / a) + c)) * 4.0;
    }
};

namespace detail {

inline std::vector<double> row_of(const RealField& f, int j) {
    std::vector<double> r(f.grid.nu);
    for (int i = 0; i < f.grid.nu; ++i) r[i] = f(i, j);
    return r;
}

inline std::vector<double> column_of(const RealField& f, int i) {
    std::vector<double> c(f.grid.nv);
    for (int j = 0; j < f.grid.nv; ++j) c[j] = f(i, j);
    return c;
}

// Integrates y_x = X(x-index, y) along row base.j, then y_t = T(i, t-index, y)
// down every column (x_first), or the other way round. X and T receive
// fractional node indices.
template <class Rx, class Rt>
RealField march_xt(const Grid2& g, Node base, double y0, Rx&& rx, Rt&& rt, bool x_first) {
    RealField y(g);
    if (x_first) {
        const std::vector<double> row =
            rk4_march(g.nu, base.i, g.hu(), y0, [&](double p, double v) { return rx(p, static_cast<double>(base.j), v); });
        for (int i = 0; i < g.nu; ++i) {
            const std::vector<double> col = rk4_march(
                g.nv, base.j, g.hv(), row[i], [&](double p, double v) { return rt(static_cast<double>(i), p, v); });
            for (int j = 0; j < g.nv; ++j) y(i, j) = col[j];
        }
    } else {
        const std::vector<double> col =
            rk4_march(g.nv, base.j, g.hv(), y0, [&](double p, double v) { return rt(static_cast<double>(base.i), p, v); });
        for (int j = 0; j < g.nv; ++j) {
            const std::vector<double> row = rk4_march(
                g.nu, base.i, g.hu(), col[j], [&](double p, double v) { return rx(p, static_cast<double>(j), v); });
            for (int i = 0; i < g.nu; ++i) y(i, j) = row[i];
        }
    }
    return y;
}

// Node field value at (pi, pj) where exactly one of the two may be fractional.
struct LineSampler {
    const RealField& f;
    explicit LineSampler(const RealField& field) : f(field) {}
    double operator()(double pi, double pj) const {
        const double fi = std::floor(pi), fj = std::floor(pj);
        if (pi != fi) return sample_at(row_of_cached(static_cast<int>(fj)), pi);
        if (pj != fj) return sample_at(column_of_cached(static_cast<int>(fi)), pj);
        return f(static_cast<int>(pi), static_cast<int>(pj));
    }
    // rows and columns are cached lazily; the last one used is kept
    mutable int row_idx = -1, col_idx = -1;
    mutable std::vector<double> row, col;
    const std::vector<double>& row_of_cached(int j) const {
        if (j != row_idx) {
            row = row_of(f, j);
            row_idx = j;
        }
        return row;
    }
    const std::vector<double>& column_of_cached(int i) const {
        if (i != col_idx) {
            col = column_of(f, i);
            col_idx = i;
        }
        return col;
    }
};

}  // namespace detail

/// Result of the psi transform.
struct BTPsi {
    RealField psi;
    ResidualReport report;  ///< "input_sine_gordon", "cross_order"
};

/// Integrates psi_x = u_x - cos psi along the x-row through `base`, then
/// psi_t = -cos(psi - u) along every t-column, from psi(base) = psi0. The
/// pair is compatible exactly when u solves sine-Gordon; "cross_order"
/// records the difference to the t-first integration. The input residual is
/// judged `margin` nodes inside the boundary.
inline BTPsi bt_psi(const SGSolution& u, double psi0, Node base = {0, 0}, double input_tol = 1e-4, int margin = 2) {
    const Grid2& g = u.u.grid;
    require(g.contains(base.i, base.j), "base node outside grid");
    const double in = u.max_residual(margin);
    require(in <= input_tol, "bt_psi: input sine-Gordon residual " + std::to_string(in) + " above tolerance");
    detail::LineSampler U{u.u}, Ux{u.u_x};
    auto rx = [&](double pi, double pj, double y) { return Ux(pi, pj) - std::cos(y); };
    auto rt = [&](double pi, double pj, double y) { return -std::cos(y - U(pi, pj)); };
    BTPsi out;
    out.psi = detail::march_xt(g, base, psi0, rx, rt, true);
    const RealField other = detail::march_xt(g, base, psi0, rx, rt, false);
    const Mask inner = interior_mask(g, margin);
    out.report.add(measure("input_sine_gordon", u.residual, &inner, input_tol));
    out.report.add(measure("cross_order", map([](double a, double b) { return std::abs(a - b); }, out.psi, other),
                           nullptr, 0.0, Bound::info));
    return out;
}

/// Residuals of the psi equation psi_xt^2 = cos^2 psi (1 - psi_t^2) and of the
/// elimination of u: with sin u = psi_xt - sin psi psi_t and
/// cos u = -tan psi psi_xt - cos psi psi_t, checks sin^2 u + cos^2 u = 1 and
/// compares the recovered angle with u when given. Nodes with
/// |cos psi| < min_cos are left out of the eliminant statistics.
/// Entries "psi_equation", "eliminant", and "recovered_u" when u is given.
inline ResidualReport bt_eliminant_check(const RealField& psi, const RealField* u = nullptr, Order order = Order::fourth,
                                         int margin = 2, double psi_tol = 1e-6, double elim_tol = 1e-5,
                                         double min_cos = 0.1) {
    const Grid2& g = psi.grid;
    const RealField pt = diff(psi, Dir::v, order);
    const RealField pxt = diff(diff(psi, Dir::u, order), Dir::v, order);
    RealField eq(g), elim(g), rec(g, 0.0);
    Mask m = interior_mask(g, margin), me = m;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double c = std::cos(psi[k]), s = std::sin(psi[k]);
        eq[k] = std::abs(pxt[k] * pxt[k] - c * c * (1.0 - pt[k] * pt[k]));
        if (std::abs(c) < min_cos) {
            me[k] = 0;
            elim[k] = 0.0;
            continue;
        }
        const double su = pxt[k] - s * pt[k];
        const double cu = -(s / c) * pxt[k] - c * pt[k];
        elim[k] = std::abs(su * su + cu * cu - 1.0);
        if (u) rec[k] = std::abs(std::remainder(std::atan2(su, cu) - (*u)[k], 2.0 * M_PI));
    }
    ResidualReport rep;
    rep.add(measure("psi_equation", eq, &m, psi_tol));
    rep.add(measure("eliminant", elim, &me, elim_tol));
    if (u) {
        check_same_grid(g, u->grid);
        rep.add(measure("recovered_u", rec, &me, elim_tol));
    }
    return rep;
}

/// Result of the auto-transform.
struct AutoBT {
    SGSolution u;           ///< transformed solution, residual measured by finite differences
    bool degenerate = false;
    ResidualReport report;  ///< "input_sine_gordon", "cross_order", "sine_gordon"
};

/// Integrates the auto-transform with parameter a (coordinates scaled
/// x -> a x, t -> t / a; a = 1 is the unscaled form):
///   u~_x = -u_x + 2a sin((u~ - u)/2),  u~_t = u_t + (2/a) sin((u~ + u)/2),
/// along the x-row through `base`, then along t-columns, from u~(base) = seed.
/// The degenerate branch, where both sine terms stay below 1e-14 along the
/// first row and the first column, is flagged with a warning.
inline AutoBT auto_bt(const SGSolution& u, double a_param, double seed, Node base = {0, 0},
                      Order order = Order::fourth, double input_tol = 1e-4, double output_tol = 1e-5,
                      int margin = 2) {
    const Grid2& g = u.u.grid;
    require(a_param != 0.0 && std::isfinite(a_param), "a_param must be finite and nonzero");
    require(std::isfinite(seed), "seed must be finite");
    require(g.contains(base.i, base.j), "base node outside grid");
    const double in = u.max_residual(margin);
    require(in <= input_tol, "auto_bt: input sine-Gordon residual " + std::to_string(in) + " above tolerance");
    detail::LineSampler U{u.u}, Ux{u.u_x}, Ut{u.u_t};
    const double a = a_param;
    auto rx = [&](double pi, double pj, double y) { return -Ux(pi, pj) + 2.0 * a * std::sin(0.5 * (y - U(pi, pj))); };
    auto rt = [&](double pi, double pj, double y) { return Ut(pi, pj) + (2.0 / a) * std::sin(0.5 * (y + U(pi, pj))); };
    AutoBT out;
    const RealField v = detail::march_xt(g, base, seed, rx, rt, true);
    const RealField other = detail::march_xt(g, base, seed, rx, rt, false);
    double first_line = 0.0;
    for (int i = 0; i < g.nu; ++i)
        first_line = std::max(first_line, std::abs(std::sin(0.5 * (v(i, base.j) - u.u(i, base.j)))));
    for (int j = 0; j < g.nv; ++j)
        first_line = std::max(first_line, std::abs(std::sin(0.5 * (v(base.i, j) + u.u(base.i, j)))));
    out.degenerate = first_line < 1e-14;
    if (out.degenerate) out.report.warnings.push_back("degenerate branch: transform right sides vanish on the first lines");
    out.u.u = v;
    out.u.u_x = RealField(g);
    out.u.u_t = RealField(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        out.u.u_x[k] = -u.u_x[k] + 2.0 * a * std::sin(0.5 * (v[k] - u.u[k]));
        out.u.u_t[k] = u.u_t[k] + (2.0 / a) * std::sin(0.5 * (v[k] + u.u[k]));
    }
    out.u.residual = RealField(g);
    const Mask inner = interior_mask(g, margin);
    out.report.add(measure("input_sine_gordon", u.residual, &inner, input_tol));
    out.report.add(measure("cross_order", map([](double p, double q) { return std::abs(p - q); }, v, other), nullptr,
                           0.0, Bound::info));
    out.report.merge(sg_residual(v, SGForm::light_cone, order, output_tol, margin, &out.u.residual));
    return out;
}

}  // namespace solsurf
