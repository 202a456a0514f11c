#pragma once

#include <algorithm>
#include <functional>
#include <type_traits>
#include <utility>

#include "solsurf/frames/algebra.hpp"
#include "solsurf/numerics/ode.hpp"
#include "solsurf/numerics/report.hpp"

namespace solsurf {

/// Which linear system the pair (U, V) belongs to.
enum class Orientation {
    uv,  ///< Phi_u = U Phi, Phi_v = V Phi; residual U_v - V_u + [U, V]
    tx   ///< Phi_t = U Phi, Phi_x = V Phi with x along the grid's u axis and
         ///< t along v; residual U_x - V_t + [U, V]
};

template <class M>
struct ZeroCurvatureResult {
    ResidualReport report;
    MatrixField<M> residual;
    RealField norm;  ///< node-wise norm of the residual
};

/// Zero-curvature residual of a connection pair, with derivatives by finite
/// differences. Report entry "zero_curvature".
template <class M>
ZeroCurvatureResult<M> zero_curvature_residual(const MatrixField<M>& U, const MatrixField<M>& V,
                                               Orientation o = Orientation::uv, Order order = Order::second,
                                               double tol = 1e-5, const Mask* mask = nullptr) {
    check_same_grid(U.grid, V.grid);
    require(U.tag == V.tag, "algebra tag mismatch");
    const Dir du = o == Orientation::uv ? Dir::v : Dir::u;  // derivative applied to U
    const Dir dv = o == Orientation::uv ? Dir::u : Dir::v;  // derivative applied to V
    MatrixField<M> Ud = diff(U, du, order), Vd = diff(V, dv, order);
    ZeroCurvatureResult<M> out{{}, MatrixField<M>(U.grid, U.tag, Holds::plain), RealField(U.grid)};
    for (std::size_t k = 0; k < U.size(); ++k) {
        out.residual[k] = Ud[k] - Vd[k] + commutator(U[k], V[k]);
        out.norm[k] = algebra_norm(out.residual[k], U.tag);
    }
    out.report.add(measure("zero_curvature", out.norm, mask, tol));
    return out;
}

template <class M>
struct FrameResult {
    MatrixField<M> phi;
    ResidualReport report;  ///< "group_defect", "cross_order" (+ warnings)
};

namespace detail {

template <class M>
std::vector<M> row(const MatrixField<M>& f, int j) {
    std::vector<M> r(f.grid.nu);
    for (int i = 0; i < f.grid.nu; ++i) r[i] = f(i, j);
    return r;
}

template <class M>
std::vector<M> column(const MatrixField<M>& f, int i) {
    std::vector<M> c(f.grid.nv);
    for (int j = 0; j < f.grid.nv; ++j) c[j] = f(i, j);
    return c;
}

// Integrates X_u = P(X), X_v = Q(X) over the grid from the base node:
// along the base row first, then every column (row_first), or transposed.
template <class Y, class StepU, class StepV>
Field<Y> sweep(const Grid2& g, Node base, const Y& y0, bool row_first, StepU&& along_u, StepV&& along_v) {
    Field<Y> out(g);
    if (row_first) {
        std::vector<Y> r = along_u(base.j, base.i, y0);
        for (int i = 0; i < g.nu; ++i) {
            std::vector<Y> c = along_v(i, base.j, r[i]);
            for (int j = 0; j < g.nv; ++j) out(i, j) = c[j];
        }
    } else {
        std::vector<Y> c = along_v(base.i, base.j, y0);
        for (int j = 0; j < g.nv; ++j) {
            std::vector<Y> r = along_u(j, base.i, c[j]);
            for (int i = 0; i < g.nu; ++i) out(i, j) = r[i];
        }
    }
    return out;
}

}  // namespace detail

/// Integrates Phi_u = U Phi along the base row, then Phi_v = V Phi along
/// every column (RK4, cubic midpoints). The transposed order is integrated as
/// well; the maximum node discrepancy is reported as "cross_order".
template <class M>
FrameResult<M> integrate_frame(const MatrixField<M>& U, const MatrixField<M>& V, const std::type_identity_t<M>& initial,
                               Node base = {0, 0}, double group_tol = 1e-4, double cross_tol = 1e-5) {
    check_same_grid(U.grid, V.grid);
    require(U.tag == V.tag, "algebra tag mismatch");
    const Grid2& g = U.grid;
    require(g.contains(base.i, base.j), "base node outside grid");
    auto along_u = [&](int j, int i0, const M& y0) { return integrate_line(detail::row(U, j), y0, g.hu(), i0); };
    auto along_v = [&](int i, int j0, const M& y0) { return integrate_line(detail::column(V, i), y0, g.hv(), j0); };
    Field<M> a = detail::sweep(g, base, initial, true, along_u, along_v);
    Field<M> b = detail::sweep(g, base, initial, false, along_u, along_v);

    FrameResult<M> out{MatrixField<M>(g, U.tag, Holds::group), {}};
    RealField drift(g), cross(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        out.phi[k] = a[k];
        drift[k] = group_defect(a[k], U.tag);
        cross[k] = (a[k] - b[k]).norm();
    }
    Check gd = measure("group_defect", drift, nullptr, group_tol);
    if (!gd.pass) out.report.warnings.push_back("frame drifted from the group beyond tolerance");
    gd.bound = Bound::info;
    out.report.add(gd);
    out.report.add(measure("cross_order", cross, nullptr, cross_tol));
    return out;
}

template <class M>
struct ImmersionResult {
    Field<M> F;
    ResidualReport report;  ///< "cross_order"
};

/// Integrates F_u = Phi^-1 A Phi, F_v = Phi^-1 B Phi from F(base) = 0 with the
/// same two-stage strategy as integrate_frame; reports the cross-order gap.
template <class M>
ImmersionResult<M> integrate_immersion(const MatrixField<M>& phi, const MatrixField<M>& A, const MatrixField<M>& B,
                                       Node base = {0, 0}, double cross_tol = 1e-5) {
    check_same_grid(phi.grid, A.grid);
    check_same_grid(phi.grid, B.grid);
    const Grid2& g = phi.grid;
    std::vector<M> P(g.size()), Q(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const M inv = phi[k].inverse();
        P[k] = inv * A[k] * phi[k];
        Q[k] = inv * B[k] * phi[k];
    }
    auto line = [&](const std::vector<M>& vals, std::size_t start, std::size_t stride, int n, int from, double h,
                    const M& y0) {
        std::vector<M> s(n);
        for (int k = 0; k < n; ++k) s[k] = vals[start + k * stride];
        return rk4_march(n, from, h, y0, [&](double pos, const M&) -> M { return sample_at(s, pos); });
    };
    auto along_u = [&](int j, int i0, const M& y0) {
        return line(P, g.index(0, j), 1, g.nu, i0, g.hu(), y0);
    };
    auto along_v = [&](int i, int j0, const M& y0) {
        return line(Q, g.index(i, 0), static_cast<std::size_t>(g.nu), g.nv, j0, g.hv(), y0);
    };
    const M zero = M::Zero();
    Field<M> a = detail::sweep(g, base, zero, true, along_u, along_v);
    Field<M> b = detail::sweep(g, base, zero, false, along_u, along_v);
    RealField cross(g);
    for (std::size_t k = 0; k < g.size(); ++k) cross[k] = (a[k] - b[k]).norm();
    ImmersionResult<M> out{a, {}};
    out.report.add(measure("cross_order", cross, nullptr, cross_tol));
    return out;
}

/// dPhi/dlambda by a central difference over the spectral parameter: the
/// frame is re-integrated at lambda +- step. lax(lambda) returns {U, V}.
template <class M, class Lax>
MatrixField<M> dphi_dlambda(Lax&& lax, double lambda, const M& initial, Node base = {0, 0}, double step = 1e-4) {
    auto [Up, Vp] = lax(lambda + step);
    auto [Um, Vm] = lax(lambda - step);
    FrameResult<M> p = integrate_frame(Up, Vp, initial, base);
    FrameResult<M> m = integrate_frame(Um, Vm, initial, base);
    MatrixField<M> out(Up.grid, Up.tag, Holds::plain);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (p.phi[k] - m.phi[k]) / (2.0 * step);
    return out;
}

/// Coefficients of the general symmetry-generated connection.
template <class M>
struct SymCoefficients {
    double a1 = 0, a2 = 0, a3 = 0, a4 = 0, a5 = 0;
    M M0 = M::Zero();
};

/// A and B of the five-parameter family built from U, V:
/// A = a1 U_u + a2 U_v + a3 U_lambda + a4 (u U)_u + a5 v U_v + [U, M],
/// B = a1 V_u + a2 V_v + a3 V_lambda + a4 u V_u + a5 (v V)_v + [V, M].
/// lambda-derivatives by central differences with the given step.
template <class M, class Lax>
std::pair<MatrixField<M>, MatrixField<M>> sym_connection(Lax&& lax, double lambda, const SymCoefficients<M>& c,
                                                         Order order = Order::second, double step = 1e-4) {
    auto [U, V] = lax(lambda);
    const Grid2& g = U.grid;
    MatrixField<M> Uu = diff(U, Dir::u, order), Uv = diff(U, Dir::v, order);
    MatrixField<M> Vu = diff(V, Dir::u, order), Vv = diff(V, Dir::v, order);
    MatrixField<M> Ul(g, U.tag, Holds::plain), Vl(g, U.tag, Holds::plain);
    if (c.a3 != 0) {
        auto [Up, Vp] = lax(lambda + step);
        auto [Um, Vm] = lax(lambda - step);
        for (std::size_t k = 0; k < g.size(); ++k) {
            Ul[k] = (Up[k] - Um[k]) / (2.0 * step);
            Vl[k] = (Vp[k] - Vm[k]) / (2.0 * step);
        }
    }
    MatrixField<M> A(g, U.tag, Holds::plain), B(g, U.tag, Holds::plain);
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const std::size_t k = g.index(i, j);
            const double u = g.u(i), v = g.v(j);
            A[k] = c.a1 * Uu[k] + c.a2 * Uv[k] + c.a3 * Ul[k] + c.a4 * (U[k] + u * Uu[k]) + c.a5 * v * Uv[k] +
                   commutator(U[k], c.M0);
            B[k] = c.a1 * Vu[k] + c.a2 * Vv[k] + c.a3 * Vl[k] + c.a4 * u * Vu[k] + c.a5 * (V[k] + v * Vv[k]) +
                   commutator(V[k], c.M0);
        }
    return {A, B};
}

/// Closed-form immersion of the five-parameter family:
/// F = a1 Phi^-1 U Phi + a2 Phi^-1 V Phi + a3 Phi^-1 Phi_lambda + a4 u Phi^-1 U Phi
///     + a5 v Phi^-1 V Phi - Phi^-1 M Phi.
template <class M>
Field<M> sym_immersion_closed_form(const MatrixField<M>& phi, const MatrixField<M>& U, const MatrixField<M>& V,
                                   const MatrixField<M>& dphi_dl, const SymCoefficients<M>& c) {
    const Grid2& g = phi.grid;
    Field<M> F(g);
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const std::size_t k = g.index(i, j);
            const M inv = phi[k].inverse();
            const M adU = inv * U[k] * phi[k], adV = inv * V[k] * phi[k];
            F[k] = c.a1 * adU + c.a2 * adV + c.a3 * inv * dphi_dl[k] + c.a4 * g.u(i) * adU + c.a5 * g.v(j) * adV -
                   inv * c.M0 * phi[k];
        }
    return F;
}

}  // namespace solsurf
