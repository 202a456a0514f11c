#pragma once

#include <cmath>
#include <vector>

#include "solsurf/weierstrass/sigma.hpp"

namespace solsurf {

/// Spinor pair with jets; p = |psi1|^2 + |psi2|^2 node-wise.
struct SpinorPair {
    ComplexJet psi1, psi2;
    RealField p;
    Mask valid;
    std::vector<Node> branch_points;

    const Grid2& grid() const { return psi1.grid(); }
};

namespace detail {

inline SpinorPair assemble(ComplexJet a, ComplexJet b) {
    check_same_grid(a.grid(), b.grid());
    const Grid2& g = a.grid();
    SpinorPair s{std::move(a), std::move(b), RealField(g, 0.0), Mask(g, 0), {}};
    s.valid = mask_and(s.psi1.valid, s.psi2.valid);
    for (std::size_t k = 0; k < g.size(); ++k)
        s.p[k] = std::norm(s.psi1.f[k]) + std::norm(s.psi2.f[k]);
    return s;
}

inline void require_positive(const RealField& H) {
    for (double h : H.values) require(h > 0.0, "mean curvature must be positive for the spinor map");
}

inline void require_on_shell(const SigmaField& s, const MeanCurvatureField* H, double sigma_tol) {
    require(s.base.i >= 0, "d rho vanishes at every node");
    const ResidualReport r = sigma_residual(s, H, sigma_tol, &s.spinor_ok);
    require(r.pass(), "rho is not a sigma-model solution (residual " + std::to_string(r.get("sigma").max) + ")");
}

}  // namespace detail

/// Spinor pair from sampled fields, derivatives by finite differences.
inline SpinorPair spinors_sampled(const ComplexField& psi1, const ComplexField& psi2, Order order = Order::second,
                                  const Mask* where = nullptr) {
    return detail::assemble(jet_fd(psi1, order, where), jet_fd(psi2, order, where));
}

/// Spinor pair from generic callables psi(x, y), exact derivatives.
template <class P1, class P2>
SpinorPair spinors_exact(const Grid2& g, P1 psi1, P2 psi2, const Mask& where) {
    return detail::assemble(jet_exact(g, psi1, where), jet_exact(g, psi2, where));
}

/// psi1 = eps rho sqrt(dbar rhobar)/(sqrt(H)(1+|rho|^2)),
/// psi2 = eps sqrt(d rho)/(sqrt(H)(1+|rho|^2)), with sqrt(dbar rhobar) the
/// conjugate of the tracked sqrt(d rho). Values from the rho jet, spinor
/// derivatives by finite differences away from recorded branch points.
inline SpinorPair rho_to_spinors(const SigmaField& s, const MeanCurvatureField* H = nullptr,
                                 Order order = Order::second, double sigma_tol = 1e-4) {
    const Grid2& g = s.grid();
    if (H) {
        check_same_grid(g, H->H.grid);
        detail::require_positive(H->H);
    }
    detail::require_on_shell(s, H, sigma_tol);
    ComplexField a(g, 0.0), b(g, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!s.spinor_ok[k]) continue;
        const cd rho = s.rho.f[k];
        const cd w = static_cast<double>(s.epsilon * s.branch[k]) * std::sqrt(s.rho.d[k]);
        const double n = std::sqrt(H ? H->H[k] : 1.0) * (1.0 + std::norm(rho));
        a[k] = rho * std::conj(w) / n;
        b[k] = w / n;
    }
    // stencils must not straddle the cut where the tracked root jumps
    Mask where = s.spinor_ok;
    for (const Node& n : s.branch_points)
        for (Node c : {n, Node{n.i + 1, n.j}, Node{n.i, n.j + 1}})
            if (g.contains(c.i, c.j)) where(c.i, c.j) = 0;
    SpinorPair out = spinors_sampled(a, b, order, &where);
    out.branch_points = s.branch_points;
    return out;
}

/// Same map with the analytic rho(x, y) and H(x, y) behind `s`; spinor
/// derivatives exact. The tracked branch sign is piecewise constant, so it
/// does not contribute to derivatives.
template <class R, class HF>
SpinorPair rho_to_spinors_exact(const SigmaField& s, R rho, HF h, double sigma_tol = 1e-4) {
    const Grid2& g = s.grid();
    const MeanCurvatureField mc = MeanCurvatureField::exact(g, h);
    detail::require_positive(mc.H);
    detail::require_on_shell(s, &mc, sigma_tol);
    const Field<int>* branch = &s.branch;
    const double eps = s.epsilon;
    auto sign = [branch, g, eps](auto x, auto y) {
        const int i = static_cast<int>(std::lround((std::real(primal(x)) - g.u_min) / g.hu()));
        const int j = static_cast<int>(std::lround((std::real(primal(y)) - g.v_min) / g.hv()));
        return eps * static_cast<double>((*branch)(i, j));
    };
    auto drho = d_dz(rho);
    auto root = [=](auto x, auto y) { return sqrt(drho(x, y)) * sign(x, y); };
    auto norm = [=](auto x, auto y) { return sqrt(h(x, y)) * (1.0 + rho(x, y) * cj(rho(x, y))); };
    auto psi1 = [=](auto x, auto y) { return rho(x, y) * cj(root(x, y)) / norm(x, y); };
    auto psi2 = [=](auto x, auto y) { return root(x, y) / norm(x, y); };
    SpinorPair out = spinors_exact(g, psi1, psi2, s.spinor_ok);
    out.branch_points = s.branch_points;
    return out;
}

/// rho = psi1 / conj(psi2); NaN where psi2 vanishes.
inline ComplexField rho_from_spinors(const SpinorPair& s) {
    return map(
        [](const cd& a, const cd& b) {
            return std::abs(b) > 0.0 ? a / std::conj(b) : cd(std::nan(""), std::nan(""));
        },
        s.psi1.f, s.psi2.f);
}

/// Residuals of d psi1 = p H psi2 and dbar psi2 = -p H psi1.
inline ResidualReport gw_residual(const SpinorPair& s, const MeanCurvatureField* H = nullptr, double tol = 1e-6,
                                  const Mask* mask = nullptr) {
    const Grid2& g = s.grid();
    ComplexField r1(g, 0.0), r2(g, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!s.valid[k]) continue;
        const double ph = s.p[k] * (H ? H->H[k] : 1.0);
        r1[k] = s.psi1.d[k] - ph * s.psi2.f[k];
        r2[k] = s.psi2.db[k] + ph * s.psi1.f[k];
    }
    const Mask m = mask ? mask_and(s.valid, *mask) : s.valid;
    ResidualReport r;
    r.add(measure_complex("gw_first", r1, m, tol));
    r.add(measure_complex("gw_second", r2, m, tol));
    return r;
}

/// J = conj(psi1) d psi2 - psi2 d conj(psi1).
inline ComplexField current(const SpinorPair& s) {
    ComplexField J(s.grid(), 0.0);
    for (std::size_t k = 0; k < J.size(); ++k)
        J[k] = std::conj(s.psi1.f[k]) * s.psi2.d[k] - s.psi2.f[k] * std::conj(s.psi1.db[k]);
    return J;
}

/// dbar J from the spinor jets.
inline cd current_dbar(const SpinorPair& s, std::size_t k) {
    const cd a = s.psi1.f[k], b = s.psi2.f[k];
    return std::conj(s.psi1.d[k]) * s.psi2.d[k] + std::conj(a) * s.psi2.ddb[k] -
           s.psi2.db[k] * std::conj(s.psi1.db[k]) - b * std::conj(s.psi1.ddb[k]);
}

/// The three quadratic conservation laws d(psi1^2) + dbar(psi2^2),
/// dbar(conj psi1^2) + d(conj psi2^2) and d(psi1 conj psi2) - dbar(conj psi1 psi2),
/// the last being closedness of the X3 integrand. The printed "+" form of the
/// third law equals 2 p H (|psi2|^2 - |psi1|^2) on shell and is info only.
/// Conservation of the current is checked as well.
/// For nonconstant H the conserved quantity is J plus the dbar-antiderivative
/// of p^2 d H, whose dbar is dbar J + p^2 d H; plain dbar J is then info only.
inline ResidualReport conservation_residual(const SpinorPair& s, const MeanCurvatureField* H = nullptr,
                                            double tol = 1e-6, const Mask* mask = nullptr) {
    const Grid2& g = s.grid();
    const bool forced = H && !H->constant;
    ComplexField l1(g, 0.0), l2(g, 0.0), l3(g, 0.0), l3p(g, 0.0), dj(g, 0.0), daj(g, 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!s.valid[k]) continue;
        const WJet a = s.psi1.at(k), b = s.psi2.at(k), ac = conj(a), bc = conj(b);
        l1[k] = (a * a).d + (b * b).db;
        l2[k] = (ac * ac).db + (bc * bc).d;
        l3[k] = (a * bc).d - (ac * b).db;
        l3p[k] = (a * bc).d + (ac * b).db;
        dj[k] = current_dbar(s, k);
        if (forced) daj[k] = dj[k] + s.p[k] * s.p[k] * H->H[k] * H->dlnH[k];
    }
    const Mask m = mask ? mask_and(s.valid, *mask) : s.valid;
    ResidualReport r;
    r.add(measure_complex("law_1", l1, m, tol));
    r.add(measure_complex("law_2", l2, m, tol));
    r.add(measure_complex("law_3", l3, m, tol));
    r.add(measure_complex("law_3_printed", l3p, m, tol, Bound::info));
    if (forced) {
        r.add(measure_complex("current", dj, m, tol, Bound::info));
        r.add(measure_complex("augmented_current", daj, m, tol));
    } else {
        r.add(measure_complex("current", dj, m, tol));
    }
    return r;
}

/// Right side of the p equation: |J|^2/p^2 - H^2 p^2 by default; the printed
/// variant uses |J| in place of |J|^2.
enum class PVariant { squared, printed };

/// Residual of d dbar ln p = |J|^2/p^2 - H^2 p^2; p = 0 nodes excluded.
inline ResidualReport p_equation_residual(const SpinorPair& s, const MeanCurvatureField* H = nullptr,
                                          double tol = 1e-4, const Mask* mask = nullptr,
                                          PVariant variant = PVariant::squared) {
    const Grid2& g = s.grid();
    RealField res(g, 0.0);
    Mask m = mask ? mask_and(s.valid, *mask) : s.valid;
    std::size_t zero_p = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!m[k]) continue;
        if (!(s.p[k] > 0.0)) {
            m[k] = 0;
            ++zero_p;
            continue;
        }
        const WJet a = s.psi1.at(k), b = s.psi2.at(k);
        const WJet p = a * conj(a) + b * conj(b);
        const double pv = s.p[k], h = H ? H->H[k] : 1.0;
        const cd J = std::conj(a.v) * b.d - b.v * std::conj(a.db);
        const double j = variant == PVariant::squared ? std::norm(J) : std::abs(J);
        res[k] = std::abs(log_ddb(p) - (j / (pv * pv) - h * h * pv * pv));
    }
    ResidualReport r;
    Check& c = r.add(measure("p_equation", res, &m, tol));
    if (zero_p) c.note = std::to_string(zero_p) + " nodes with p = 0 excluded";
    return r;
}

/// K = -d dbar ln p / p^2, the curvature of the metric 4 p^2 |dz|^2 that the
/// factor-2 inducing produces; scale = 1/4 for the classical normalization.
inline RealField curvature_from_p(const SpinorPair& s, double scale = 1.0) {
    RealField K(s.grid(), std::nan(""));
    for (std::size_t k = 0; k < K.size(); ++k) {
        if (!s.valid[k] || !(s.p[k] > 0.0)) continue;
        const WJet a = s.psi1.at(k), b = s.psi2.at(k);
        const WJet p = a * conj(a) + b * conj(b);
        K[k] = -std::real(log_ddb(p)) / (scale * s.p[k] * s.p[k]);
    }
    return K;
}

}  // namespace solsurf
