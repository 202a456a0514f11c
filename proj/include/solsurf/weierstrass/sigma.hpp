#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "solsurf/numerics/contour.hpp"
#include "solsurf/numerics/matrix.hpp"
#include "solsurf/weierstrass/jets.hpp"

namespace solsurf {

/// Mean curvature function with d ln H. H must stay away from zero.
struct MeanCurvatureField {
    RealField H;
    ComplexField dlnH;  ///< d ln H = (d_x - i d_y) ln H / 2; dbar ln H is its conjugate
    bool constant = false;

    static void validate(const RealField& H, double eps_h) {
        for (double h : H.values) require(std::isfinite(h) && std::abs(h) >= eps_h, "mean curvature vanishes");
    }

    static MeanCurvatureField uniform(const Grid2& g, double h, double eps_h = 1e-8) {
        MeanCurvatureField m{RealField(g, h), ComplexField(g, 0.0), true};
        validate(m.H, eps_h);
        return m;
    }

    /// From a generic callable H(x, y) with exact derivatives.
    template <class F>
    static MeanCurvatureField exact(const Grid2& g, F h, double eps_h = 1e-8) {
        MeanCurvatureField m{RealField(g), ComplexField(g), false};
        auto dh = d_dz(h);
        for (int j = 0; j < g.nv; ++j)
            for (int i = 0; i < g.nu; ++i) {
                const cd x(g.u(i), 0.0), y(g.v(j), 0.0);
                m.H(i, j) = std::real(cd(h(x, y)));
                m.dlnH(i, j) = cd(dh(x, y)) / m.H(i, j);
            }
        validate(m.H, eps_h);
        return m;
    }

    static MeanCurvatureField sampled(const RealField& H, Order order = Order::second, double eps_h = 1e-8) {
        validate(H, eps_h);
        const RealField lnH = map([](double h) { return std::log(std::abs(h)); }, H);
        return {H, diff(to_complex(lnH), Dir::z, order), false};
    }
};

/// Sigma-model variable rho with its jet, the sign of sqrt(d rho) chosen per
/// node by continuity, and the overall sign epsilon of the spinors.
struct SigmaField {
    ComplexJet rho;
    int epsilon = 1;
    Field<int> branch;              ///< +1/-1 multiplying the principal sqrt(d rho); 0 where undefined
    Mask spinor_ok;                 ///< valid jet, d rho != 0, reachable from the branch base
    std::vector<Node> branch_points;  ///< first node of each adjacent pair where the tracked root jumps
    Node base;

    const Grid2& grid() const { return rho.grid(); }
};

namespace detail {

inline Node nearest_valid(const Mask& m, Node want) {
    const Grid2& g = m.grid;
    long best = -1;
    double bd = 0.0;
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            if (!m(i, j)) continue;
            const double d = std::hypot(i - want.i, j - want.j);
            if (best < 0 || d < bd) {
                best = static_cast<long>(g.index(i, j));
                bd = d;
            }
        }
    require(best >= 0, "no valid node");
    return {static_cast<int>(best % g.nu), static_cast<int>(best / g.nu)};
}

// Sign field for sqrt(d rho): principal root at the base (nonnegative real
// part), then each node takes the root closer to its tree parent.
inline void track_branch(SigmaField& s, Node base) {
    const Grid2& g = s.grid();
    s.spinor_ok = s.rho.valid;
    for (std::size_t k = 0; k < g.size(); ++k)
        if (!(std::abs(s.rho.d[k]) > 0.0)) s.spinor_ok[k] = 0;
    s.branch = Field<int>(g, 0);
    s.branch_points.clear();
    if (std::none_of(s.spinor_ok.values.begin(), s.spinor_ok.values.end(), [](auto v) { return v != 0; })) {
        s.base = {-1, -1};
        return;
    }
    s.base = nearest_valid(s.spinor_ok, base);
    const PathTree tree = PathTree::build(g, s.base, &s.spinor_ok);
    auto root = [&](std::size_t k) { return std::sqrt(s.rho.d[k]); };
    for (std::size_t k : tree.order) {
        if (tree.parent[k] < 0) {
            s.branch[k] = 1;
            continue;
        }
        const std::size_t p = static_cast<std::size_t>(tree.parent[k]);
        const cd prev = static_cast<double>(s.branch[p]) * root(p), w = root(k);
        s.branch[k] = std::abs(prev - w) <= std::abs(prev + w) ? 1 : -1;
    }
    for (std::size_t k = 0; k < g.size(); ++k)
        if (!tree.reached[k]) s.spinor_ok[k] = 0;
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const std::size_t a = g.index(i, j);
            if (!s.spinor_ok[a]) continue;
            for (Node n : {Node{i + 1, j}, Node{i, j + 1}}) {
                if (!g.contains(n.i, n.j) || !s.spinor_ok(n.i, n.j)) continue;
                const std::size_t b = g.index(n.i, n.j);
                const cd wa = static_cast<double>(s.branch[a]) * root(a);
                const cd wb = static_cast<double>(s.branch[b]) * root(b);
                if (std::abs(wa - wb) > std::abs(wa + wb)) {
                    s.branch_points.push_back({i, j});
                    break;
                }
            }
        }
}

inline Node grid_centre(const Grid2& g) { return {(g.nu - 1) / 2, (g.nv - 1) / 2}; }

}  // namespace detail

/// Sigma field from an analytic rho(x, y) with exact derivatives on `where`.
template <class R>
SigmaField sigma_exact(const Grid2& g, R rho, const Mask& where, int epsilon = 1, Node base = {-1, -1}) {
    require(epsilon == 1 || epsilon == -1, "epsilon must be +1 or -1");
    SigmaField s{jet_exact(g, rho, where), epsilon, {}, {}, {}, {}};
    detail::track_branch(s, base.i < 0 ? detail::grid_centre(g) : base);
    return s;
}

/// Sigma field from sampled rho with finite-difference derivatives.
inline SigmaField sigma_sampled(const ComplexField& rho, Order order = Order::second, const Mask* where = nullptr,
                                int epsilon = 1, Node base = {-1, -1}) {
    require(epsilon == 1 || epsilon == -1, "epsilon must be +1 or -1");
    SigmaField s{jet_fd(rho, order, where), epsilon, {}, {}, {}, {}};
    detail::track_branch(s, base.i < 0 ? detail::grid_centre(rho.grid) : base);
    return s;
}

/// Left sides f, fbar of the sigma-model system at one node, with the
/// optional mean-curvature forcing moved to the left.
struct SigmaLeft {
    cd f, fbar;
};

inline SigmaLeft sigma_left(const WJet& r, cd dlnH = 0.0) {
    const cd n = 1.0 + r.v * std::conj(r.v);
    const cd rb = std::conj(r.v), drb = std::conj(r.db), dbrb = std::conj(r.d);
    return {r.ddb - 2.0 * rb * r.d * r.db / n - std::conj(dlnH) * r.d,
            std::conj(r.ddb) - 2.0 * r.v * dbrb * drb / n - dlnH * dbrb};
}

/// Residuals of d dbar rho - 2 rhobar d rho dbar rho/(1+|rho|^2) = dbar(ln H) d rho
/// and of its conjugate equation. H = nullptr means constant H.
inline ResidualReport sigma_residual(const SigmaField& s, const MeanCurvatureField* H = nullptr, double tol = 1e-5,
                                     const Mask* mask = nullptr) {
    const Grid2& g = s.grid();
    if (H) check_same_grid(g, H->H.grid);
    ComplexField f(g), fb(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!s.rho.valid[k]) continue;
        const SigmaLeft l = sigma_left(s.rho.at(k), H ? H->dlnH[k] : cd(0.0));
        f[k] = l.f;
        fb[k] = l.fbar;
    }
    const Mask m = mask ? mask_and(s.rho.valid, *mask) : s.rho.valid;
    ResidualReport r;
    r.add(measure_complex("sigma", f, m, tol));
    r.add(measure_complex("sigma_conjugate", fb, m, tol));
    return r;
}

/// Spin matrix and d dbar of it, by the chain rule through the rho jet.
struct SpinField {
    Field<Mat2c> S, ddbS;
    Mask valid;
};

inline SpinField spin_matrix(const SigmaField& s) {
    const Grid2& g = s.grid();
    SpinField out{Field<Mat2c>(g, Mat2c::Zero()), Field<Mat2c>(g, Mat2c::Zero()), s.rho.valid};
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!s.rho.valid[k]) continue;
        const WJet r = s.rho.at(k), rb = conj(r);
        const WJet inv = reciprocal(1.0 + r * rb);
        const WJet e[4] = {(1.0 - r * rb) * inv, 2.0 * rb * inv, 2.0 * r * inv, (r * rb - 1.0) * inv};
        out.S[k] << e[0].v, e[1].v, e[2].v, e[3].v;
        out.ddbS[k] << e[0].ddb, e[1].ddb, e[2].ddb, e[3].ddb;
    }
    return out;
}

/// Sign variant of the two (2,2) entries of the forcing matrices.
enum class LLVariant { corrected, printed };

/// Forcing product R * Hm at one node.
inline Mat2c ll_forcing(const WJet& r, cd dlnH, LLVariant variant) {
    const cd rho = r.v, rb = std::conj(rho), n = 1.0 + rho * rb;
    const cd dr = r.d, dbrb = std::conj(r.d), dbl = std::conj(dlnH);
    const double sr = variant == LLVariant::corrected ? 1.0 : -1.0;
    const double sh = variant == LLVariant::corrected ? -1.0 : 1.0;
    Mat2c R, Hm;
    R << -rb * dr, rho * dbrb, dr, sr * rho * rho * dbrb;
    R *= 4.0 / (n * n);
    Hm << dbl, rb * dbl, dlnH, sh * dlnH / rho;
    return R * Hm;
}

/// Landau-Lifshitz residual max |[S, d dbar S]| for constant H, or
/// |[S, d dbar S] + R Hm| with the forcing matrices built from rho and H.
/// Also checks the commutator against its closed form in the sigma-model
/// left sides f, fbar: 4/(1+|rho|^2)^2 [[rhobar f - rho fbar, rhobar^2 f + fbar],
/// [-f - rho^2 fbar, rho fbar - rhobar f]]. The printed sign of the fbar terms
/// off the diagonal is kept as an info-only diagnostic.
inline ResidualReport ll_residual(const SigmaField& s, const MeanCurvatureField* H = nullptr, double tol = 1e-5,
                                  const Mask* mask = nullptr, LLVariant variant = LLVariant::corrected,
                                  double identity_tol = 1e-8, double min_rho = 1e-8) {
    const Grid2& g = s.grid();
    const bool forced = H && !H->constant;
    if (H) check_same_grid(g, H->H.grid);
    const SpinField sp = spin_matrix(s);
    Mask m = mask ? mask_and(s.rho.valid, *mask) : s.rho.valid;
    RealField res(g, 0.0), ident(g, 0.0), printed(g, 0.0), alg(g, 0.0);
    std::size_t small_rho = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!m[k]) continue;
        const WJet r = s.rho.at(k);
        const Mat2c& S = sp.S[k];
        const Mat2c C = S * sp.ddbS[k] - sp.ddbS[k] * S;
        alg[k] = std::max((S * S - Mat2c::Identity()).norm(), std::abs(S.trace()));
        // closed form in the unforced left sides
        const SigmaLeft l = sigma_left(r);
        const cd rho = r.v, rb = std::conj(rho);
        const double n = std::real(1.0 + rho * rb);
        Mat2c M, P;
        M << rb * l.f - rho * l.fbar, rb * rb * l.f + l.fbar, -rho * rho * l.fbar - l.f, rho * l.fbar - rb * l.f;
        P << rb * l.f - rho * l.fbar, rb * rb * l.f - l.fbar, rho * rho * l.fbar - l.f, rho * l.fbar - rb * l.f;
        M *= 4.0 / (n * n);
        P *= 4.0 / (n * n);
        ident[k] = (C - M).norm();
        printed[k] = (C - P).norm();
        if (!forced) {
            res[k] = C.norm();
        } else if (std::abs(rho) <= min_rho) {
            m[k] = 0;
            ++small_rho;
        } else {
            res[k] = (C + ll_forcing(r, H->dlnH[k], variant)).norm();
        }
    }
    ResidualReport rep;
    Check& c = rep.add(measure("landau_lifshitz", res, &m, tol));
    if (forced) c.note = small_rho ? std::to_string(small_rho) + " nodes with rho = 0 excluded" : "";
    rep.add(measure("closed_form", ident, &m, identity_tol));
    rep.add(measure("closed_form_printed", printed, &m, 0.0, Bound::info));
    rep.add(measure("spin_algebra", alg, &m, 1e-12));
    return rep;
}

/// rho = prod (z - a_j)/(zbar - conj a_j) with its pole configuration.
struct PoleConfig {
    std::vector<cd> poles;
    double r_excl = -1.0;  ///< exclusion radius; <= 0 selects 3h

    PoleProduct rho() const { return {poles}; }
    Mask mask(const Grid2& g) const { return pole_mask(g, poles, r_excl); }
};

/// H = 1 + amp tanh(x) and a matching rho = e^{i beta} tan(c (x + amp ln cosh x)).
/// With rho depending on x only the forced sigma model reduces to
/// phi'' = (ln H)' phi' for rho = tan(phi), so phi' = c H.
struct TanhCurvature {
    double amp = 0.25;

    template <class T>
    T operator()(T x, T y) const { return 1.0 + amp * tanh(x) + y * 0.0; }
};

struct TanhSigmaSolution {
    double amp = 0.25, c = 0.3, beta = 0.4;

    template <class T>
    T operator()(T x, T y) const {
        using std::cosh, std::log, std::tan;
        const cd phase = std::polar(1.0, beta);
        return phase * tan(c * (x + amp * log(cosh(x)))) + y * 0.0;
    }
};

}  // namespace solsurf
