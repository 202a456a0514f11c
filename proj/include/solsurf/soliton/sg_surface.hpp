#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <set>

#include "solsurf/frames/zero_curvature.hpp"
#include "solsurf/geometry/surface.hpp"
#include "solsurf/numerics/dual.hpp"

namespace solsurf {

/// Light-cone kink of theta_uv = sin theta: 4 atan(exp(a u + v/a + c)).
struct Kink {
    double a = 1.0;
    double c = 0.0;
    template <class T>
    T operator()(T u, T v) const {
        using std::atan;
        using std::exp;
        return atan(exp(u * a + v * (1.0 / a) + c)) * 4.0;
    }
};

/// Sine-Gordon angle with its first derivatives and the residual of
/// theta_uv = sin theta, plus the SU(2) Lax pair
/// U = (i/2)(-theta_u s1 + lambda s3), V = (i/(2 lambda))(sin theta s2 - cos theta s3).
struct SGLaxData {
    RealField theta, theta_u, theta_v;
    RealField residual;  ///< |theta_uv - sin theta|
    double lambda = 1.0;

    Mat2c U(std::size_t k) const { return U_of(theta_u[k], lambda); }
    Mat2c V(std::size_t k) const { return V_of(theta[k], lambda); }

    static Mat2c U_of(double tu, double lambda) {
        const std::complex<double> i(0.0, 1.0);
        return 0.5 * i * (-tu * pauli().s1 + lambda * pauli().s3);
    }
    static Mat2c V_of(double th, double lambda) {
        const std::complex<double> i(0.0, 1.0);
        return (0.5 / lambda) * i * (std::sin(th) * pauli().s2 - std::cos(th) * pauli().s3);
    }

    MatrixField2 U_field() const {
        MatrixField2 f(theta.grid, AlgebraTag::su2);
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = U(k);
        f.validate();
        return f;
    }
    MatrixField2 V_field() const {
        MatrixField2 f(theta.grid, AlgebraTag::su2);
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = V(k);
        f.validate();
        return f;
    }
    double max_residual() const {
        double m = 0.0;
        for (double x : residual.values) m = std::max(m, x);
        return m;
    }
};

/// Lax data from a generic callable theta(u, v); derivatives exact.
template <class Th>
SGLaxData sg_lax_data(const Grid2& g, Th theta, double lambda) {
    require(lambda != 0.0, "lambda must be nonzero");
    SGLaxData d;
    d.lambda = lambda;
    d.theta = sample(g, [&](double u, double v) { return theta(u, v); });
    d.theta_u = sample(g, [&](double u, double v) { return d_du(theta)(u, v); });
    d.theta_v = sample(g, [&](double u, double v) { return d_dv(theta)(u, v); });
    d.residual = sample(g, [&](double u, double v) { return std::abs(d_dv(d_du(theta))(u, v) - std::sin(theta(u, v))); });
    return d;
}

/// Lax data from a sampled angle; derivatives by finite differences.
inline SGLaxData sg_lax_data(const RealField& theta, double lambda, Order order = Order::second) {
    require(lambda != 0.0, "lambda must be nonzero");
    SGLaxData d;
    d.lambda = lambda;
    d.theta = theta;
    d.theta_u = diff(theta, Dir::u, order);
    d.theta_v = diff(theta, Dir::v, order);
    const RealField tuv = diff(d.theta_u, Dir::v, order);
    d.residual = map([](double a, double t) { return std::abs(a - std::sin(t)); }, tuv, theta);
    return d;
}

/// Symmetry phi of the sine-Gordon equation: phi_uv = phi cos theta.
struct SymmetryField {
    RealField phi, phi_u, phi_v;
    RealField residual;  ///< |phi_uv - phi cos theta|

    double max_residual(const Mask* m = nullptr) const { return measure("", residual, m).max; }
};

/// From generic callables phi(u, v) and theta(u, v); derivatives exact.
template <class Ph, class Th>
SymmetryField symmetry_field(const Grid2& g, Ph phi, Th theta) {
    SymmetryField s;
    s.phi = sample(g, [&](double u, double v) { return phi(u, v); });
    s.phi_u = sample(g, [&](double u, double v) { return d_du(phi)(u, v); });
    s.phi_v = sample(g, [&](double u, double v) { return d_dv(phi)(u, v); });
    s.residual = sample(g, [&](double u, double v) {
        return std::abs(d_dv(d_du(phi))(u, v) - phi(u, v) * std::cos(theta(u, v)));
    });
    return s;
}

inline SymmetryField symmetry_field(const RealField& phi, const RealField& theta, Order order = Order::second) {
    SymmetryField s;
    s.phi = phi;
    s.phi_u = diff(phi, Dir::u, order);
    s.phi_v = diff(phi, Dir::v, order);
    const RealField puv = diff(s.phi_u, Dir::v, order);
    s.residual = map([](double a, double p, double t) { return std::abs(a - p * std::cos(t)); }, puv, phi, theta);
    return s;
}

inline SymmetryField scaled(SymmetryField s, double c) {
    for (auto* f : {&s.phi, &s.phi_u, &s.phi_v, &s.residual})
        for (double& x : f->values) x *= (f == &s.residual ? std::abs(c) : c);
    return s;
}

/// Sign of the phi_u term in A. The linearised Lax pair (A, B) = (U' phi, V' phi)
/// has A = -(i/2) phi_u s1; the opposite sign does not satisfy the
/// compatibility condition and is kept for diagnostics.
enum class ATerm { linearised, flipped };

/// Connection of the symmetry surface:
/// A = -(i/2) phi_u s1, B = (i/(2 lambda)) phi (cos theta s2 + sin theta s3).
inline std::pair<MatrixField2, MatrixField2> sg_surface_connection(const SGLaxData& d, const SymmetryField& s,
                                                                   ATerm a_term = ATerm::linearised) {
    const std::complex<double> i(0.0, 1.0);
    const double sa = a_term == ATerm::linearised ? -1.0 : 1.0;
    MatrixField2 A(d.theta.grid, AlgebraTag::su2), B(d.theta.grid, AlgebraTag::su2);
    for (std::size_t k = 0; k < A.size(); ++k) {
        A[k] = sa * 0.5 * i * s.phi_u[k] * pauli().s1;
        B[k] = (0.5 / d.lambda) * i * s.phi[k] * (std::cos(d.theta[k]) * pauli().s2 + std::sin(d.theta[k]) * pauli().s3);
    }
    return {A, B};
}

/// Compatibility residual A_v - B_u + [A, V] + [U, B] of a surface connection.
inline ZeroCurvatureResult<Mat2c> connection_residual(const MatrixField2& U, const MatrixField2& V,
                                                      const MatrixField2& A, const MatrixField2& B,
                                                      Order order = Order::second, double tol = 1e-5,
                                                      const Mask* mask = nullptr) {
    MatrixField2 Av = diff(A, Dir::v, order), Bu = diff(B, Dir::u, order);
    ZeroCurvatureResult<Mat2c> out{{}, MatrixField2(A.grid, A.tag, Holds::plain), RealField(A.grid)};
    for (std::size_t k = 0; k < A.size(); ++k) {
        out.residual[k] = Av[k] - Bu[k] + commutator(A[k], V[k]) + commutator(U[k], B[k]);
        out.norm[k] = algebra_norm(out.residual[k], A.tag);
    }
    out.report.add(measure("connection_compatibility", out.norm, mask, tol));
    return out;
}

/// Closed-form fundamental forms of the symmetry surface:
/// I = 1/4 (phi_u^2 du^2 + phi^2/lambda^2 dv^2),
/// II = 1/2 (lambda phi_u sin theta du^2 + phi theta_v/lambda dv^2).
/// K = 4 lambda^2 theta_v sin theta/(phi phi_u). H is stored in the half-trace
/// convention, i.e. lambda (phi_u theta_v + phi sin theta)/(phi phi_u), which
/// is half of the trace-convention value.
inline FormField sg_closed_forms(const SGLaxData& d, const SymmetryField& s) {
    FormField ff(d.theta.grid);
    const double l = d.lambda;
    for (std::size_t k = 0; k < ff.E.size(); ++k) {
        const double p = s.phi[k], pu = s.phi_u[k], th = d.theta[k], tv = d.theta_v[k];
        ff.E[k] = 0.25 * pu * pu;
        ff.F[k] = 0.0;
        ff.G[k] = 0.25 * p * p / (l * l);
        ff.e[k] = 0.5 * l * pu * std::sin(th);
        ff.f[k] = 0.0;
        ff.g[k] = 0.5 * p * tv / l;
    }
    ff.derive_curvatures();
    return ff;
}

/// Trace-convention mean curvature of the closed form; equals 2 H_half.
inline RealField sg_closed_mean_curvature_trace(const SGLaxData& d, const SymmetryField& s) {
    RealField h(d.theta.grid);
    for (std::size_t k = 0; k < h.size(); ++k) {
        const double p = s.phi[k], pu = s.phi_u[k];
        h[k] = 2.0 * d.lambda * (pu * d.theta_v[k] + p * std::sin(d.theta[k])) / (p * pu);
    }
    return h;
}

struct SGSurface {
    MatrixField2 frame;      ///< Phi
    Field<Mat2c> F_matrix;   ///< F in su(2)
    Immersion3 F;            ///< coordinates F = -i F_j s_j
    Field<Vec3> n_frame;     ///< smooth unit normal from Phi^-1 [A/phi_u, B/phi] Phi
    FormField closed;        ///< closed-form I, II, K, H (half-trace H)
    ResidualReport report;   ///< integration diagnostics and input residuals
};

/// Builds the symmetry surface: integrates the frame Phi_u = U Phi,
/// Phi_v = V Phi from Phi(base) = initial, then F_u = Phi^-1 A Phi,
/// F_v = Phi^-1 B Phi from F(base) = 0.
inline SGSurface sg_surface(const SGLaxData& d, const SymmetryField& s, Node base = {0, 0},
                            const Mat2c& initial = Mat2c::Identity(), ATerm a_term = ATerm::linearised,
                            double input_tol = 1e-4) {
    const Grid2& g = d.theta.grid;
    check_same_grid(g, s.phi.grid);
    SGSurface out;
    Check sg = measure("input_sine_gordon", d.residual, nullptr, input_tol);
    Check sy = measure("input_symmetry", s.residual, nullptr, input_tol);
    out.report.add(sg);
    out.report.add(sy);
    const MatrixField2 U = d.U_field(), V = d.V_field();
    FrameResult<Mat2c> fr = integrate_frame(U, V, initial, base);
    out.report.merge(fr.report, "frame_");
    out.frame = fr.phi;
    auto [A, B] = sg_surface_connection(d, s, a_term);
    ImmersionResult<Mat2c> im = integrate_immersion(out.frame, A, B, base);
    out.report.merge(im.report, "immersion_");
    out.F_matrix = im.F;
    out.F = map([](const Mat2c& m) { return su2_coords(m); }, im.F);
    // A/phi_u and B/phi are smooth even where phi_u or phi vanish
    const std::complex<double> i(0.0, 1.0);
    const double sa = a_term == ATerm::linearised ? -1.0 : 1.0;
    out.n_frame = Field<Vec3>(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Mat2c a = sa * 0.5 * i * pauli().s1;
        const Mat2c b = (0.5 / d.lambda) * i * (std::cos(d.theta[k]) * pauli().s2 + std::sin(d.theta[k]) * pauli().s3);
        const Mat2c inv = out.frame[k].inverse();
        out.n_frame[k] = su2_coords(inv * commutator(a, b) * out.frame[k]).normalized();
    }
    out.closed = sg_closed_forms(d, s);
    return out;
}

/// Nodes where the closed forms are regular: |phi phi_u| above `min_pp`,
/// eroded by two stencil radii and kept `margin` nodes inside the boundary.
inline Mask sg_regular_mask(const SymmetryField& s, Order order, int margin, double min_pp) {
    Mask m(s.phi.grid, 1);
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = std::abs(s.phi[k] * s.phi_u[k]) >= min_pp;
    return mask_and(erode(m, 2 * stencil_radius(static_cast<int>(order))), interior_mask(s.phi.grid, margin));
}

/// Relative error |a - b| / max(|b|, floor_frac * max_mask |b|).
inline RealField relative_error(const RealField& a, const RealField& b, const Mask& m, double floor_frac) {
    double scale = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k)
        if (m[k] && std::isfinite(b[k])) scale = std::max(scale, std::abs(b[k]));
    const double floor = std::max(floor_frac * scale, 1e-300);
    return map([floor](double x, double y) { return std::abs(x - y) / std::max(std::abs(y), floor); }, a, b);
}

/// Cross-check of the integrated immersion against the closed forms. The
/// finite-difference forms use the normal -n_frame, for which the second form
/// matches the closed expression; H is compared in the half-trace convention.
/// Entries rel_E ... rel_g, rel_K, rel_H.
inline ResidualReport compare_closed_forms(const SGSurface& surf, const SymmetryField& s, Order order = Order::fourth,
                                           int margin = 3, double tol = 1e-3, double min_pp = 1e-3,
                                           double floor_frac = 1e-3) {
    Field<Vec3> ref = map([](const Vec3& n) -> Vec3 { return -n; }, surf.n_frame);
    FormField fd = fundamental_forms_oriented(surf.F, ref, order);
    Mask m = mask_and(sg_regular_mask(s, order, margin, min_pp), fd.regular);
    ResidualReport rep;
    const FormField& c = surf.closed;
    rep.add(measure("rel_E", relative_error(fd.E, c.E, m, floor_frac), &m, tol));
    rep.add(measure("rel_G", relative_error(fd.G, c.G, m, floor_frac), &m, tol));
    rep.add(measure("rel_e", relative_error(fd.e, c.e, m, floor_frac), &m, tol));
    rep.add(measure("rel_g", relative_error(fd.g, c.g, m, floor_frac), &m, tol));
    rep.add(measure("rel_K", relative_error(fd.K, c.K, m, floor_frac), &m, tol));
    rep.add(measure("rel_H", relative_error(fd.H, c.H, m, floor_frac), &m, tol));
    // the off-diagonal entries vanish in closed form; measure them against the
    // larger diagonal entry of the same form
    const RealField sF = map([](double e, double g) { return std::max(std::abs(e), std::abs(g)); }, c.E, c.G);
    const RealField sf = map([](double e, double g) { return std::max(std::abs(e), std::abs(g)); }, c.e, c.g);
    const RealField zero(c.E.grid, 0.0);
    const RealField offF = map([](double x, double s) { return x + s; }, fd.F, sF);
    const RealField offf = map([](double x, double s) { return x + s; }, fd.f, sf);
    rep.add(measure("rel_F", relative_error(offF, sF, m, floor_frac), &m, tol));
    rep.add(measure("rel_f", relative_error(offf, sf, m, floor_frac), &m, tol));
    return rep;
}

/// Euler-characteristic report for the symmetry surface.
struct EulerReport {
    double formula_signed = 0.0;    ///< (lambda/2pi) int theta_v sin theta over the domain
    double formula_abs = 0.0;       ///< same with |theta_v sin theta|
    double boundary_form = 0.0;     ///< -(lambda/2pi) int [cos theta]_{v_min}^{v_max} du
    double fd_signed = 0.0;         ///< (1/2pi) int sqrt(g) K from the generated mesh (signed area element)
    double gauss_bonnet = 0.0;      ///< (1/2pi) sum of interior angle defects of the welded image mesh
    int welded_chi = 0;             ///< V - E + F of the welded image mesh
    double closure_gap = 0.0;       ///< image boundary length / image diameter
    double excluded_fraction = 0.0; ///< fraction of nodes left out of fd_signed
    ResidualReport report;          ///< "integrand_identity"
};

namespace detail {

// composite trapezoid weight of node (i, j)
inline double trap_weight(const Grid2& g, int i, int j) {
    const double wu = (i == 0 || i == g.nu - 1) ? 0.5 : 1.0;
    const double wv = (j == 0 || j == g.nv - 1) ? 0.5 : 1.0;
    return wu * wv * g.hu() * g.hv();
}

}  // namespace detail

/// Image mesh of a grid immersion with vertices closer than weld_tol merged.
struct WeldedMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> node_to_vertex;
};

inline WeldedMesh weld(const Immersion3& s, double weld_tol) {
    const Grid2& g = s.grid;
    WeldedMesh m;
    m.node_to_vertex.assign(g.size(), -1);
    // bucket by quantised position so welding stays linear time
    std::map<std::array<long long, 3>, std::vector<int>> buckets;
    auto key = [&](const Vec3& p) {
        return std::array<long long, 3>{std::llround(p[0] / weld_tol), std::llround(p[1] / weld_tol),
                                        std::llround(p[2] / weld_tol)};
    };
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Vec3& p = s[k];
        const auto c = key(p);
        int found = -1;
        for (long long dx = -1; dx <= 1 && found < 0; ++dx)
            for (long long dy = -1; dy <= 1 && found < 0; ++dy)
                for (long long dz = -1; dz <= 1 && found < 0; ++dz) {
                    auto it = buckets.find({c[0] + dx, c[1] + dy, c[2] + dz});
                    if (it == buckets.end()) continue;
                    for (int v : it->second)
                        if ((m.vertices[v] - p).norm() <= weld_tol) {
                            found = v;
                            break;
                        }
                }
        if (found < 0) {
            found = static_cast<int>(m.vertices.size());
            m.vertices.push_back(p);
            buckets[c].push_back(found);
        }
        m.node_to_vertex[k] = found;
    }
    for (int j = 0; j + 1 < g.nv; ++j)
        for (int i = 0; i + 1 < g.nu; ++i) {
            const int a = m.node_to_vertex[g.index(i, j)], b = m.node_to_vertex[g.index(i + 1, j)];
            const int c = m.node_to_vertex[g.index(i + 1, j + 1)], d = m.node_to_vertex[g.index(i, j + 1)];
            for (const auto& t : {std::array<int, 3>{a, b, c}, std::array<int, 3>{a, c, d}})
                if (t[0] != t[1] && t[1] != t[2] && t[0] != t[2]) m.triangles.push_back(t);
        }
    return m;
}

/// Euler characteristic estimates. The integrand identity
/// sqrt(g) K = lambda theta_v sin theta is checked with the signed area
/// element (F_u x F_v) . n_frame on `mask`-selected nodes.
inline EulerReport euler_characteristic(const SGSurface& surf, const SGLaxData& d, const SymmetryField& s,
                                        Order order = Order::fourth, int margin = 3, double tol = 1e-3,
                                        double min_pp = 1e-3) {
    const Grid2& g = d.theta.grid;
    const double l = d.lambda;
    EulerReport r;
    const double two_pi = 2.0 * std::numbers::pi;
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const std::size_t k = g.index(i, j);
            const double w = detail::trap_weight(g, i, j), x = d.theta_v[k] * std::sin(d.theta[k]);
            r.formula_signed += w * l * x;
            r.formula_abs += w * l * std::abs(x);
        }
    r.formula_signed /= two_pi;
    r.formula_abs /= two_pi;
    for (int i = 0; i < g.nu; ++i) {
        const double wu = (i == 0 || i == g.nu - 1) ? 0.5 * g.hu() : g.hu();
        r.boundary_form -= wu * (std::cos(d.theta(i, g.nv - 1)) - std::cos(d.theta(i, 0)));
    }
    r.boundary_form *= l / two_pi;

    // finite-difference integrand on the generated surface
    RealField Fu[3], Fv[3];
    for (int c = 0; c < 3; ++c) {
        const RealField x = component(surf.F, c);
        Fu[c] = diff(x, Dir::u, order);
        Fv[c] = diff(x, Dir::v, order);
    }
    FormField fd = fundamental_forms(surf.F, +1, order);
    Mask m = mask_and(sg_regular_mask(s, order, margin, min_pp), fd.regular);
    RealField gap(g, 0.0);
    std::size_t used = 0;
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const std::size_t k = g.index(i, j);
            if (!m[k]) continue;
            const Vec3 ru(Fu[0][k], Fu[1][k], Fu[2][k]), rv(Fv[0][k], Fv[1][k], Fv[2][k]);
            const double sqrt_g = ru.cross(rv).dot(surf.n_frame[k]);
            const double val = sqrt_g * fd.K[k];
            r.fd_signed += detail::trap_weight(g, i, j) * val;
            gap[k] = std::abs(val - l * d.theta_v[k] * std::sin(d.theta[k]));
            ++used;
        }
    r.fd_signed /= two_pi;
    r.excluded_fraction = 1.0 - static_cast<double>(used) / static_cast<double>(g.size());
    r.report.add(measure("integrand_identity", gap, &m, tol));
    if (r.excluded_fraction > 0.05)
        r.report.warnings.push_back("excluded area fraction above 5%: " + std::to_string(r.excluded_fraction));

    // image mesh: diameter, boundary length, welded combinatorics, angle defects
    double diam = 0.0;
    Vec3 lo = surf.F[0], hi = surf.F[0];
    for (const Vec3& p : surf.F.values) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    diam = (hi - lo).norm();
    double blen = 0.0;
    auto seg = [&](int i0, int j0, int i1, int j1) { blen += (surf.F(i1, j1) - surf.F(i0, j0)).norm(); };
    for (int i = 0; i + 1 < g.nu; ++i) {
        seg(i, 0, i + 1, 0);
        seg(i, g.nv - 1, i + 1, g.nv - 1);
    }
    for (int j = 0; j + 1 < g.nv; ++j) {
        seg(0, j, 0, j + 1);
        seg(g.nu - 1, j, g.nu - 1, j + 1);
    }
    r.closure_gap = diam > 0.0 ? blen / diam : 0.0;

    const WeldedMesh wm = weld(surf.F, 1e-3 * std::max(diam, 1e-12) / std::max(g.nu, g.nv));
    std::set<std::pair<int, int>> edges;
    std::vector<double> angle_sum(wm.vertices.size(), 0.0);
    std::map<std::pair<int, int>, int> edge_use;
    for (const auto& t : wm.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            edges.insert({a, b});
            ++edge_use[{a, b}];
            const Vec3 p = wm.vertices[t[e]], q = wm.vertices[t[(e + 1) % 3]], o = wm.vertices[t[(e + 2) % 3]];
            const Vec3 x = q - p, y = o - p;
            angle_sum[t[e]] += std::atan2(x.cross(y).norm(), x.dot(y));
        }
    }
    std::vector<char> on_boundary(wm.vertices.size(), 0);
    for (const auto& [e, n] : edge_use)
        if (n == 1) on_boundary[e.first] = on_boundary[e.second] = 1;
    double defect = 0.0;
    for (std::size_t v = 0; v < wm.vertices.size(); ++v)
        if (!on_boundary[v]) defect += two_pi - angle_sum[v];
    r.gauss_bonnet = defect / two_pi;
    r.welded_chi = static_cast<int>(wm.vertices.size()) - static_cast<int>(edges.size()) +
                   static_cast<int>(wm.triangles.size());
    return r;
}

}  // namespace solsurf
