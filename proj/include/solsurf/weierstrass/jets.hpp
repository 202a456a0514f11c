#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "solsurf/numerics/diff.hpp"
#include "solsurf/numerics/dual.hpp"
#include "solsurf/numerics/report.hpp"

namespace solsurf {

/// Value of a complex function at one point with d = d/dz, db = d/dzbar and
/// ddb = d dbar. Arithmetic propagates all four by the product and chain rules.
struct WJet {
    cd v{}, d{}, db{}, ddb{};

    static WJet constant(cd c) { return {c, 0.0, 0.0, 0.0}; }
};

inline WJet operator+(const WJet& a, const WJet& b) { return {a.v + b.v, a.d + b.d, a.db + b.db, a.ddb + b.ddb}; }
inline WJet operator-(const WJet& a, const WJet& b) { return {a.v - b.v, a.d - b.d, a.db - b.db, a.ddb - b.ddb}; }
inline WJet operator-(const WJet& a) { return {-a.v, -a.d, -a.db, -a.ddb}; }
inline WJet operator*(const WJet& a, const WJet& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d, a.db * b.v + a.v * b.db,
            a.ddb * b.v + a.d * b.db + a.db * b.d + a.v * b.ddb};
}
inline WJet operator*(cd s, const WJet& a) { return {s * a.v, s * a.d, s * a.db, s * a.ddb}; }
inline WJet operator*(const WJet& a, cd s) { return s * a; }
inline WJet operator+(cd s, const WJet& a) { return {s + a.v, a.d, a.db, a.ddb}; }
inline WJet operator+(const WJet& a, cd s) { return s + a; }
inline WJet operator-(cd s, const WJet& a) { return {s - a.v, -a.d, -a.db, -a.ddb}; }
inline WJet operator-(const WJet& a, cd s) { return {a.v - s, a.d, a.db, a.ddb}; }
inline WJet reciprocal(const WJet& g) {
    const cd g2 = g.v * g.v, g3 = g2 * g.v;
    return {1.0 / g.v, -g.d / g2, -g.db / g2, -g.ddb / g2 + 2.0 * g.d * g.db / g3};
}
inline WJet operator/(const WJet& a, const WJet& b) { return a * reciprocal(b); }
/// Complex conjugate: d(conj f) = conj(dbar f).
inline WJet conj(const WJet& a) { return {std::conj(a.v), std::conj(a.db), std::conj(a.d), std::conj(a.ddb)}; }
/// d dbar ln f = ddb/f - d db/f^2.
inline cd log_ddb(const WJet& f) { return f.ddb / f.v - f.d * f.db / (f.v * f.v); }

/// Complex field with its Wirtinger derivatives on a real-plane grid read as
/// z = u + i v. `valid` marks nodes where all four are trustworthy.
struct ComplexJet {
    ComplexField f, d, db, ddb;
    Mask valid;

    WJet at(std::size_t k) const { return {f[k], d[k], db[k], ddb[k]}; }
    const Grid2& grid() const { return f.grid; }
};

/// Evaluates a generic callable F(x, y) (x, y real coordinates carried as
/// complex scalars or nested duals over them) with exact derivatives at the
/// nodes of `where`; other nodes hold NaN.
template <class F>
ComplexJet jet_exact(const Grid2& g, F f, const Mask& where) {
    check_same_grid(g, where.grid);
    const cd nan(std::numeric_limits<double>::quiet_NaN(), 0.0);
    ComplexJet j{ComplexField(g, nan), ComplexField(g, nan), ComplexField(g, nan), ComplexField(g, nan), where};
    auto fd = d_dz(f);
    auto fdb = d_dzbar(f);
    auto fddb = d_dzdzbar(f);
    for (int b = 0; b < g.nv; ++b)
        for (int a = 0; a < g.nu; ++a) {
            if (!where(a, b)) continue;
            const cd x(g.u(a), 0.0), y(g.v(b), 0.0);
            const std::size_t k = g.index(a, b);
            j.f[k] = cd(f(x, y));
            j.d[k] = cd(fd(x, y));
            j.db[k] = cd(fdb(x, y));
            j.ddb[k] = cd(fddb(x, y));
            if (!std::isfinite(std::abs(j.f[k])) || !std::isfinite(std::abs(j.d[k])) ||
                !std::isfinite(std::abs(j.db[k])) || !std::isfinite(std::abs(j.ddb[k])))
                j.valid[k] = 0;
        }
    return j;
}

/// Jet of a sampled field by finite differences. `where` marks nodes whose
/// values may be used; the valid set is `where` eroded by two stencil radii.
inline ComplexJet jet_fd(const ComplexField& f, Order order, const Mask* where = nullptr) {
    const Grid2& g = f.grid;
    Mask ok = where ? *where : Mask(g, 1);
    // masked-out values are replaced by zero so they cannot poison neighbours
    // through NaN; the erosion keeps every stencil inside the trusted set
    ComplexField clean = f;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!std::isfinite(std::abs(f[k]))) ok[k] = 0;
        if (!ok[k]) clean[k] = 0.0;
    }
    ComplexJet j{f, diff(clean, Dir::z, order), diff(clean, Dir::zbar, order), laplace_quarter(clean, order),
                 erode(ok, 2 * stencil_radius(static_cast<int>(order)))};
    return j;
}

/// rho = prod_j (z - a_j)/(zbar - conj a_j): unimodular, with simple poles.
struct PoleProduct {
    std::vector<cd> poles;

    template <class T>
    T operator()(T x, T y) const {
        const cd i(0.0, 1.0);
        const T z = x + i * y, zb = x - i * y;
        T r = z * 0.0 + 1.0;
        for (const cd& a : poles) r = r * (z - a) / (zb - std::conj(a));
        return r;
    }

    /// Sum of 1/(z - a_j); d rho = F rho and dbar rho = -conj(F) rho.
    cd F(cd z) const {
        cd s = 0.0;
        for (const cd& a : poles) s += 1.0 / (z - a);
        return s;
    }
};

/// Nodes farther than `radius` from every pole a_j and from its mirror
/// image conj(a_j). radius <= 0 selects 3 max(hu, hv).
inline Mask pole_mask(const Grid2& g, const std::vector<cd>& poles, double radius = -1.0) {
    require(!poles.empty(), "at least one pole required");
    for (std::size_t a = 0; a < poles.size(); ++a)
        for (std::size_t b = a + 1; b < poles.size(); ++b) require(poles[a] != poles[b], "poles must be distinct");
    const double r = radius > 0.0 ? radius : 3.0 * std::max(g.hu(), g.hv());
    Mask m(g, 1);
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const cd z = g.z(i, j);
            for (const cd& a : poles)
                if (std::abs(z - a) < r || std::abs(z - std::conj(a)) < r) m(i, j) = 0;
        }
    return m;
}

/// Residual statistics of a complex field (modulus) over a mask.
inline Check measure_complex(std::string name, const ComplexField& r, const Mask& m, double tol,
                             Bound bound = Bound::at_most) {
    return measure(std::move(name), map([](const cd& x) { return std::abs(x); }, r), &m, tol, bound);
}

}  // namespace solsurf
