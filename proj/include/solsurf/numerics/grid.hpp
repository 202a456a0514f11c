#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "solsurf/error.hpp"

namespace solsurf {

using cd = std::complex<double>;

enum class Plane { real, complex };

/// Uniform tensor grid. Node (i, j) sits at (u_min + i*hu, v_min + j*hv);
/// storage is row-major with i fastest.
struct Grid2 {
    double u_min = 0, u_max = 1, v_min = 0, v_max = 1;
    int nu = 3, nv = 3;
    Plane plane = Plane::real;

    static Grid2 make(double u0, double u1, int nu, double v0, double v1, int nv,
                      Plane plane = Plane::real) {
        Grid2 g{u0, u1, v0, v1, nu, nv, plane};
        g.validate();
        return g;
    }

    void validate() const {
        require(nu >= 3 && nv >= 3, "grid too coarse");
        require(std::isfinite(u_min) && std::isfinite(u_max) && std::isfinite(v_min) &&
                    std::isfinite(v_max),
                "grid bounds must be finite");
        require(u_max > u_min && v_max > v_min, "grid bounds must satisfy min < max");
    }

    double hu() const { return (u_max - u_min) / (nu - 1); }
    double hv() const { return (v_max - v_min) / (nv - 1); }
    double u(int i) const { return u_min + i * hu(); }
    double v(int j) const { return v_min + j * hv(); }
    cd z(int i, int j) const { return {u(i), v(j)}; }
    std::size_t size() const { return static_cast<std::size_t>(nu) * nv; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nu + i; }
    bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < nu && j < nv; }

    /// Same domain with half the spacing.
    Grid2 refined() const { return {u_min, u_max, v_min, v_max, 2 * nu - 1, 2 * nv - 1, plane}; }

    bool same_as(const Grid2& o) const {
        return nu == o.nu && nv == o.nv && u_min == o.u_min && u_max == o.u_max &&
               v_min == o.v_min && v_max == o.v_max;
    }
};

struct Node {
    int i = 0, j = 0;
    bool operator==(const Node&) const = default;
};

/// Zero for Eigen fixed-size types, value-initialized otherwise.
template <class T>
T zero_value() {
    if constexpr (requires { T::Zero(); }) return T::Zero();
    else return T{};
}

/// One value per grid node.
template <class T>
struct Field {
    Grid2 grid;
    std::vector<T> values;

    Field() = default;
    explicit Field(const Grid2& g, const T& fill = zero_value<T>()) : grid(g), values(g.size(), fill) {}

    T& operator()(int i, int j) { return values[grid.index(i, j)]; }
    const T& operator()(int i, int j) const { return values[grid.index(i, j)]; }
    T& operator[](std::size_t k) { return values[k]; }
    const T& operator[](std::size_t k) const { return values[k]; }
    std::size_t size() const { return values.size(); }
};

using RealField = Field<double>;
using ComplexField = Field<cd>;
/// Node mask: nonzero means the node takes part in statistics.
using Mask = Field<std::uint8_t>;

inline Mask full_mask(const Grid2& g) { return Mask(g, 1); }

/// Samples f(u, v) at every node.
template <class F>
auto sample(const Grid2& g, F&& f) {
    using T = std::decay_t<decltype(f(0.0, 0.0))>;
    Field<T> out(g);
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) out(i, j) = f(g.u(i), g.v(j));
    return out;
}

/// Applies f node-wise to one or more fields on the same grid.
template <class F, class A, class... Rest>
auto map(F&& f, const Field<A>& a, const Field<Rest>&... rest) {
    using T = std::decay_t<decltype(f(a[0], rest[0]...))>;
    ((void)require(rest.grid.same_as(a.grid), "grid mismatch"), ...);
    Field<T> out(a.grid);
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = f(a[k], rest[k]...);
    return out;
}

inline void check_same_grid(const Grid2& a, const Grid2& b) { require(a.same_as(b), "grid mismatch"); }

}  // namespace solsurf
