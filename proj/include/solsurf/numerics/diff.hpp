#pragma once

#include <complex>
#include <type_traits>

#include "solsurf/numerics/grid.hpp"

namespace solsurf {

enum class Dir { u, v, z, zbar };

/// Stencil order. Second order is the default everywhere; fourth order uses
/// 5-point central stencils and 5-point one-sided stencils on the two
/// outermost nodes of each line.
enum class Order { second = 2, fourth = 4 };

namespace detail {

// First derivative along one line: in[k*stride], k = 0..n-1.
template <class T>
void diff_line(const T* in, T* out, std::ptrdiff_t stride, int n, double h, Order order) {
    auto f = [&](int k) -> const T& { return in[k * stride]; };
    auto o = [&](int k) -> T& { return out[k * stride]; };
    if (order == Order::second || n < 5) {
        const double c = 1.0 / (2.0 * h);
        o(0) = (f(0) * -3.0 + f(1) * 4.0 - f(2)) * c;
        for (int k = 1; k + 1 < n; ++k) o(k) = (f(k + 1) - f(k - 1)) * c;
        o(n - 1) = (f(n - 1) * 3.0 - f(n - 2) * 4.0 + f(n - 3)) * c;
        return;
    }
    const double c = 1.0 / (12.0 * h);
    o(0) = (f(0) * -25.0 + f(1) * 48.0 - f(2) * 36.0 + f(3) * 16.0 - f(4) * 3.0) * c;
    o(1) = (f(0) * -3.0 - f(1) * 10.0 + f(2) * 18.0 - f(3) * 6.0 + f(4)) * c;
    for (int k = 2; k + 2 < n; ++k) o(k) = (f(k - 2) - f(k - 1) * 8.0 + f(k + 1) * 8.0 - f(k + 2)) * c;
    const int m = n - 1;
    o(m - 1) = (f(m) * 3.0 + f(m - 1) * 10.0 - f(m - 2) * 18.0 + f(m - 3) * 6.0 - f(m - 4)) * c;
    o(m) = (f(m) * 25.0 - f(m - 1) * 48.0 + f(m - 2) * 36.0 - f(m - 3) * 16.0 + f(m - 4) * 3.0) * c;
}

// Second derivative along one line.
template <class T>
void diff2_line(const T* in, T* out, std::ptrdiff_t stride, int n, double h, Order order) {
    auto f = [&](int k) -> const T& { return in[k * stride]; };
    auto o = [&](int k) -> T& { return out[k * stride]; };
    const double c = 1.0 / (h * h);
    if (order == Order::second || n < 6) {
        require(n >= 4, "grid too coarse");
        o(0) = (f(0) * 2.0 - f(1) * 5.0 + f(2) * 4.0 - f(3)) * c;
        for (int k = 1; k + 1 < n; ++k) o(k) = (f(k - 1) - f(k) * 2.0 + f(k + 1)) * c;
        const int m = n - 1;
        o(m) = (f(m) * 2.0 - f(m - 1) * 5.0 + f(m - 2) * 4.0 - f(m - 3)) * c;
        return;
    }
    const double c12 = c / 12.0;
    // one-sided 6-point and shifted 6-point stencils, fourth order
    o(0) = (f(0) * 45.0 - f(1) * 154.0 + f(2) * 214.0 - f(3) * 156.0 + f(4) * 61.0 - f(5) * 10.0) * c12;
    o(1) = (f(0) * 10.0 - f(1) * 15.0 - f(2) * 4.0 + f(3) * 14.0 - f(4) * 6.0 + f(5)) * c12;
    for (int k = 2; k + 2 < n; ++k)
        o(k) = (-f(k - 2) + f(k - 1) * 16.0 - f(k) * 30.0 + f(k + 1) * 16.0 - f(k + 2)) * c12;
    const int m = n - 1;
    o(m - 1) = (f(m) * 10.0 - f(m - 1) * 15.0 - f(m - 2) * 4.0 + f(m - 3) * 14.0 - f(m - 4) * 6.0 + f(m - 5)) * c12;
    o(m) = (f(m) * 45.0 - f(m - 1) * 154.0 + f(m - 2) * 214.0 - f(m - 3) * 156.0 + f(m - 4) * 61.0 -
            f(m - 5) * 10.0) *
           c12;
}

template <class T, class LineOp>
Field<T> along(const Field<T>& f, Dir d, LineOp op) {
    const Grid2& g = f.grid;
    Field<T> out(g);
    if (d == Dir::u) {
        require(g.nu >= 3, "grid too coarse");
        for (int j = 0; j < g.nv; ++j) op(&f.values[g.index(0, j)], &out.values[g.index(0, j)], 1, g.nu, g.hu());
    } else {
        require(g.nv >= 3, "grid too coarse");
        for (int i = 0; i < g.nu; ++i) op(&f.values[g.index(i, 0)], &out.values[g.index(i, 0)], g.nu, g.nv, g.hv());
    }
    return out;
}

}  // namespace detail

/// First derivative. For Dir::z / Dir::zbar the grid is read as z = u + i v and
/// d = (d_u - i d_v)/2, dbar = (d_u + i d_v)/2; those need a complex field.
template <class T>
Field<T> diff(const Field<T>& f, Dir d, Order order = Order::second) {
    auto op = [order](const T* in, T* out, std::ptrdiff_t s, int n, double h) {
        detail::diff_line(in, out, s, n, h, order);
    };
    if (d == Dir::u || d == Dir::v) return detail::along(f, d, op);
    if constexpr (std::is_same_v<T, cd>) {
        Field<T> fu = detail::along(f, Dir::u, op);
        Field<T> fv = detail::along(f, Dir::v, op);
        const cd i(0.0, 1.0);
        const double s = d == Dir::z ? -1.0 : 1.0;
        for (std::size_t k = 0; k < fu.size(); ++k) fu[k] = 0.5 * (fu[k] + s * i * fv[k]);
        return fu;
    } else {
        throw Error("complex derivative requires a complex field");
    }
}

/// Second derivative d_a d_b for a, b in {u, v}; pure directions use compact
/// stencils, the mixed one is a composition.
template <class T>
Field<T> diff2(const Field<T>& f, Dir a, Dir b, Order order = Order::second) {
    require((a == Dir::u || a == Dir::v) && (b == Dir::u || b == Dir::v), "diff2 takes u or v directions");
    if (a != b) return diff(diff(f, a, order), b, order);
    return detail::along(f, a, [order](const T* in, T* out, std::ptrdiff_t s, int n, double h) {
        detail::diff2_line(in, out, s, n, h, order);
    });
}

/// d dbar f = (f_uu + f_vv)/4.
template <class T>
Field<T> laplace_quarter(const Field<T>& f, Order order = Order::second) {
    Field<T> a = diff2(f, Dir::u, Dir::u, order);
    Field<T> b = diff2(f, Dir::v, Dir::v, order);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = (a[k] + b[k]) * 0.25;
    return a;
}

inline ComplexField to_complex(const RealField& f) {
    return map([](double x) { return cd(x, 0.0); }, f);
}

}  // namespace solsurf
