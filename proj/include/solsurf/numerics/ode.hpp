#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "solsurf/error.hpp"
#include "solsurf/numerics/matrix.hpp"

namespace solsurf {

/// How coefficient samples are evaluated half-way between nodes.
enum class Midpoint {
    linear,  ///< average of the two neighbours (second order)
    cubic    ///< 4-point cubic interpolation (keeps RK4 fourth order)
};

/// Value of a node-sampled sequence at fractional index pos, where pos is
/// either an integer or an integer plus one half.
template <class T>
T sample_at(const std::vector<T>& s, double pos, Midpoint mode = Midpoint::cubic) {
    const int n = static_cast<int>(s.size());
    const int k = static_cast<int>(std::floor(pos));
    if (pos == static_cast<double>(k)) return s[k];
    if (mode == Midpoint::linear || n < 3) return (s[k] + s[k + 1]) * 0.5;
    if (n == 3) {
        if (k == 0) return (s[0] * 3.0 + s[1] * 6.0 - s[2]) * 0.125;
        return (s[2] * 3.0 + s[1] * 6.0 - s[0]) * 0.125;
    }
    if (k == 0) return (s[0] * 5.0 + s[1] * 15.0 - s[2] * 5.0 + s[3]) * (1.0 / 16.0);
    if (k == n - 2) return (s[n - 1] * 5.0 + s[n - 2] * 15.0 - s[n - 3] * 5.0 + s[n - 4]) * (1.0 / 16.0);
    return (s[k] * 9.0 + s[k + 1] * 9.0 - s[k - 1] - s[k + 2]) * (1.0 / 16.0);
}

/// Classical RK4 on n equally spaced nodes (spacing h) starting from node
/// `base` in both directions. rhs(pos, y) gives dy/ds at fractional node
/// index pos. Throws "integration blow-up at node k" on non-finite values.
template <class Y, class Rhs>
std::vector<Y> rk4_march(int n, int base, double h, const Y& y0, Rhs&& rhs) {
    require(n >= 1 && base >= 0 && base < n, "rk4_march: base node outside line");
    require(all_finite(y0), "integration blow-up at node " + std::to_string(base));
    std::vector<Y> y(n, y0);
    auto step = [&](int from, int dir) {
        const double p = from, hh = dir * h, half = 0.5 * dir;
        const Y& a = y[from];
        Y k1 = rhs(p, a);
        Y k2 = rhs(p + half, Y(a + k1 * (0.5 * hh)));
        Y k3 = rhs(p + half, Y(a + k2 * (0.5 * hh)));
        Y k4 = rhs(p + dir, Y(a + k3 * hh));
        Y next = a + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (hh / 6.0);
        const int to = from + dir;
        if (!all_finite(next)) throw Error("integration blow-up at node " + std::to_string(to));
        y[to] = next;
    };
    for (int k = base; k + 1 < n; ++k) step(k, +1);
    for (int k = base; k > 0; --k) step(k, -1);
    return y;
}

/// Linear matrix ODE dY/ds = R(s) Y along one grid line, R sampled at every
/// node; Y(base) = initial.
template <class M>
std::vector<M> integrate_line(const std::vector<M>& R, const M& initial, double h, int base = 0,
                              Midpoint mode = Midpoint::cubic) {
    require(!R.empty(), "integrate_line: no samples");
    return rk4_march(static_cast<int>(R.size()), base, h, initial,
                     [&](double pos, const M& y) -> M { return sample_at(R, pos, mode) * y; });
}

/// Same, with R given as a callable of the line coordinate s (exact midpoints).
template <class M, class F>
std::vector<M> integrate_line_fn(F&& R, double s0, double h, int n, const M& initial, int base = 0) {
    return rk4_march(n, base, h, initial, [&](double pos, const M& y) -> M { return R(s0 + pos * h) * y; });
}

}  // namespace solsurf
