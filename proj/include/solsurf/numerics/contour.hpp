#pragma once

#include <complex>
#include <cstdlib>
#include <deque>
#include <limits>
#include <vector>

#include "solsurf/numerics/grid.hpp"

namespace solsurf {

/// Ordered grid nodes, each adjacent to the previous one.
struct ContourPath {
    std::vector<Node> nodes;

    Node start() const { return nodes.front(); }
    Node end() const { return nodes.back(); }

    ContourPath reversed() const { return {{nodes.rbegin(), nodes.rend()}}; }

    /// this followed by other; other must start where this ends.
    ContourPath then(const ContourPath& other) const {
        require(!nodes.empty() && !other.nodes.empty() && end() == other.start(), "paths do not join");
        ContourPath out = *this;
        out.nodes.insert(out.nodes.end(), other.nodes.begin() + 1, other.nodes.end());
        return out;
    }
};

enum class Quadrature {
    trapezoid,  ///< composite trapezoid per edge
    fourth      ///< 4-point edge rule using collinear neighbours where available
};

inline void validate_path(const Grid2& g, const ContourPath& p) {
    require(!p.nodes.empty(), "empty contour path");
    for (std::size_t k = 0; k < p.nodes.size(); ++k) {
        require(g.contains(p.nodes[k].i, p.nodes[k].j), "contour path leaves grid");
        if (k > 0) {
            const int di = std::abs(p.nodes[k].i - p.nodes[k - 1].i);
            const int dj = std::abs(p.nodes[k].j - p.nodes[k - 1].j);
            require(di + dj == 1, "contour path nodes not adjacent");
        }
    }
}

namespace detail {

// Integral of g along the edge a -> b (adjacent nodes) where g is the scalar
// integrand per unit edge parameter (g already contains dz, dzbar).
template <class G>
cd edge_integral(const Grid2& grid, Node a, Node b, G&& g, const Mask* allowed, Quadrature q) {
    const int di = b.i - a.i, dj = b.j - a.j;
    const double h = di != 0 ? grid.hu() : grid.hv();
    const double sgn = (di + dj) > 0 ? 1.0 : -1.0;
    // canonical orientation: low -> high index
    Node lo = sgn > 0 ? a : b;
    const int si = std::abs(di), sj = std::abs(dj);
    auto at = [&](int k) { return Node{lo.i + k * si, lo.j + k * sj}; };
    auto ok = [&](int k) {
        Node n = at(k);
        return grid.contains(n.i, n.j) && (!allowed || (*allowed)(n.i, n.j));
    };
    auto f = [&](int k) { Node n = at(k); return g(n.i, n.j, si, sj); };
    cd val;
    if (q == Quadrature::fourth && ok(-1) && ok(2)) {
        val = h / 24.0 * (-f(-1) + 13.0 * f(0) + 13.0 * f(1) - f(2));
    } else if (q == Quadrature::fourth && ok(2) && ok(3)) {
        val = h / 24.0 * (9.0 * f(0) + 19.0 * f(1) - 5.0 * f(2) + f(3));
    } else if (q == Quadrature::fourth && ok(-1) && ok(-2)) {
        val = h / 24.0 * (9.0 * f(1) + 19.0 * f(0) - 5.0 * f(-1) + f(-2));
    } else {
        val = 0.5 * h * (f(0) + f(1));
    }
    return sgn * val;
}

}  // namespace detail

/// Integral of (omega_z dz' + omega_zbar dzbar') along the path, z = u + i v.
inline cd contour_integral(const ComplexField& omega_z, const ComplexField& omega_zbar, const ContourPath& path,
                           Quadrature q = Quadrature::trapezoid, const Mask* allowed = nullptr) {
    check_same_grid(omega_z.grid, omega_zbar.grid);
    const Grid2& g = omega_z.grid;
    validate_path(g, path);
    auto integrand = [&](int i, int j, int si, int /*sj*/) {
        // unit step along u: dz = dzbar = 1; along v: dz = i, dzbar = -i
        const cd dz = si ? cd(1, 0) : cd(0, 1);
        return omega_z(i, j) * dz + omega_zbar(i, j) * std::conj(dz);
    };
    cd sum = 0.0;
    for (std::size_t k = 1; k < path.nodes.size(); ++k)
        sum += detail::edge_integral(g, path.nodes[k - 1], path.nodes[k], integrand, allowed, q);
    return sum;
}

/// Path from base along its row to the target column, then along that column.
inline ContourPath staircase(const Grid2& g, Node base, Node target, bool row_first = true) {
    require(g.contains(base.i, base.j) && g.contains(target.i, target.j), "contour path leaves grid");
    ContourPath p{{base}};
    Node c = base;
    auto walk_i = [&] { while (c.i != target.i) { c.i += target.i > c.i ? 1 : -1; p.nodes.push_back(c); } };
    auto walk_j = [&] { while (c.j != target.j) { c.j += target.j > c.j ? 1 : -1; p.nodes.push_back(c); } };
    if (row_first) { walk_i(); walk_j(); } else { walk_j(); walk_i(); }
    return p;
}

/// Spanning tree of paths from a base node over allowed nodes: staircase
/// (row, then column) wherever it stays inside the allowed set, breadth-first
/// detours elsewhere. Deterministic.
struct PathTree {
    Grid2 grid;
    Node base;
    std::vector<long> parent;  ///< parent node index; -1 for base or unreachable
    std::vector<std::size_t> order;  ///< reachable nodes, parents before children
    std::vector<std::uint8_t> reached;

    static PathTree build(const Grid2& g, Node base, const Mask* allowed = nullptr) {
        PathTree t{g, base, std::vector<long>(g.size(), -1), {}, std::vector<std::uint8_t>(g.size(), 0)};
        auto ok = [&](int i, int j) { return g.contains(i, j) && (!allowed || (*allowed)(i, j)); };
        require(ok(base.i, base.j), "base node is excluded");
        auto visit = [&](int i, int j, long par) {
            const std::size_t k = g.index(i, j);
            t.reached[k] = 1;
            t.parent[k] = par;
            t.order.push_back(k);
        };
        visit(base.i, base.j, -1);
        // base row, both directions, until blocked
        for (int dir : {+1, -1})
            for (int i = base.i + dir; ok(i, base.j); i += dir)
                visit(i, base.j, static_cast<long>(g.index(i - dir, base.j)));
        // columns from reached base-row nodes
        for (int i = 0; i < g.nu; ++i) {
            if (!t.reached[g.index(i, base.j)]) continue;
            for (int dir : {+1, -1})
                for (int j = base.j + dir; ok(i, j); j += dir)
                    visit(i, j, static_cast<long>(g.index(i, j - dir)));
        }
        // breadth-first fill of the rest, seeded by everything reached so far
        std::deque<std::size_t> queue(t.order.begin(), t.order.end());
        while (!queue.empty()) {
            const std::size_t k = queue.front();
            queue.pop_front();
            const int i = static_cast<int>(k % g.nu), j = static_cast<int>(k / g.nu);
            const int nbr[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (auto& d : nbr) {
                const int a = i + d[0], b = j + d[1];
                if (!ok(a, b) || t.reached[g.index(a, b)]) continue;
                visit(a, b, static_cast<long>(k));
                queue.push_back(g.index(a, b));
            }
        }
        return t;
    }

    bool reachable(Node n) const { return reached[grid.index(n.i, n.j)] != 0; }

    ContourPath path_to(Node n) const {
        require(reachable(n), "node not reachable from base");
        std::vector<Node> rev;
        long k = static_cast<long>(grid.index(n.i, n.j));
        while (k >= 0) {
            rev.push_back({static_cast<int>(k % grid.nu), static_cast<int>(k / grid.nu)});
            k = parent[k];
        }
        return {{rev.rbegin(), rev.rend()}};
    }

    /// Integral from base to every reachable node (NaN elsewhere), accumulated
    /// edge by edge with the same rule as contour_integral.
    ComplexField integrate(const ComplexField& omega_z, const ComplexField& omega_zbar,
                           Quadrature q = Quadrature::trapezoid, const Mask* allowed = nullptr) const {
        check_same_grid(omega_z.grid, grid);
        check_same_grid(omega_zbar.grid, grid);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        ComplexField out(grid, cd(nan, nan));
        auto integrand = [&](int i, int j, int si, int) {
            const cd dz = si ? cd(1, 0) : cd(0, 1);
            return omega_z(i, j) * dz + omega_zbar(i, j) * std::conj(dz);
        };
        for (std::size_t k : order) {
            if (parent[k] < 0) {
                out[k] = 0.0;
                continue;
            }
            const std::size_t p = static_cast<std::size_t>(parent[k]);
            Node a{static_cast<int>(p % grid.nu), static_cast<int>(p / grid.nu)};
            Node b{static_cast<int>(k % grid.nu), static_cast<int>(k / grid.nu)};
            out[k] = out[p] + detail::edge_integral(grid, a, b, integrand, allowed, q);
        }
        return out;
    }
};

}  // namespace solsurf
