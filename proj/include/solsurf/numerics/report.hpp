#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "solsurf/numerics/grid.hpp"

namespace solsurf {

/// How a check's statistic is judged against its tolerance.
enum class Bound {
    at_most,   ///< pass iff max <= tol
    at_least,  ///< pass iff max >= tol (off-shell / perturbation checks)
    info       ///< reported only, never fails
};

struct Check {
    std::string name;
    double max = 0.0;
    double mean = 0.0;
    std::optional<double> order;  ///< estimated convergence order, if measured
    double tol = 0.0;
    Bound bound = Bound::at_most;
    bool pass = true;
    std::size_t nodes = 0;     ///< nodes that entered the statistics
    std::size_t excluded = 0;  ///< masked-out or singular nodes
    std::string note;

    void judge() {
        switch (bound) {
            case Bound::at_most: pass = std::isfinite(max) && max <= tol; break;
            case Bound::at_least: pass = std::isfinite(max) && max >= tol; break;
            case Bound::info: pass = true; break;
        }
    }
};

/// Named residual statistics.
struct ResidualReport {
    std::vector<Check> checks;
    std::vector<std::string> warnings;

    Check& add(Check c) {
        c.judge();
        checks.push_back(std::move(c));
        return checks.back();
    }

    bool pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }

    bool has(const std::string& name) const {
        return std::any_of(checks.begin(), checks.end(), [&](const Check& c) { return c.name == name; });
    }

    const Check& get(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name) return c;
        throw Error("no check named " + name);
    }

    void merge(const ResidualReport& other, const std::string& prefix = "") {
        for (Check c : other.checks) {
            c.name = prefix + c.name;
            checks.push_back(std::move(c));
        }
        warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
    }
};

/// Max/mean of a nonnegative residual field over masked nodes. Non-finite
/// values at included nodes propagate into max.
inline Check measure(std::string name, const RealField& r, const Mask* mask = nullptr, double tol = 0.0,
                     Bound bound = Bound::at_most) {
    Check c;
    c.name = std::move(name);
    c.tol = tol;
    c.bound = bound;
    double sum = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        if (mask && !(*mask)[k]) {
            ++c.excluded;
            continue;
        }
        const double x = r[k];
        if (!std::isfinite(x)) c.max = std::numeric_limits<double>::infinity();
        else c.max = std::max(c.max, x);
        sum += x;
        ++c.nodes;
    }
    c.mean = c.nodes ? sum / static_cast<double>(c.nodes) : 0.0;
    c.judge();
    return c;
}

/// Observed order from errors on grids with spacing h and h/2.
inline double observed_order(double coarse, double fine) { return std::log2(coarse / fine); }

/// Mask of nodes at least `margin` nodes away from the grid boundary.
inline Mask interior_mask(const Grid2& g, int margin = 1) {
    Mask m(g, 0);
    for (int j = margin; j < g.nv - margin; ++j)
        for (int i = margin; i < g.nu - margin; ++i) m(i, j) = 1;
    return m;
}

inline Mask mask_and(const Mask& a, const Mask& b) {
    return map([](std::uint8_t x, std::uint8_t y) -> std::uint8_t { return x && y; }, a, b);
}

/// Shrinks the included set: a node stays included only if every node within
/// Chebyshev distance r is included. Used so that derivative stencils never
/// read values at excluded nodes.
inline Mask erode(const Mask& m, int r) {
    const Grid2& g = m.grid;
    Mask out = m;
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            if (m(i, j)) continue;
            for (int b = std::max(0, j - r); b <= std::min(g.nv - 1, j + r); ++b)
                for (int a = std::max(0, i - r); a <= std::min(g.nu - 1, i + r); ++a) out(a, b) = 0;
        }
    return out;
}

inline int stencil_radius(int order) { return order >= 4 ? 2 : 1; }

}  // namespace solsurf
