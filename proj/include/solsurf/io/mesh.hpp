#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "solsurf/geometry/surface.hpp"
#include "solsurf/io/report_json.hpp"

namespace solsurf::io {

enum class MeshFormat { obj, ply, csv };

inline MeshFormat parse_format(const std::string& s) {
    if (s == "obj") return MeshFormat::obj;
    if (s == "ply") return MeshFormat::ply;
    if (s == "csv") return MeshFormat::csv;
    throw Error("unknown mesh format '" + s + "' (obj, ply, csv)");
}

inline const char* extension(MeshFormat f) {
    switch (f) {
        case MeshFormat::obj: return ".obj";
        case MeshFormat::ply: return ".ply";
        case MeshFormat::csv: return ".csv";
    }
    return "";
}

/// Triangle mesh of the exported nodes. Vertices follow row-major node order.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<double, 2>> params;  ///< (u, v) of each vertex
    std::vector<std::array<int, 3>> triangles;  ///< 0-based, counterclockwise in (u, v)
    std::vector<int> node_to_vertex;            ///< -1 for dropped nodes
};

/// Builds the mesh from nodes that are finite and selected by `keep`.
/// A full cell gives two triangles; a cell with one dropped corner gives the
/// triangle of the other three. An isolated dropped node whose four edge
/// neighbours survive gets its diamond filled with two triangles, so the
/// hole closes and V - E + F is preserved.
inline Mesh build_mesh(const Immersion3& X, const Mask* keep = nullptr) {
    const Grid2& g = X.grid;
    Mesh m;
    m.node_to_vertex.assign(g.size(), -1);
    auto ok = [&](int i, int j) {
        const std::size_t k = g.index(i, j);
        return (!keep || (*keep)[k]) && X[k].allFinite();
    };
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i)
            if (ok(i, j)) {
                m.node_to_vertex[g.index(i, j)] = static_cast<int>(m.vertices.size());
                m.vertices.push_back(X(i, j));
                m.params.push_back({g.u(i), g.v(j)});
            }
    auto vid = [&](int i, int j) { return m.node_to_vertex[g.index(i, j)]; };
    for (int j = 0; j + 1 < g.nv; ++j)
        for (int i = 0; i + 1 < g.nu; ++i) {
            // corners in counterclockwise order
            const std::array<int, 4> c{vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
            int missing = 0, hole = -1;
            for (int q = 0; q < 4; ++q)
                if (c[q] < 0) ++missing, hole = q;
            if (missing == 0) {
                m.triangles.push_back({c[0], c[1], c[2]});
                m.triangles.push_back({c[0], c[2], c[3]});
            } else if (missing == 1) {
                m.triangles.push_back({c[(hole + 1) % 4], c[(hole + 2) % 4], c[(hole + 3) % 4]});
            }
        }
    for (int j = 1; j + 1 < g.nv; ++j)
        for (int i = 1; i + 1 < g.nu; ++i) {
            if (vid(i, j) >= 0) continue;
            const int e = vid(i + 1, j), n = vid(i, j + 1), w = vid(i - 1, j), s = vid(i, j - 1);
            if (e < 0 || n < 0 || w < 0 || s < 0) continue;
            // only when all eight neighbours survive, so the diamond is bounded
            // by the triangles added above
            bool ring = true;
            for (int b = -1; b <= 1; ++b)
                for (int a = -1; a <= 1; ++a)
                    if ((a || b) && vid(i + a, j + b) < 0) ring = false;
            if (!ring) continue;
            m.triangles.push_back({s, e, n});
            m.triangles.push_back({s, n, w});
        }
    return m;
}

namespace detail {

inline std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class T>
void put_le(std::string& out, T x) {
    char b[sizeof(T)];
    std::memcpy(b, &x, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t k = 0; k < sizeof(T) / 2; ++k) std::swap(b[k], b[sizeof(T) - 1 - k]);
    out.append(b, sizeof(T));
}

}  // namespace detail

inline std::string to_obj(const Mesh& m) {
    std::string s = "# solsurf mesh\n";
    s += "# vertices " + std::to_string(m.vertices.size()) + " triangles " + std::to_string(m.triangles.size()) + "\n";
    for (const Vec3& p : m.vertices)
        s += "v " + detail::fmt17(p[0]) + " " + detail::fmt17(p[1]) + " " + detail::fmt17(p[2]) + "\n";
    for (const auto& t : m.triangles)
        s += "f " + std::to_string(t[0] + 1) + " " + std::to_string(t[1] + 1) + " " + std::to_string(t[2] + 1) + "\n";
    return s;
}

/// Binary little-endian PLY with double vertices and int indices.
inline std::string to_ply(const Mesh& m) {
    std::string s = "ply\nformat binary_little_endian 1.0\ncomment solsurf mesh\n";
    s += "element vertex " + std::to_string(m.vertices.size()) + "\n";
    s += "property double x\nproperty double y\nproperty double z\n";
    s += "element face " + std::to_string(m.triangles.size()) + "\n";
    s += "property list uchar int vertex_indices\nend_header\n";
    for (const Vec3& p : m.vertices)
        for (int c = 0; c < 3; ++c) detail::put_le(s, p[c]);
    for (const auto& t : m.triangles) {
        detail::put_le(s, static_cast<std::uint8_t>(3));
        for (int v : t) detail::put_le(s, static_cast<std::int32_t>(v));
    }
    return s;
}

/// One row per exported node: u, v, X1, X2, X3 with 17 significant digits.
inline std::string to_csv(const Mesh& m) {
    std::string s = "u,v,X1,X2,X3\n";
    for (std::size_t k = 0; k < m.vertices.size(); ++k) {
        const Vec3& p = m.vertices[k];
        s += detail::fmt17(m.params[k][0]) + "," + detail::fmt17(m.params[k][1]) + "," + detail::fmt17(p[0]) + "," +
             detail::fmt17(p[1]) + "," + detail::fmt17(p[2]) + "\n";
    }
    return s;
}

inline std::string encode(const Mesh& m, MeshFormat f) {
    switch (f) {
        case MeshFormat::obj: return to_obj(m);
        case MeshFormat::ply: return to_ply(m);
        case MeshFormat::csv: return to_csv(m);
    }
    return {};
}

/// Writes the surface atomically; nodes outside `keep` or non-finite are dropped.
inline Mesh export_mesh(const Immersion3& X, MeshFormat f, const std::filesystem::path& path,
                        const Mask* keep = nullptr) {
    Mesh m = build_mesh(X, keep);
    write_atomic(path, encode(m, f));
    return m;
}

/// V - E + F of the triangle mesh.
inline long euler_count(const Mesh& m) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(3 * m.triangles.size());
    for (const auto& t : m.triangles)
        for (int q = 0; q < 3; ++q) {
            const int a = t[q], b = t[(q + 1) % 3];
            edges.emplace_back(std::min(a, b), std::max(a, b));
        }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return static_cast<long>(m.vertices.size()) - static_cast<long>(edges.size()) +
           static_cast<long>(m.triangles.size());
}

}  // namespace solsurf::io
