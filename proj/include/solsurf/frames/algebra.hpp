#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "solsurf/numerics/diff.hpp"
#include "solsurf/numerics/grid.hpp"
#include "solsurf/numerics/matrix.hpp"

namespace solsurf {

enum class AlgebraTag { su2, sl2r, so3, so21 };

inline const char* to_string(AlgebraTag t) {
    switch (t) {
        case AlgebraTag::su2: return "su2";
        case AlgebraTag::sl2r: return "sl2r";
        case AlgebraTag::so3: return "so3";
        case AlgebraTag::so21: return "so21";
    }
    return "?";
}

/// What a MatrixField holds: algebra elements (pattern enforced), group
/// elements (drift measured, not enforced) or plain matrices.
enum class Holds { algebra, group, plain };

/// Signature matrix diag(-1, 1, 1) of R^{2,1}.
inline Mat3 minkowski_eta() { return Vec3(-1.0, 1.0, 1.0).asDiagonal(); }

/// Deviation of a 2x2 matrix from the algebra pattern of the tag.
inline double structure_defect(const Mat2c& a, AlgebraTag tag) {
    if (tag == AlgebraTag::su2)
        return std::max((a + a.adjoint()).cwiseAbs().maxCoeff(), std::abs(a.trace()));
    if (tag == AlgebraTag::sl2r) return std::max(a.imag().cwiseAbs().maxCoeff(), std::abs(a.trace()));
    throw Error(std::string("2x2 matrix cannot carry tag ") + to_string(tag));
}

/// Deviation of a 3x3 matrix from so(3) (antisymmetric) or so(2,1)
/// (A^T eta + eta A = 0).
inline double structure_defect(const Mat3& a, AlgebraTag tag) {
    if (tag == AlgebraTag::so3) return (a + a.transpose()).cwiseAbs().maxCoeff();
    if (tag == AlgebraTag::so21) {
        const Mat3 eta = minkowski_eta();
        return (a.transpose() * eta + eta * a).cwiseAbs().maxCoeff();
    }
    throw Error(std::string("3x3 matrix cannot carry tag ") + to_string(tag));
}

/// Deviation of a 2x2 matrix from the group of the tag (unitary/real, det 1).
inline double group_defect(const Mat2c& g, AlgebraTag tag) {
    const double det = std::abs(g.determinant() - 1.0);
    if (tag == AlgebraTag::su2)
        return std::max((g.adjoint() * g - Mat2c::Identity()).cwiseAbs().maxCoeff(), det);
    return std::max(g.imag().cwiseAbs().maxCoeff(), det);
}

inline double group_defect(const Mat3& g, AlgebraTag tag) {
    const double det = std::abs(g.determinant() - 1.0);
    const Mat3 eta = tag == AlgebraTag::so21 ? minkowski_eta() : Mat3::Identity();
    return std::max((g.transpose() * eta * g - eta).cwiseAbs().maxCoeff(), det);
}

/// Norm used in residual reports: |A|^2 = -1/2 tr(A^2) on su(2), which equals
/// 1/2 of the squared Frobenius norm there; Frobenius otherwise.
inline double algebra_norm(const Mat2c& a, AlgebraTag tag) {
    return tag == AlgebraTag::su2 ? std::sqrt(0.5) * a.norm() : a.norm();
}
inline double algebra_norm(const Mat3& a, AlgebraTag) { return a.norm(); }

/// One matrix per grid node.
template <class M>
struct MatrixField {
    Grid2 grid;
    AlgebraTag tag = AlgebraTag::su2;
    Holds holds = Holds::algebra;
    std::vector<M> m;

    MatrixField() = default;
    MatrixField(const Grid2& g, AlgebraTag t, Holds h = Holds::algebra) : grid(g), tag(t), holds(h), m(g.size(), M::Zero()) {}

    /// Builds a field from per-node matrices; algebra fields must match the
    /// tag's pattern to 1e-12.
    static MatrixField make(const Grid2& g, AlgebraTag t, std::vector<M> values, Holds h = Holds::algebra) {
        require(values.size() == g.size(), "matrix count does not match grid");
        MatrixField f(g, t, h);
        f.m = std::move(values);
        if (h == Holds::algebra) f.validate();
        return f;
    }

    void validate(double tol = 1e-12) const {
        for (std::size_t k = 0; k < m.size(); ++k)
            if (structure_defect(m[k], tag) > tol)
                throw Error(std::string("matrix at node ") + std::to_string(k) + " violates " + to_string(tag) +
                            " pattern");
    }

    M& operator()(int i, int j) { return m[grid.index(i, j)]; }
    const M& operator()(int i, int j) const { return m[grid.index(i, j)]; }
    M& operator[](std::size_t k) { return m[k]; }
    const M& operator[](std::size_t k) const { return m[k]; }
    std::size_t size() const { return m.size(); }
};

using MatrixField2 = MatrixField<Mat2c>;
using MatrixField3 = MatrixField<Mat3>;

/// Samples a matrix-valued callable f(u, v) on the grid.
template <class M, class F>
MatrixField<M> sample_matrix(const Grid2& g, AlgebraTag tag, F&& f, Holds h = Holds::algebra) {
    std::vector<M> vals(g.size());
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) vals[g.index(i, j)] = f(g.u(i), g.v(j));
    return MatrixField<M>::make(g, tag, std::move(vals), h);
}

/// Entry-wise derivative of a matrix field.
template <class M>
MatrixField<M> diff(const MatrixField<M>& a, Dir d, Order order = Order::second) {
    using S = typename M::Scalar;
    MatrixField<M> out(a.grid, a.tag, Holds::plain);
    for (Eigen::Index r = 0; r < M::RowsAtCompileTime; ++r)
        for (Eigen::Index c = 0; c < M::ColsAtCompileTime; ++c) {
            Field<S> e(a.grid);
            for (std::size_t k = 0; k < a.size(); ++k) e[k] = a[k](r, c);
            Field<S> de = diff(e, d, order);
            for (std::size_t k = 0; k < a.size(); ++k) out[k](r, c) = de[k];
        }
    return out;
}

}  // namespace solsurf
