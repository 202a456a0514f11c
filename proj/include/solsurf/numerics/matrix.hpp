#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>

namespace solsurf {

using Mat2c = Eigen::Matrix2cd;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Pauli matrices s1, s2, s3.
struct PauliBasis {
    Mat2c s1, s2, s3;

    PauliBasis() {
        const std::complex<double> i(0.0, 1.0);
        s1 << 0.0, 1.0, 1.0, 0.0;
        s2 << 0.0, -i, i, 0.0;
        s3 << 1.0, 0.0, 0.0, -1.0;
    }
    const Mat2c& operator[](int k) const { return k == 0 ? s1 : (k == 1 ? s2 : s3); }
};

inline const PauliBasis& pauli() {
    static const PauliBasis basis;
    return basis;
}

/// Coordinates F_k of an su(2) element F = -i F_k s_k, i.e. F_k = (i/2) tr(F s_k).
inline Vec3 su2_coords(const Mat2c& F) {
    const std::complex<double> i(0.0, 1.0);
    const auto& p = pauli();
    return {(0.5 * i * (F * p.s1).trace()).real(), (0.5 * i * (F * p.s2).trace()).real(),
            (0.5 * i * (F * p.s3).trace()).real()};
}

inline Mat2c su2_from_coords(const Vec3& x) {
    const std::complex<double> i(0.0, 1.0);
    const auto& p = pauli();
    return -i * (x[0] * p.s1 + x[1] * p.s2 + x[2] * p.s3);
}

inline bool all_finite(double x) { return std::isfinite(x); }
inline bool all_finite(const std::complex<double>& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); }
template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (!all_finite(m(r, c))) return false;
    return true;
}

template <class M>
M commutator(const M& a, const M& b) { return a * b - b * a; }

}  // namespace solsurf
