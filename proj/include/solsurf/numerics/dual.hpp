#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

namespace solsurf {

/// Forward-mode dual number v + d*eps with eps^2 = 0. Nests (Dual<Dual<T>>)
/// for higher derivatives; T may be real or complex.
template <class T>
struct Dual {
    T v{}, d{};

    constexpr Dual() = default;
    constexpr Dual(const T& value, const T& tangent) : v(value), d(tangent) {}
    template <class S>
        requires std::is_constructible_v<T, S>
    constexpr Dual(const S& value) : v(T(value)), d(T(0.0)) {}
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};
template <class T>
inline constexpr bool is_dual_v = is_dual<std::decay_t<T>>::value;

template <class S>
concept Constant = !is_dual_v<S>;

// arithmetic between duals

template <class T>
constexpr Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T>
constexpr Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T>
constexpr Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T>
constexpr Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T>
constexpr Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
}

// arithmetic with constants (double, complex, or a less nested dual)

template <class T, Constant S>
constexpr Dual<T> operator+(const Dual<T>& a, const S& s) { return {a.v + s, a.d}; }
template <class T, Constant S>
constexpr Dual<T> operator+(const S& s, const Dual<T>& a) { return {s + a.v, a.d}; }
template <class T, Constant S>
constexpr Dual<T> operator-(const Dual<T>& a, const S& s) { return {a.v - s, a.d}; }
template <class T, Constant S>
constexpr Dual<T> operator-(const S& s, const Dual<T>& a) { return {s - a.v, -a.d}; }
template <class T, Constant S>
constexpr Dual<T> operator*(const Dual<T>& a, const S& s) { return {a.v * s, a.d * s}; }
template <class T, Constant S>
constexpr Dual<T> operator*(const S& s, const Dual<T>& a) { return {s * a.v, s * a.d}; }
template <class T, Constant S>
constexpr Dual<T> operator/(const Dual<T>& a, const S& s) { return {a.v / s, a.d / s}; }
template <class T, Constant S>
constexpr Dual<T> operator/(const S& s, const Dual<T>& a) { return Dual<T>(T(s)) / a; }

// mixed nesting depth: Dual<Dual<X>> with Dual<X>
template <class T>
constexpr Dual<Dual<T>> operator+(const Dual<Dual<T>>& a, const Dual<T>& s) { return {a.v + s, a.d}; }
template <class T>
constexpr Dual<Dual<T>> operator+(const Dual<T>& s, const Dual<Dual<T>>& a) { return {s + a.v, a.d}; }
template <class T>
constexpr Dual<Dual<T>> operator-(const Dual<Dual<T>>& a, const Dual<T>& s) { return {a.v - s, a.d}; }
template <class T>
constexpr Dual<Dual<T>> operator-(const Dual<T>& s, const Dual<Dual<T>>& a) { return {s - a.v, -a.d}; }
template <class T>
constexpr Dual<Dual<T>> operator*(const Dual<Dual<T>>& a, const Dual<T>& s) { return {a.v * s, a.d * s}; }
template <class T>
constexpr Dual<Dual<T>> operator*(const Dual<T>& s, const Dual<Dual<T>>& a) { return {s * a.v, s * a.d}; }
template <class T>
constexpr Dual<Dual<T>> operator/(const Dual<Dual<T>>& a, const Dual<T>& s) { return {a.v / s, a.d / s}; }

template <class T, class S>
Dual<T>& operator+=(Dual<T>& a, const S& b) { return a = a + b; }
template <class T, class S>
Dual<T>& operator-=(Dual<T>& a, const S& b) { return a = a - b; }
template <class T, class S>
Dual<T>& operator*=(Dual<T>& a, const S& b) { return a = a * b; }
template <class T, class S>
Dual<T>& operator/=(Dual<T>& a, const S& b) { return a = a / b; }

// elementary functions; chain rule applied recursively

template <class T>
Dual<T> sin(const Dual<T>& a) { using std::sin, std::cos; return {sin(a.v), a.d * cos(a.v)}; }
template <class T>
Dual<T> cos(const Dual<T>& a) { using std::sin, std::cos; return {cos(a.v), -(a.d * sin(a.v))}; }
template <class T>
Dual<T> exp(const Dual<T>& a) { using std::exp; T e = exp(a.v); return {e, a.d * e}; }
template <class T>
Dual<T> log(const Dual<T>& a) { using std::log; return {log(a.v), a.d / a.v}; }
template <class T>
Dual<T> sqrt(const Dual<T>& a) { using std::sqrt; T s = sqrt(a.v); return {s, a.d / (s * 2.0)}; }
template <class T>
Dual<T> tan(const Dual<T>& a) { using std::cos, std::tan; T c = cos(a.v); return {tan(a.v), a.d / (c * c)}; }
template <class T>
Dual<T> sinh(const Dual<T>& a) { using std::sinh, std::cosh; return {sinh(a.v), a.d * cosh(a.v)}; }
template <class T>
Dual<T> cosh(const Dual<T>& a) { using std::sinh, std::cosh; return {cosh(a.v), a.d * sinh(a.v)}; }
template <class T>
Dual<T> tanh(const Dual<T>& a) {
    using std::tanh;
    T t = tanh(a.v);
    return {t, a.d * (1.0 - t * t)};
}
template <class T>
Dual<T> atan(const Dual<T>& a) { using std::atan; return {atan(a.v), a.d / (a.v * a.v + 1.0)}; }
template <class T>
Dual<T> atanh(const Dual<T>& a) { using std::atanh; return {atanh(a.v), a.d / (1.0 - a.v * a.v)}; }
template <class T>
Dual<T> asinh(const Dual<T>& a) {
    using std::asinh, std::sqrt;
    return {asinh(a.v), a.d / sqrt(a.v * a.v + 1.0)};
}

/// Integer power by repeated multiplication (exact for duals).
template <class T>
T ipow(const T& a, int n) {
    if (n < 0) return T(1.0) / ipow(a, -n);
    T r(1.0);
    for (int k = 0; k < n; ++k) r = r * a;
    return r;
}

/// Complex conjugate that leaves real scalars real. For a dual whose tangent
/// is a real-direction derivative, conjugation commutes with differentiation.
inline double cj(double x) { return x; }
inline std::complex<double> cj(const std::complex<double>& x) { return std::conj(x); }
template <class T>
Dual<T> cj(const Dual<T>& a) { return {cj(a.v), cj(a.d)}; }

/// Innermost value of a possibly nested dual.
inline double primal(double x) { return x; }
inline std::complex<double> primal(const std::complex<double>& x) { return x; }
template <class T>
auto primal(const Dual<T>& a) { return primal(a.v); }

/// Tangent part of r, or zero when r does not depend on the seeded variable.
template <class R, class T>
auto tangent_of(const R& r) {
    if constexpr (is_dual_v<R>) return r.d;
    else return T(0.0);
}

/// Partial derivatives of a generic two-argument callable f(u, v). The result
/// is again a generic callable, so these compose to any order.
template <class F>
auto d_du(F f) {
    return [f](auto u, auto v) {
        using T = decltype(u);
        using D = Dual<T>;
        return tangent_of<decltype(f(D(u, T(1.0)), D(v, T(0.0)))), T>(f(D(u, T(1.0)), D(v, T(0.0))));
    };
}

template <class F>
auto d_dv(F f) {
    return [f](auto u, auto v) {
        using T = decltype(u);
        using D = Dual<T>;
        return tangent_of<decltype(f(D(u, T(0.0)), D(v, T(1.0)))), T>(f(D(u, T(0.0)), D(v, T(1.0))));
    };
}

/// Wirtinger derivatives d = (d_x - i d_y)/2 and dbar = (d_x + i d_y)/2 for a
/// callable of (x, y) with complex base scalar.
template <class F>
auto d_dz(F f) {
    return [f](auto x, auto y) {
        const std::complex<double> i(0.0, 1.0);
        return (d_du(f)(x, y) - i * d_dv(f)(x, y)) * 0.5;
    };
}

template <class F>
auto d_dzbar(F f) {
    return [f](auto x, auto y) {
        const std::complex<double> i(0.0, 1.0);
        return (d_du(f)(x, y) + i * d_dv(f)(x, y)) * 0.5;
    };
}

/// d dbar f = (f_xx + f_yy)/4.
template <class F>
auto d_dzdzbar(F f) {
    return [f](auto x, auto y) { return (d_du(d_du(f))(x, y) + d_dv(d_dv(f))(x, y)) * 0.25; };
}

}  // namespace solsurf
