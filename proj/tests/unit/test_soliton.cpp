#include <gtest/gtest.h>

#include <boost/math/special_functions/jacobi_elliptic.hpp>
#include <cmath>
#include <random>

#include "solsurf/soliton/reductions.hpp"
#include "solsurf/soliton/sg_surface.hpp"

using namespace solsurf;

namespace {

double max_abs(const RealField& f, const Mask* m = nullptr) {
    double r = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (!m || (*m)[k]) r = std::max(r, std::abs(f[k]));
    return r;
}

// Static solutions in x, sampled on a grid with x along u and t along v.
double kink(double x) { return 4.0 * std::atan(std::exp(x)); }                   // phi'' = sin phi
double coth_profile(double x) { return 2.0 * std::log(1.0 / std::tanh(0.5 * x)); }  // phi'' = sinh phi
double sech_log(double x, double c) { return std::log(c / std::cosh(c * x)); }   // phi'' = -e^{2 phi}
double csch_log(double x, double c) { return std::log(c / std::sinh(c * x)); }   // phi'' = e^{2 phi}
// phi'' = -sinh phi: sinh(phi/2) = kappa sd(x / sqrt(1 - kappa^2), kappa)
double sd_profile(double x, double kappa) {
    const double s = x / std::sqrt(1.0 - kappa * kappa);
    return 2.0 * std::asinh(kappa * boost::math::jacobi_sd(kappa, s));
}

RealField along_x(const Grid2& g, auto f) {
    return sample(g, [&](double x, double) { return f(x); });
}
RealField along_t(const Grid2& g, auto f) {
    return sample(g, [&](double, double t) { return f(t); });
}

RealField non_solution(const Grid2& g) {
    return sample(g, [](double x, double t) { return 0.3 + 0.5 * std::sin(x) * std::cos(0.7 * t) + 0.1 * x; });
}

struct Case {
    const char* name;
    ReductionExample ex;
    Signature sig;
    Grid2 grid;
    RealField phi;
};

std::vector<Case> on_shell_cases() {
    const int n = 161;
    std::vector<Case> cs;
    {
        Grid2 g = Grid2::make(-4, 4, n, -1, 1, 41);
        cs.push_back({"so3_trig", ReductionExample::trig, Signature::so3, g, along_x(g, kink)});
    }
    {
        Grid2 g = Grid2::make(-3, 3, n, -1, 1, 41);
        cs.push_back({"so3_hyperbolic", ReductionExample::hyperbolic, Signature::so3, g,
                      along_x(g, [](double x) { return sd_profile(x, 0.6); })});
    }
    {
        Grid2 g = Grid2::make(-3, 3, n, -1, 1, 41);
        cs.push_back({"so3_exponential", ReductionExample::exponential, Signature::so3, g,
                      along_x(g, [](double x) { return sech_log(x, 0.8); })});
    }
    {
        // time-dependent kink: phi_tt = sin phi
        Grid2 g = Grid2::make(-1, 1, 41, -4, 4, n);
        cs.push_back({"so21_trig", ReductionExample::trig, Signature::so21, g, along_t(g, kink)});
    }
    {
        Grid2 g = Grid2::make(1, 4, n, -1, 1, 41);
        cs.push_back({"so21_hyperbolic", ReductionExample::hyperbolic, Signature::so21, g, along_x(g, coth_profile)});
    }
    {
        Grid2 g = Grid2::make(1, 4, n, -1, 1, 41);
        cs.push_back({"so21_exponential", ReductionExample::exponential, Signature::so21, g,
                      along_x(g, [](double x) { return csch_log(x, 0.7); })});
    }
    return cs;
}

}  // namespace

TEST(Reduction, OraclesSolveTheirScalarEquations) {
    for (const Case& c : on_shell_cases()) {
        const RealField r = reduction_pde_residual(c.phi, c.ex, c.sig, Order::fourth);
        const Mask m = interior_mask(c.grid, 3);
        EXPECT_LT(max_abs(r, &m), 1e-5) << c.name;
    }
}

TEST(Reduction, SdOracleAgainstSeries) {
    // phi'' + sinh phi = 0 checked by central differences with h = 1e-3
    for (double x : {-1.3, -0.2, 0.4, 1.7}) {
        const double h = 1e-3;
        const double d2 = (sd_profile(x + h, 0.6) - 2 * sd_profile(x, 0.6) + sd_profile(x - h, 0.6)) / (h * h);
        EXPECT_NEAR(d2, -std::sinh(sd_profile(x, 0.6)), 1e-5);
    }
}

TEST(Reduction, GaussResidualVanishesOnSolutions) {
    for (const Case& c : on_shell_cases()) {
        const So3Coefficients co = reduction_coefficients(c.phi, c.ex, Order::fourth);
        const GaussReduction r = so3_gauss_residual(co, c.sig, Order::fourth, 1e-4, 3);
        EXPECT_TRUE(r.report.get("gauss").pass) << c.name << " " << r.report.get("gauss").max;
        EXPECT_TRUE(r.report.get("component_1").pass) << c.name;
        EXPECT_TRUE(r.report.get("component_2").pass) << c.name;
        EXPECT_TRUE(r.report.get("zero_curvature").pass) << c.name << " " << r.report.get("zero_curvature").max;
        EXPECT_GT(r.report.get("gauss").nodes, c.grid.size() / 2) << c.name;
    }
}

TEST(Reduction, NonSolutionsAreDetected) {
    const Grid2 g = Grid2::make(-2, 2, 121, -2, 2, 121);
    const RealField phi = non_solution(g);
    for (auto ex : {ReductionExample::trig, ReductionExample::hyperbolic, ReductionExample::exponential})
        for (auto sig : {Signature::so3, Signature::so21}) {
            const GaussReduction r = so3_gauss_residual(reduction_coefficients(phi, ex), sig, Order::fourth);
            EXPECT_GE(r.report.get("gauss").max, 1e-2);
            EXPECT_FALSE(r.report.pass());
        }
}

TEST(Reduction, GaussIsScalarResidualTimesFactor) {
    const Grid2 g = Grid2::make(-2, 2, 161, -2, 2, 161);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-0.6, 0.6);
    for (int trial = 0; trial < 3; ++trial) {
        const double a = U(rng), b = U(rng), c = U(rng);
        const RealField phi =
            sample(g, [&](double x, double t) { return a + b * std::sin(x + 0.5 * t) + c * std::cos(0.8 * x * t); });
        for (auto ex : {ReductionExample::trig, ReductionExample::hyperbolic, ReductionExample::exponential})
            for (auto sig : {Signature::so3, Signature::so21}) {
                const GaussReduction r = so3_gauss_residual(reduction_coefficients(phi, ex, Order::fourth), sig,
                                                            Order::fourth);
                const RealField p = reduction_pde_residual(phi, ex, sig, Order::fourth);
                Mask m = mask_and(erode(r.evaluated, 4), interior_mask(g, 6));
                // dividing by the determinant amplifies truncation error where it is small
                for (std::size_t k = 0; k < m.size(); ++k)
                    if (std::abs(r.det[k]) < 0.1) m[k] = 0;
                const double f = reduction_factor(ex, sig);
                double num = 0.0, den = 0.0, scale = 0.0;
                for (std::size_t k = 0; k < m.size(); ++k) {
                    if (!m[k]) continue;
                    num = std::max(num, std::abs(r.gauss[k] - f * p[k]));
                    scale = std::max(scale, std::abs(f * p[k]));
                    den += 1.0;
                }
                ASSERT_GT(den, 0.0);
                EXPECT_LT(num / scale, 1e-3);
            }
    }
}

TEST(Reduction, CubicExampleIsWellFormed) {
    const Grid2 g = Grid2::make(-2, 2, 81, -2, 2, 81);
    const RealField phi = sample(g, [](double x, double t) { return 1.5 + 0.3 * std::sin(x) * std::cos(t); });
    const So3Coefficients c = reduction_coefficients(phi, ReductionExample::cubic, Order::fourth);
    const GaussReduction r = so3_gauss_residual(c, Signature::so3, Order::fourth);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_EQ(static_cast<bool>(r.evaluated[k]), std::abs(r.det[k]) > 1e-10);
        if (r.evaluated[k]) {
            EXPECT_TRUE(std::isfinite(r.gauss[k]));
        }
    }
    EXPECT_THROW(reduction_pde_residual(phi, ReductionExample::cubic, Signature::so3), Error);
}

TEST(Reduction, RankDeficientNodesAreExcluded) {
    const Grid2 g = Grid2::make(-2, 2, 41, -2, 2, 41);
    So3Coefficients c{RealField(g, 1.0), RealField(g, 0.0), RealField(g, 0.0), RealField(g, 0.0)};
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) c.v13(i, j) = j == 20 ? 0.0 : 1.0;
    const GaussReduction r = so3_gauss_residual(c, Signature::so3);
    for (int i = 0; i < g.nu; ++i) EXPECT_FALSE(r.evaluated(i, 20));
    EXPECT_TRUE(std::isfinite(r.report.get("gauss").max));
}

TEST(Reduction, ThreeFormsCoincide) {
    const Grid2 g = Grid2::make(-2, 2, 31, -2, 2, 31);
    std::mt19937 rng(3);
    std::normal_distribution<double> N;
    So3Coefficients c{RealField(g), RealField(g), RealField(g), RealField(g)};
    for (auto* f : {&c.u12, &c.u13, &c.v12, &c.v13})
        for (double& x : f->values) x = N(rng);
    const FrameForms f = so3_frame_forms(c);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_LE((f.I[k] - f.II[k]).norm(), 1e-15 * (1 + f.I[k].norm()));
        EXPECT_LE((f.I[k] - f.III[k]).norm(), 1e-15 * (1 + f.I[k].norm()));
        EXPECT_LE((f.I[k] - f.I[k].transpose()).norm(), 0.0);
    }
}

TEST(Reduction, SoMatrixPatterns) {
    const Mat3 a = so_matrix(0.3, -1.2, 0.7, Signature::so3);
    const Mat3 b = so_matrix(0.3, -1.2, 0.7, Signature::so21);
    EXPECT_LE(structure_defect(a, AlgebraTag::so3), 1e-15);
    EXPECT_LE(structure_defect(b, AlgebraTag::so21), 1e-15);
    EXPECT_GT(structure_defect(b, AlgebraTag::so3), 0.1);
}

TEST(Reduction, RankOneConservation) {
    const Grid2 g = Grid2::make(-2, 2, 161, -2, 2, 161);
    const double s = 0.7;
    const RealField u23 = sample(g, [&](double x, double t) { return std::sin(t + s * x) + 0.2 * std::exp(-(t + s * x) * (t + s * x)); });
    const RealField sigma(g, s);
    EXPECT_TRUE(rank1_conservation_residual(u23, sigma, Order::fourth, 1e-6).pass());
    const RealField sigma2 = sample(g, [](double x, double t) { return 0.7 + 0.3 * x * t; });
    RealField r;
    const ResidualReport bad = rank1_conservation_residual(u23, sigma2, Order::fourth, 1e-6, &r);
    EXPECT_FALSE(bad.pass());
    EXPECT_GT(bad.get("conservation").max, 1e-2);
}

// Symmetry surface of the kink
namespace {

struct KinkSurface {
    SGLaxData d;
    SymmetryField s;
    SGSurface surf;
};

KinkSurface kink_surface(int n, double L, double lambda, const Mat2c& initial = Mat2c::Identity()) {
    const Grid2 g = Grid2::make(-L, L, n, -L, L, n);
    Kink k;
    KinkSurface ks;
    ks.d = sg_lax_data(g, k, lambda);
    ks.s = symmetry_field(g, d_dv(k), k);
    ks.surf = sg_surface(ks.d, ks.s, {0, 0}, initial);
    return ks;
}

}  // namespace

TEST(SymmetrySurface, InputsAndIntegrationAreClean) {
    const KinkSurface ks = kink_surface(201, 4, 1.0);
    EXPECT_LT(ks.surf.report.get("input_sine_gordon").max, 1e-12);
    EXPECT_LT(ks.surf.report.get("input_symmetry").max, 1e-12);
    EXPECT_LT(ks.surf.report.get("frame_group_defect").max, 1e-6);
    EXPECT_LT(ks.surf.report.get("immersion_cross_order").max, 1e-5);
}

TEST(SymmetrySurface, ClosedFormsMatchIntegratedImmersion) {
    const KinkSurface ks = kink_surface(401, 4, 1.0);
    const ResidualReport rep = compare_closed_forms(ks.surf, ks.s, Order::fourth, 3, 1e-3, 1e-3);
    for (const Check& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.max;
}

TEST(SymmetrySurface, ScalingTheSymmetryScalesTheSurface) {
    const Grid2 g = Grid2::make(-3, 3, 121, -3, 3, 121);
    Kink k;
    const SGLaxData d = sg_lax_data(g, k, 1.3);
    const SymmetryField s = symmetry_field(g, d_dv(k), k);
    const SGSurface a = sg_surface(d, s), b = sg_surface(d, scaled(s, -2.5));
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        err = std::max(err, (b.F[i] + 2.5 * a.F[i]).norm());
        scale = std::max(scale, a.F[i].norm());
    }
    EXPECT_LE(err, 1e-12 * scale);
}

TEST(SymmetrySurface, FrameGaugeRotatesTheSurface) {
    const double t = 0.9;
    Mat2c g0 = (std::cos(t) * Mat2c::Identity() + std::complex<double>(0, std::sin(t)) *
                                                      (0.6 * pauli().s1 + 0.8 * pauli().s3));
    const KinkSurface a = kink_surface(121, 3, 1.0), b = kink_surface(121, 3, 1.0, g0);
    // Phi -> Phi g0 conjugates F by g0, a rotation of the coordinates
    double err = 0.0;
    for (std::size_t k = 0; k < a.surf.F.size(); ++k) {
        const Mat2c expect = g0.inverse() * a.surf.F_matrix[k] * g0;
        err = std::max(err, (b.surf.F_matrix[k] - expect).norm());
        EXPECT_NEAR(a.surf.F[k].norm(), b.surf.F[k].norm(), 1e-9);
    }
    EXPECT_LT(err, 1e-9);
}

TEST(SymmetrySurface, FlippedATermBreaksCompatibility) {
    const Grid2 g = Grid2::make(-3, 3, 121, -3, 3, 121);
    Kink k;
    const SGLaxData d = sg_lax_data(g, k, 1.0);
    const SymmetryField s = symmetry_field(g, d_dv(k), k);
    auto [A, B] = sg_surface_connection(d, s, ATerm::linearised);
    auto [Af, Bf] = sg_surface_connection(d, s, ATerm::flipped);
    const MatrixField2 U = d.U_field(), V = d.V_field();
    const Mask m = interior_mask(g, 2);
    EXPECT_TRUE(connection_residual(U, V, A, B, Order::fourth, 1e-4, &m).report.pass());
    EXPECT_FALSE(connection_residual(U, V, Af, Bf, Order::fourth, 1e-4, &m).report.pass());
}

TEST(SymmetrySurface, EulerReportIsConsistent) {
    const KinkSurface ks = kink_surface(401, 4, 1.0);
    const EulerReport e = euler_characteristic(ks.surf, ks.d, ks.s, Order::fourth, 3, 1e-3, 1e-3);
    // Stokes: the area integral equals the boundary form
    EXPECT_NEAR(e.formula_signed, e.boundary_form, 1e-6);
    EXPECT_GE(e.formula_abs, std::abs(e.formula_signed));
    EXPECT_TRUE(e.report.get("integrand_identity").pass) << e.report.get("integrand_identity").max;
    EXPECT_GE(e.excluded_fraction, 0.0);
    EXPECT_LE(e.excluded_fraction, 1.0);
}
