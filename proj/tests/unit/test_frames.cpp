#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <random>

#include "solsurf/frames/cocycle.hpp"
#include "solsurf/frames/sl2.hpp"
#include "solsurf/frames/zero_curvature.hpp"
#include "solsurf/soliton/sg_surface.hpp"

using namespace solsurf;

namespace {

const std::complex<double> I(0.0, 1.0);

MatrixField2 constant_field(const Grid2& g, const Mat2c& m) {
    return sample_matrix<Mat2c>(g, AlgebraTag::su2, [&](double, double) { return m; });
}

double max_of(const RealField& f) {
    double m = 0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST(Pauli, ProductRelations) {
    const auto& p = pauli();
    EXPECT_LE((p.s1 * p.s2 - I * p.s3).norm(), 1e-15);
    EXPECT_LE((p.s2 * p.s3 - I * p.s1).norm(), 1e-15);
    EXPECT_LE((p.s3 * p.s1 - I * p.s2).norm(), 1e-15);
    for (int k = 0; k < 3; ++k) EXPECT_LE((p[k] * p[k] - Mat2c::Identity()).norm(), 1e-15);
}

TEST(MatrixField, RejectsPatternViolation) {
    Grid2 g = Grid2::make(0, 1, 3, 0, 1, 3);
    EXPECT_THROW(constant_field(g, Mat2c::Identity()), Error);
    EXPECT_NO_THROW(constant_field(g, -I * pauli().s2));
    Mat3 skew = Mat3::Zero();
    skew(0, 1) = 1;
    skew(1, 0) = -1;
    EXPECT_NO_THROW(sample_matrix<Mat3>(g, AlgebraTag::so3, [&](double, double) { return skew; }));
    EXPECT_THROW(sample_matrix<Mat3>(g, AlgebraTag::so21, [&](double, double) { return skew; }), Error);
    Mat3 boost = Mat3::Zero();
    boost(0, 1) = boost(1, 0) = 1;
    EXPECT_NO_THROW(sample_matrix<Mat3>(g, AlgebraTag::so21, [&](double, double) { return boost; }));
}

TEST(ZeroCurvature, TrivialAndConstantPair) {
    Grid2 g = Grid2::make(-1, 1, 11, -1, 1, 11);
    auto z = zero_curvature_residual(constant_field(g, Mat2c::Zero()), constant_field(g, Mat2c::Zero()));
    EXPECT_EQ(z.report.get("zero_curvature").max, 0.0);
    auto r = zero_curvature_residual(constant_field(g, -0.5 * I * pauli().s1), constant_field(g, -0.5 * I * pauli().s2));
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_LE((r.residual[k] - (-0.5 * I * pauli().s3)).norm(), 1e-15);
        EXPECT_NEAR(r.norm[k], 0.5, 1e-15);
    }
    EXPECT_FALSE(r.report.pass());
}

TEST(ZeroCurvature, TagMismatchRejected) {
    Grid2 g = Grid2::make(0, 1, 3, 0, 1, 3);
    MatrixField2 a = constant_field(g, Mat2c::Zero());
    MatrixField2 b = a;
    b.tag = AlgebraTag::sl2r;
    EXPECT_THROW(zero_curvature_residual(a, b), Error);
}

TEST(ZeroCurvature, SineGordonLaxPairConvergesSecondOrder) {
    for (double lambda : {0.5, 1.0, 2.0}) {
        Grid2 g = Grid2::make(-4, 4, 101, -4, 4, 101);
        auto coarse = sg_lax_data(g, Kink{}, lambda);
        auto fine = sg_lax_data(g.refined(), Kink{}, lambda);
        const double rc = zero_curvature_residual(coarse.U_field(), coarse.V_field()).report.get("zero_curvature").max;
        const double rf = zero_curvature_residual(fine.U_field(), fine.V_field()).report.get("zero_curvature").max;
        EXPECT_GT(rc / rf, 3.5) << lambda;
        EXPECT_LT(rc / rf, 4.5) << lambda;
        const double r4 = zero_curvature_residual(fine.U_field(), fine.V_field(), Orientation::uv, Order::fourth)
                              .report.get("zero_curvature")
                              .max;
        EXPECT_LT(r4, rf / 10) << lambda;
    }
}

TEST(ZeroCurvature, OffShellAngleLeavesResidual) {
    Grid2 g = Grid2::make(-2, 2, 81, -2, 2, 81);
    auto d = sg_lax_data(g, [](auto u, auto v) { return u * v; }, 1.0);
    EXPECT_GT(zero_curvature_residual(d.U_field(), d.V_field()).report.get("zero_curvature").max, 0.1);
}

TEST(ZeroCurvature, SwapWithOrientationFlipNegates) {
    Grid2 g = Grid2::make(-2, 2, 41, -1, 1, 31);
    auto d = sg_lax_data(g, Kink{0.7, 0.2}, 1.3);
    auto a = zero_curvature_residual(d.U_field(), d.V_field(), Orientation::uv);
    auto b = zero_curvature_residual(d.V_field(), d.U_field(), Orientation::tx);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_LE((a.residual[k] + b.residual[k]).norm(), 1e-14);
}

TEST(Frame, TrivialConnectionGivesIdentity) {
    Grid2 g = Grid2::make(0, 1, 9, 0, 1, 7);
    auto fr = integrate_frame(constant_field(g, Mat2c::Zero()), constant_field(g, Mat2c::Zero()), Mat2c::Identity());
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_LE((fr.phi[k] - Mat2c::Identity()).norm(), 0.0);
}

TEST(Frame, ConstantConnectionMatchesExponential) {
    const double lambda = 1.7;
    Grid2 g = Grid2::make(-1, 1, 201, -1, 1, 21);
    const Mat2c U = -0.5 * I * lambda * pauli().s3;
    auto fr = integrate_frame(constant_field(g, U), constant_field(g, Mat2c::Zero()), Mat2c::Identity(), {100, 10});
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const Mat2c ex = (U * g.u(i)).exp();
            EXPECT_LE((fr.phi(i, j) - ex).cwiseAbs().maxCoeff(), 1e-9);
        }
}

TEST(Frame, SineGordonKinkStaysInSU2) {
    Grid2 g = Grid2::make(-4, 4, 201, -4, 4, 201);
    auto d = sg_lax_data(g, Kink{}, 1.0);
    auto fr = integrate_frame(d.U_field(), d.V_field(), Mat2c::Identity());
    double unit = 0, det = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        unit = std::max(unit, (fr.phi[k].adjoint() * fr.phi[k] - Mat2c::Identity()).cwiseAbs().maxCoeff());
        det = std::max(det, std::abs(fr.phi[k].determinant() - 1.0));
    }
    EXPECT_LE(unit, 1e-7);
    EXPECT_LE(det, 1e-7);
    EXPECT_TRUE(fr.report.get("cross_order").pass) << fr.report.get("cross_order").max;
    EXPECT_TRUE(fr.report.warnings.empty());
}

TEST(Frame, RightMultiplicationByConstantIsGaugeInvariant) {
    Grid2 g = Grid2::make(-2, 2, 81, -2, 2, 81);
    auto d = sg_lax_data(g, Kink{}, 0.8);
    const Mat2c f = (0.3 * I * pauli().s1 - 0.4 * I * pauli().s2 + 0.2 * I * pauli().s3).exp();
    auto a = integrate_frame(d.U_field(), d.V_field(), Mat2c::Identity());
    auto b = integrate_frame(d.U_field(), d.V_field(), f);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_LE((a.phi[k] * f - b.phi[k]).norm(), 1e-12);
    EXPECT_NEAR(a.report.get("cross_order").max, b.report.get("cross_order").max, 1e-12);
}

TEST(Frame, BaseNodeOutsideGridRejected) {
    Grid2 g = Grid2::make(0, 1, 5, 0, 1, 5);
    MatrixField2 z = constant_field(g, Mat2c::Zero());
    EXPECT_THROW(integrate_frame(z, z, Mat2c::Identity(), {7, 0}), Error);
}

TEST(SymConnection, ClosedFormMatchesIntegratedImmersion) {
    Grid2 g = Grid2::make(-2, 2, 81, -2, 2, 81);
    auto lax = [&](double l) {
        auto d = sg_lax_data(g, Kink{}, l);
        return std::pair{d.U_field(), d.V_field()};
    };
    const double lambda = 1.0;
    auto [U, V] = lax(lambda);
    auto phi = integrate_frame(U, V, Mat2c::Identity()).phi;
    auto dl = dphi_dlambda<Mat2c>(lax, lambda, Mat2c::Identity());
    // each coefficient alone, then all together with a constant M
    std::vector<SymCoefficients<Mat2c>> cases(6);
    cases[0].a1 = 1;
    cases[1].a2 = 1;
    cases[2].a3 = 1;
    cases[3].a4 = 1;
    cases[4].a5 = 1;
    cases[5] = {0.3, -0.2, 0.5, 0.1, 0.4, 0.25 * I * pauli().s1 - 0.1 * I * pauli().s3};
    for (std::size_t c = 0; c < cases.size(); ++c) {
        auto [A, B] = sym_connection<Mat2c>(lax, lambda, cases[c], Order::fourth);
        auto F = integrate_immersion(phi, A, B).F;
        auto Fc = sym_immersion_closed_form(phi, U, V, dl, cases[c]);
        const Mat2c shift = Fc[0] - F[0];
        double err = 0;
        for (std::size_t k = 0; k < g.size(); ++k) err = std::max(err, (F[k] + shift - Fc[k]).cwiseAbs().maxCoeff());
        EXPECT_LE(err, 1e-4) << "case " << c;
    }
}

TEST(Cocycle, TrivialCocycleVanishes) {
    Grid2 g = Grid2::make(0, 1, 5, 0, 1, 5);
    RealField z(g, 0.0);
    auto rep = mc_cocycle_residual({OneForm{z, z}, OneForm{z, z}, OneForm{z, z}});
    for (const auto& c : rep.checks) EXPECT_EQ(c.max, 0.0);
}

TEST(Cocycle, SineGordonPatternExact) {
    Grid2 g = Grid2::make(-4, 4, 81, -4, 4, 81);
    Kink kink;
    auto r = mc_residual_fields_exact(g, sg_cocycle_exact(kink));
    EXPECT_LE(max_of(r[0]), 1e-12);
    EXPECT_LE(max_of(r[1]), 1e-12);
    EXPECT_LE(max_of(r[2]), 1e-12);
    // off shell the third entry is exactly sin u - u_xt
    auto offshell = [](auto x, auto t) { return x * t * 0.5; };
    auto ro = mc_residual_fields_exact(g, sg_cocycle_exact(offshell));
    EXPECT_LE(max_of(ro[0]), 1e-12);
    EXPECT_LE(max_of(ro[1]), 1e-12);
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i)
            EXPECT_NEAR(ro[2](i, j), std::sin(0.5 * g.u(i) * g.v(j)) - 0.5, 1e-12);
}

TEST(Cocycle, SineGordonPatternFiniteDifference) {
    Grid2 g = Grid2::make(-4, 4, 401, -4, 4, 401);
    RealField u = sample(g, [](double x, double t) { return Kink{}(x, t); });
    auto rep = mc_cocycle_residual(sg_cocycle(u, Order::fourth), Order::fourth, {1e-12, 1e-5, 1e-5});
    EXPECT_LE(rep.get("mc_3").max, 1e-5);
    EXPECT_LE(rep.get("mc_2").max, 1e-5);
}

TEST(Cocycle, KdVPatternExact) {
    Grid2 g = Grid2::make(-6, 6, 61, -2, 2, 41);
    const double c = 1.0;
    auto soliton = [c](auto x, auto t) {
        using std::cosh;
        auto s = cosh((x - t * c) * (std::sqrt(c) / 2));
        return -(c / 2) / (s * s);
    };
    auto r = mc_residual_fields_exact(g, kdv_cocycle_exact(soliton));
    for (int k = 0; k < 3; ++k) EXPECT_LE(max_of(r[k]), 1e-12) << k;
    auto off = [](auto x, auto t) {
        using std::sin;
        return sin(x + t * 0.3) * 0.2;
    };
    auto ro = mc_residual_fields_exact(g, kdv_cocycle_exact(off));
    EXPECT_LE(max_of(ro[0]), 1e-12);
    EXPECT_GT(max_of(ro[1]), 1e-2);
    EXPECT_GT(max_of(ro[2]), 1e-2);
}

TEST(Cocycle, KdVPatternFiniteDifference) {
    Grid2 g = Grid2::make(-10, 10, 801, -2, 2, 161);
    RealField u = sample(g, [](double x, double t) { return -0.5 / std::pow(std::cosh(0.5 * (x - t)), 2); });
    auto rep = mc_cocycle_residual(kdv_cocycle(u, Order::fourth), Order::fourth, {1e-5, 1e-4, 1e-4});
    EXPECT_TRUE(rep.pass()) << rep.get("mc_1").max << " " << rep.get("mc_2").max << " " << rep.get("mc_3").max;
}

TEST(Cocycle, PullbackFormsAreSecondOrderExact) {
    auto run = [](int n) {
        Grid2 g = Grid2::make(-1, 1, n, -1, 1, n);
        RealField a = sample(g, [](double x, double t) { return std::exp(0.3 * x - 0.2 * t); });
        RealField b = sample(g, [](double x, double t) { return std::sin(x + 0.5 * t); });
        RealField c = sample(g, [](double x, double t) { return 0.4 * x * t + 0.3 * t; });
        auto rep = mc_cocycle_residual(pullback_forms(a, b, c));
        return std::max({rep.get("mc_1").max, rep.get("mc_2").max, rep.get("mc_3").max});
    };
    const double e1 = run(41), e2 = run(81);
    EXPECT_LE(e2, 2e-3);
    EXPECT_GT(observed_order(e1, e2), 1.8);
}

TEST(Sl2, IdentityAndRotation) {
    auto f = sl2_decompose(Mat2::Identity());
    EXPECT_DOUBLE_EQ(f.alpha, 1.0);
    EXPECT_DOUBLE_EQ(f.beta, 0.0);
    EXPECT_DOUBLE_EQ(f.gamma, 0.0);
    Mat2 r;
    r << std::cos(0.7), std::sin(0.7), -std::sin(0.7), std::cos(0.7);
    f = sl2_decompose(r);
    EXPECT_NEAR(f.alpha, 1.0, 1e-15);
    EXPECT_NEAR(f.beta, 0.0, 1e-15);
    EXPECT_NEAR(f.gamma, 0.7, 1e-15);
}

TEST(Sl2, RandomMatricesReconstruct) {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    int tested = 0;
    while (tested < 1000) {
        Mat2 x;
        x << dist(rng), dist(rng), dist(rng), dist(rng);
        double det = x.determinant();
        if (std::abs(det) < 0.05) continue;
        if (det < 0) x.row(0) *= -1.0, det = -det;
        x /= std::sqrt(det);
        auto f = sl2_decompose(x);
        EXPECT_GT(f.alpha, 0.0);
        EXPECT_GT(f.gamma, -M_PI);
        EXPECT_LE(f.gamma, M_PI);
        EXPECT_LE((f.product() - x).cwiseAbs().maxCoeff(), 1e-12);
        ++tested;
    }
}

TEST(Sl2, SpecialRowsAndBadDeterminant) {
    Mat2 x;
    x << 2.0, 0.0, 3.0, 0.5;  // x12 = 0, x11 > 0: beta = x21
    EXPECT_NEAR(sl2_decompose(x).beta, 3.0, 1e-15);
    x << 0.0, 2.0, -0.5, 1.5;  // x11 = 0, x12 > 0: beta = x22
    EXPECT_NEAR(sl2_decompose(x).beta, 1.5, 1e-15);
    x << 1.0, 1.0, 0.0, 2.0;
    EXPECT_THROW(sl2_decompose(x), Error);
}
