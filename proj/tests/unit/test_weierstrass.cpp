#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "solsurf/weierstrass/induce.hpp"

using namespace solsurf;

namespace {

Grid2 square(double L, int n) { return Grid2::make(-L, L, n, -L, L, n); }

const auto unit_h = [](auto x, auto y) { return x * 0.0 + y * 0.0 + 1.0; };

struct OnShell {
    Grid2 g;
    PoleConfig pc;
    SigmaField s;
    SpinorPair sp;
};

OnShell on_shell(std::vector<cd> poles, int n = 201, double r = -1.0, int eps = 1) {
    const Grid2 g = square(3, n);
    PoleConfig pc{std::move(poles), r};
    SigmaField s = sigma_exact(g, pc.rho(), pc.mask(g), eps);
    SpinorPair sp = rho_to_spinors_exact(s, pc.rho(), unit_h);
    return {g, pc, std::move(s), std::move(sp)};
}

}  // namespace

TEST(Jets, AlgebraMatchesExactComposite) {
    const Grid2 g = square(1, 9);
    const cd i(0, 1);
    auto a = [i](auto x, auto y) { return (x + i * y) * (x + i * y) + 0.3 * (x - i * y); };
    auto b = [i](auto x, auto y) { return 1.5 + (x - i * y) * (x + i * y) * 0.25 + 0.1 * i * x; };
    auto q = [&](auto x, auto y) { return a(x, y) * cj(b(x, y)) / (1.0 + a(x, y) * cj(a(x, y))); };
    const Mask all(g, 1);
    const ComplexJet ja = jet_exact(g, a, all), jb = jet_exact(g, b, all), jq = jet_exact(g, q, all);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const WJet A = ja.at(k), B = jb.at(k);
        const WJet Q = A * conj(B) / (1.0 + A * conj(A));
        EXPECT_NEAR(std::abs(Q.v - jq.f[k]), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(Q.d - jq.d[k]), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(Q.db - jq.db[k]), 0.0, 1e-13);
        EXPECT_NEAR(std::abs(Q.ddb - jq.ddb[k]), 0.0, 1e-12);
    }
}

TEST(Jets, FiniteDifferenceJetConverges) {
    const cd i(0, 1);
    auto f = [i](auto x, auto y) { return exp(0.5 * (x - i * y)) * sin(x + 0.3 * y); };
    double prev = 0.0;
    for (int n : {41, 81}) {
        const Grid2 g = square(1, n);
        const ComplexJet e = jet_exact(g, f, Mask(g, 1));
        const ComplexJet d = jet_fd(e.f, Order::fourth);
        double err = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (d.valid[k]) err = std::max({err, std::abs(d.d[k] - e.d[k]), std::abs(d.ddb[k] - e.ddb[k])});
        if (prev > 0.0) {
            EXPECT_GT(observed_order(prev, err), 3.5);
        }
        prev = err;
    }
}

TEST(PoleMask, ExcludesPolesAndMirrorImages) {
    const Grid2 g = square(3, 61);
    const Mask m = pole_mask(g, {cd(1, 1)}, 0.35);
    EXPECT_FALSE(m(40, 40));  // z = 1 + i
    EXPECT_FALSE(m(40, 20));  // z = 1 - i
    EXPECT_TRUE(m(20, 40));
    EXPECT_THROW(pole_mask(g, {}), Error);
    EXPECT_THROW(pole_mask(g, {cd(1, 0), cd(1, 0)}), Error);
    std::size_t out = 0;
    for (auto v : pole_mask(g, {cd(0.05, 0.05)}).values) out += v ? 0 : 1;
    EXPECT_GT(out, 0u);
}

TEST(Sigma, TrivialSolutions) {
    const Grid2 g = square(2, 41);
    const Mask all(g, 1);
    const SigmaField c = sigma_exact(g, [](auto x, auto y) { return x * 0.0 + y * 0.0 + cd(0.3, -0.2); }, all);
    EXPECT_EQ(sigma_residual(c).get("sigma").max, 0.0);
    const SigmaField z = sigma_exact(g, [](auto x, auto y) { return x + cd(0, 1) * y; }, all);
    EXPECT_EQ(sigma_residual(z).get("sigma").max, 0.0);
    EXPECT_EQ(sigma_residual(z).get("sigma_conjugate").max, 0.0);
}

TEST(Sigma, PoleProductsSolveTheSystem) {
    for (auto poles : std::vector<std::vector<cd>>{{1.0}, {1.0, cd(-1, 1)}, {1.0, cd(-1, 1), cd(0.5, -1.5)}}) {
        const OnShell t = on_shell(poles);
        const ResidualReport r = sigma_residual(t.s);
        EXPECT_TRUE(r.pass()) << r.get("sigma").max;
        EXPECT_LE(r.get("sigma").max, 1e-10);
        for (std::size_t k = 0; k < t.g.size(); ++k) {
            if (!t.s.rho.valid[k]) continue;
            EXPECT_NEAR(std::abs(t.s.rho.f[k]), 1.0, 1e-14);
            const cd z = t.g.z(static_cast<int>(k % t.g.nu), static_cast<int>(k / t.g.nu));
            const cd F = t.pc.rho().F(z), rho = t.s.rho.f[k];
            EXPECT_LE(std::abs(t.s.rho.d[k] - rho * F), 1e-8);
            EXPECT_LE(std::abs(t.s.rho.db[k] + rho * std::conj(F)), 1e-8);
        }
    }
}

TEST(Sigma, ProductOfUnimodularSolutionsIsSecondOrderWithDifferences) {
    // sampled product rho, derivatives by second-order differences
    double prev = 0.0;
    for (int n : {101, 201}) {
        const Grid2 g = square(3, n);
        const PoleConfig pc{{cd(1, 0.5), cd(-1.2, -0.4)}, 0.75};
        const ComplexField rho = sample(g, [&](double x, double y) { return pc.rho()(cd(x), cd(y)); });
        const Mask m = pc.mask(g), far = pole_mask(g, pc.poles, 1.0);
        const SigmaField s = sigma_sampled(rho, Order::second, &m);
        const double r = sigma_residual(s, nullptr, 1e-5, &far).get("sigma").max;
        if (prev > 0.0) {
            EXPECT_NEAR(observed_order(prev, r), 2.0, 0.3) << prev << " " << r;
        }
        prev = r;
    }
}

TEST(Sigma, NonSolutionIsDetected) {
    const Grid2 g = square(2, 81);
    const SigmaField s = sigma_exact(g, [](auto x, auto y) { return 0.5 * x * x + cd(0, 0.3) * y; }, Mask(g, 1));
    EXPECT_GT(sigma_residual(s).get("sigma").max, 1e-2);
}

TEST(Branch, TrackedRootIsContinuous) {
    // d rho = exp(z): the principal root jumps where Im z crosses pi, the
    // tracked root is exp(z/2) up to one global sign
    const Grid2 g = square(3.5, 141);
    const SigmaField s = sigma_exact(g, [](auto x, auto y) { return exp(x + cd(0, 1) * y); }, Mask(g, 1));
    EXPECT_TRUE(s.branch_points.empty());
    const cd z0 = g.z(s.base.i, s.base.j);
    const double sign0 = std::real(std::sqrt(std::exp(z0)) / std::exp(0.5 * z0));
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) {
            const cd w = static_cast<double>(s.branch(i, j)) * std::sqrt(s.rho.d[g.index(i, j)]);
            EXPECT_LE(std::abs(w - sign0 * std::exp(0.5 * g.z(i, j))), 1e-12);
        }
}

TEST(Branch, WindingAroundAPoleIsRecorded) {
    const OnShell t = on_shell({1.0});
    EXPECT_FALSE(t.s.branch_points.empty());
    EXPECT_EQ(t.sp.branch_points.size(), t.s.branch_points.size());
    // base root has nonnegative real part
    EXPECT_GE(std::real(std::sqrt(t.s.rho.d[t.g.index(t.s.base.i, t.s.base.j)])), 0.0);
    EXPECT_EQ(t.s.branch(t.s.base.i, t.s.base.j), 1);
}

TEST(Spinors, SinglePoleClosedForms) {
    const OnShell t = on_shell({1.0});
    const ComplexField J = current(t.sp);
    for (int j = 0; j < t.g.nv; ++j)
        for (int i = 0; i < t.g.nu; ++i) {
            const std::size_t k = t.g.index(i, j);
            if (!t.sp.valid[k]) continue;
            const cd z = t.g.z(i, j);
            EXPECT_LE(std::abs(t.sp.p[k] - 0.5 / std::abs(z - 1.0)), 1e-10);
            EXPECT_LE(std::abs(J[k] - 0.25 / ((z - 1.0) * (z - 1.0))), 1e-6);
            // J in terms of rho, constant H = 1
            const cd dr = t.s.rho.d[k], drb = std::conj(t.s.rho.db[k]);
            const double n = 1.0 + std::norm(t.s.rho.f[k]);
            EXPECT_LE(std::abs(J[k] + dr * drb / (n * n)), 1e-6);
        }
}

TEST(Spinors, MultiPoleCurrentAndDensity) {
    const OnShell t = on_shell({1.0, cd(-1, 1), cd(0.5, -1.5)});
    const ComplexField J = current(t.sp);
    for (int j = 0; j < t.g.nv; ++j)
        for (int i = 0; i < t.g.nu; ++i) {
            const std::size_t k = t.g.index(i, j);
            if (!t.sp.valid[k]) continue;
            const cd F = t.pc.rho().F(t.g.z(i, j));
            EXPECT_LE(std::abs(t.sp.p[k] - 0.5 * std::abs(F)), 1e-10);
            EXPECT_LE(std::abs(J[k] - 0.25 * F * F), 1e-6);
        }
}

TEST(Spinors, GWSystemOnAndOffShell) {
    const OnShell t = on_shell({1.0});
    const ResidualReport r = gw_residual(t.sp);
    EXPECT_TRUE(r.pass()) << r.get("gw_first").max;
    SpinorPair off = t.sp;
    for (ComplexField* f : {&off.psi1.f, &off.psi1.d, &off.psi1.db, &off.psi1.ddb})
        for (cd& v : f->values) v *= 1.1;
    for (std::size_t k = 0; k < off.p.size(); ++k) off.p[k] = std::norm(off.psi1.f[k]) + std::norm(off.psi2.f[k]);
    EXPECT_GE(gw_residual(off).get("gw_first").max, 1e-2);
    const Grid2 g = square(1, 11);
    const SpinorPair z = spinors_sampled(ComplexField(g, 0.0), ComplexField(g, 0.0));
    EXPECT_EQ(gw_residual(z).get("gw_first").max, 0.0);
    EXPECT_EQ(gw_residual(z).get("gw_second").max, 0.0);
}

TEST(Spinors, RoundTripAndEpsilonFlip) {
    const OnShell a = on_shell({1.0, cd(-1, 1)});
    const OnShell b = on_shell({1.0, cd(-1, 1)}, 201, -1.0, -1);
    const ComplexField rho = rho_from_spinors(a.sp);
    for (std::size_t k = 0; k < a.g.size(); ++k) {
        if (!a.sp.valid[k] || std::abs(a.sp.psi2.f[k]) == 0.0) continue;
        EXPECT_LE(std::abs(rho[k] - a.s.rho.f[k]), 1e-10);
        EXPECT_EQ(b.sp.psi1.f[k], -a.sp.psi1.f[k]);
        EXPECT_EQ(b.sp.psi2.f[k], -a.sp.psi2.f[k]);
    }
    const InducedSurface xa = induce_surface(a.sp, {20, 100}), xb = induce_surface(b.sp, {20, 100});
    for (std::size_t k = 0; k < a.g.size(); ++k)
        if (xa.valid[k]) {
            EXPECT_LE((xa.X[k] - xb.X[k]).norm(), 1e-12);
        }
}

TEST(Spinors, SampledMapAgreesWithExact) {
    const Grid2 g = square(3, 201);
    const PoleConfig pc{{1.0}, 0.75};
    const Mask m = pc.mask(g);
    const SigmaField se = sigma_exact(g, pc.rho(), m);
    const SpinorPair exact = rho_to_spinors_exact(se, pc.rho(), unit_h);
    const SpinorPair fd = rho_to_spinors(se, nullptr, Order::fourth);
    std::size_t used = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (exact.valid[k]) {
            EXPECT_LE(std::abs(fd.psi1.f[k] - exact.psi1.f[k]), 1e-14);
        }
        if (!fd.valid[k]) continue;
        ++used;
        EXPECT_LE(std::abs(fd.psi1.d[k] - exact.psi1.d[k]), 1e-4);
        EXPECT_LE(std::abs(fd.psi2.ddb[k] - exact.psi2.ddb[k]), 1e-3);
    }
    EXPECT_GT(used, g.size() / 2);
    EXPECT_LE(gw_residual(fd).get("gw_first").max, 1e-4);
}

TEST(Spinors, Preconditions) {
    const Grid2 g = square(2, 41);
    const Mask all(g, 1);
    auto rho = [](auto x, auto y) { return 0.5 * x * x + cd(0, 0.3) * y; };
    const SigmaField off = sigma_exact(g, rho, all);
    EXPECT_THROW(rho_to_spinors_exact(off, rho, unit_h), Error);
    const SigmaField z = sigma_exact(g, [](auto x, auto y) { return x + cd(0, 1) * y; }, all);
    EXPECT_THROW(rho_to_spinors_exact(z, [](auto x, auto y) { return x + cd(0, 1) * y; },
                                      [](auto x, auto y) { return x * 0.0 + y * 0.0 - 1.0; }),
                 Error);
    // d rho = 0 everywhere: no spinor node can be evaluated
    auto anti = [](auto x, auto y) { return x + cd(0, -1) * y; };
    const SigmaField a = sigma_exact(g, anti, all);
    EXPECT_TRUE(a.branch_points.empty());
    EXPECT_THROW(rho_to_spinors_exact(a, anti, unit_h), Error);
    EXPECT_THROW(MeanCurvatureField::uniform(g, 0.0), Error);
}

TEST(Conservation, OnShellAndPerturbed) {
    const OnShell t = on_shell({1.0});
    const ResidualReport r = conservation_residual(t.sp);
    for (const Check& c : r.checks) EXPECT_LE(c.max, 1e-6) << c.name;
    SpinorPair off = t.sp;
    for (cd& v : off.psi1.f.values) v += 0.05;
    double worst = 0.0;
    for (const Check& c : conservation_residual(off).checks) worst = std::max(worst, c.max);
    EXPECT_GE(worst, 1e-3);
}

TEST(Conservation, HolomorphicSecondSpinor) {
    const Grid2 g = square(1, 41);
    const cd i(0, 1);
    const SpinorPair s = spinors_exact(
        g, [](auto x, auto y) { return x * 0.0 + y * 0.0; },
        [i](auto x, auto y) { return (x + i * y) * (x + i * y) + 2.0; }, Mask(g, 1));
    const ResidualReport r = conservation_residual(s);
    EXPECT_EQ(r.get("law_1").max, 0.0);
    EXPECT_EQ(r.get("law_3").max, 0.0);
}

TEST(PEquation, OnShellAndOffShell) {
    const OnShell t = on_shell({1.0, cd(-1, 1)});
    EXPECT_TRUE(p_equation_residual(t.sp).pass()) << p_equation_residual(t.sp).get("p_equation").max;
    // the printed |J| form does not hold on shell
    EXPECT_GT(p_equation_residual(t.sp, nullptr, 1e-4, nullptr, PVariant::printed).get("p_equation").max, 1e-1);
    const Grid2 g = square(1, 61);
    const SpinorPair rnd = spinors_exact(
        g, [](auto x, auto y) { return sin(x) * 0.5 + cd(0, 0.2) * y + 1.0; },
        [](auto x, auto y) { return cos(y) * 0.3 + cd(0, 0.4) * x * y; }, Mask(g, 1));
    EXPECT_GE(p_equation_residual(rnd).get("p_equation").max, 1e-2);
}

TEST(SpinMatrix, ZeroRho) {
    const Grid2 g = square(1, 11);
    const SigmaField s = sigma_exact(g, [](auto x, auto y) { return x * 0.0 + y * 0.0; }, Mask(g, 1));
    const SpinField S = spin_matrix(s);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_EQ(S.S[k], (Mat2c() << 1.0, 0.0, 0.0, -1.0).finished());
        EXPECT_EQ(S.ddbS[k].norm(), 0.0);
    }
    EXPECT_EQ(ll_residual(s).get("landau_lifshitz").max, 0.0);
}

TEST(SpinMatrix, AlgebraAndClosedFormOffShell) {
    const Grid2 g = square(1, 21);
    const cd i(0, 1);
    const SigmaField s = sigma_exact(
        g, [i](auto x, auto y) { return 0.3 * (x - i * y) * (x - i * y) + 0.5 * (x + i * y) + 0.1 + 0.2 * x * y; },
        Mask(g, 1));
    const ResidualReport r = ll_residual(s);
    EXPECT_LE(r.get("spin_algebra").max, 1e-12);
    EXPECT_LE(r.get("closed_form").max, 1e-10);
    EXPECT_GT(r.get("closed_form_printed").max, 1e-2);
    EXPECT_GT(r.get("landau_lifshitz").max, 1e-2);
}

TEST(SpinMatrix, PoleSolutionsSolveLandauLifshitz) {
    const OnShell t = on_shell({1.0, cd(-1, 1)});
    const ResidualReport r = ll_residual(t.s);
    EXPECT_TRUE(r.pass());
    EXPECT_LE(r.get("landau_lifshitz").max, 1e-5);
}

TEST(NonconstantH, ManufacturedPair) {
    const Grid2 g = square(3, 201);
    const TanhCurvature hc;
    const TanhSigmaSolution rs;
    const SigmaField s = sigma_exact(g, rs, Mask(g, 1));
    const MeanCurvatureField H = MeanCurvatureField::exact(g, hc);
    EXPECT_LE(sigma_residual(s, &H).get("sigma").max, 1e-10);
    // without the forcing the same rho is off shell
    EXPECT_GT(sigma_residual(s).get("sigma").max, 1e-2);
    const SpinorPair sp = rho_to_spinors_exact(s, rs, hc);
    EXPECT_LE(gw_residual(sp, &H).get("gw_first").max, 1e-10);
    EXPECT_LE(gw_residual(sp, &H).get("gw_second").max, 1e-10);
    const ResidualReport c = conservation_residual(sp, &H);
    EXPECT_LE(c.get("augmented_current").max, 1e-10);
    EXPECT_GT(c.get("current").max, 1e-4);
    EXPECT_LE(c.get("law_3").max, 1e-10);
    EXPECT_GT(c.get("law_3_printed").max, 1e-3);
    EXPECT_LE(p_equation_residual(sp, &H).get("p_equation").max, 1e-10);
    const ResidualReport ll = ll_residual(s, &H, 1e-4);
    EXPECT_TRUE(ll.get("landau_lifshitz").pass);
    EXPECT_GT(ll.get("landau_lifshitz").excluded, 0u);
    EXPECT_GT(ll_residual(s, &H, 1e-4, nullptr, LLVariant::printed).get("landau_lifshitz").max, 1e-2);
}

TEST(NonconstantH, SampledCurvatureDerivative) {
    const Grid2 g = square(3, 201);
    const MeanCurvatureField a = MeanCurvatureField::exact(g, TanhCurvature{});
    const MeanCurvatureField b = MeanCurvatureField::sampled(a.H, Order::fourth);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_LE(std::abs(a.dlnH[k] - b.dlnH[k]), 1e-5);
}

TEST(Induce, ZeroSpinorsGiveThePoint) {
    const Grid2 g = square(1, 21);
    const SpinorPair z = spinors_sampled(ComplexField(g, 0.0), ComplexField(g, 0.0));
    const InducedSurface x = induce_surface(z, {10, 10});
    for (const Vec3& p : x.X.values) EXPECT_EQ(p.norm(), 0.0);
}

TEST(Induce, SinglePoleGivesACylinder) {
    const OnShell t = on_shell({1.0}, 201, 0.5);
    const InducedSurface x = induce_surface(t.sp, {20, 100});
    EXPECT_TRUE(x.report.warnings.empty());
    EXPECT_LE(x.report.get("path_independence").max, 1e-5);
    // X1 + i X2 = -(i/2) conj(rho) + C, X3 = -ln|z - 1| + C
    const std::size_t k0 = t.g.index(20, 100);
    const cd c0 = cd(x.X[k0][0], x.X[k0][1]) + cd(0, 0.5) * std::conj(t.s.rho.f[k0]);
    const double c3 = x.X[k0][2] + std::log(std::abs(t.g.z(20, 100) - 1.0));
    for (int j = 0; j < t.g.nv; ++j)
        for (int i = 0; i < t.g.nu; ++i) {
            const std::size_t k = t.g.index(i, j);
            if (!x.valid[k]) continue;
            EXPECT_LE(std::abs(cd(x.X[k][0], x.X[k][1]) - c0 + cd(0, 0.5) * std::conj(t.s.rho.f[k])), 1e-5);
            EXPECT_NEAR(x.X[k][2], c3 - std::log(std::abs(t.g.z(i, j) - 1.0)), 1e-5);
        }
}

TEST(Induce, ClassicalFlagHalvesTheSurface) {
    const OnShell t = on_shell({1.0, cd(-1, 1)}, 201, 0.5);
    InduceOptions o;
    const InducedSurface a = induce_surface(t.sp, {20, 100}, o);
    o.norm = Normalization::classical;
    const InducedSurface b = induce_surface(t.sp, {20, 100}, o);
    for (std::size_t k = 0; k < t.g.size(); ++k)
        if (a.valid[k]) {
            EXPECT_LE((a.X[k] - 2.0 * b.X[k]).norm(), 1e-12);
        }
}

TEST(Induce, ClassicalMinimalSurface) {
    const Grid2 g = square(1, 201);
    const cd i(0, 1);
    const SpinorPair s = spinors_exact(
        g, [i](auto x, auto y) { return x - i * y; }, [](auto x, auto y) { return x * 0.0 + y * 0.0 + 1.0; },
        Mask(g, 1));
    InduceOptions o;
    o.norm = Normalization::classical;
    const InducedSurface x = induce_surface(s, {100, 100}, o);
    const FormField ff = fundamental_forms(x.X, +1, Order::fourth);
    double hmax = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) hmax = std::max(hmax, std::abs(ff.H[k]));
    EXPECT_LE(hmax, 1e-3);
    // metric p^2 |dz|^2 with p = 1 + |z|^2: K = -4/(1 + |z|^2)^4
    SurfaceChecks sc;
    sc.h_tol = std::numeric_limits<double>::infinity();
    const ResidualReport r = induced_geometry(x, s, nullptr, sc, Normalization::classical);
    for (const Check& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.max;
    const RealField K = curvature_from_p(s, 0.25);
    EXPECT_NEAR(K(100, 100), -4.0, 1e-12);
    EXPECT_NEAR(K(200, 200), -4.0 / std::pow(3.0, 4), 1e-12);
}

TEST(Induce, OffShellSpinorsAreRejectedOrFlagged) {
    const OnShell t = on_shell({1.0}, 201, 0.5);
    SpinorPair off = t.sp;
    for (cd& v : off.psi1.f.values) v *= 1.1;
    for (cd& v : off.psi1.d.values) v *= 1.1;
    EXPECT_THROW(induce_surface(off, {20, 100}), Error);
    InduceOptions o;
    o.conservation_tol = std::numeric_limits<double>::infinity();
    const InducedSurface x = induce_surface(off, {20, 100}, o);
    EXPECT_FALSE(x.report.get("path_independence").pass);
    EXPECT_FALSE(x.report.warnings.empty());
    EXPECT_EQ(x.report.warnings.front(), "inexact closure");
}

TEST(Induce, ConformalMetricAndConstantMeanCurvature) {
    const OnShell t = on_shell({1.0}, 201, 0.5);
    const InducedSurface x = induce_surface(t.sp, {20, 100});
    SurfaceChecks sc;
    sc.check_curvature = false;
    const ResidualReport r = induced_geometry(x, t.sp, nullptr, sc);
    for (const Check& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.max;
    EXPECT_NEAR(std::abs(r.get("h_relative_std").mean), 1.0, 1e-3);
}

TEST(Induce, PoleProductSurfacesAreFlat) {
    // ln p = ln|sum 1/(z - a_j)| - ln 2 is harmonic, so K vanishes
    const OnShell t = on_shell({1.0, cd(-1, 1)}, 201, 0.5);
    const RealField K = curvature_from_p(t.sp);
    for (std::size_t k = 0; k < K.size(); ++k)
        if (t.sp.valid[k] && t.sp.p[k] > 1e-2) {
            EXPECT_LE(std::abs(K[k]), 1e-8);
        }
}

TEST(Induce, PrescribedMeanCurvatureAndDensityCurvature) {
    const Grid2 g = square(3, 201);
    const TanhCurvature hc;
    const TanhSigmaSolution rs;
    const SigmaField s = sigma_exact(g, rs, Mask(g, 1));
    const MeanCurvatureField H = MeanCurvatureField::exact(g, hc);
    const SpinorPair sp = rho_to_spinors_exact(s, rs, hc);
    const InducedSurface x = induce_surface(sp, {100, 100});
    EXPECT_TRUE(x.report.warnings.empty());
    const ResidualReport r = induced_geometry(x, sp, nullptr, {}, Normalization::generalized, &H);
    for (const Check& c : r.checks) EXPECT_TRUE(c.pass) << c.name << " " << c.max;
    EXPECT_GT(r.get("h_relative_std").max, 1e-2);
}

TEST(Quartic, GradientMatchesDifferences) {
    const Vec3 X(0.3, -0.4, 0.2);
    const Vec3 gr = quartic_gradient(X, 1.3);
    for (int c = 0; c < 3; ++c) {
        Vec3 e = Vec3::Zero();
        e[c] = 1e-6;
        EXPECT_NEAR(gr[c], (quartic_lhs(X + e, 1.3) - quartic_lhs(X - e, 1.3)) / 2e-6, 1e-6);
    }
}

TEST(Quartic, SinglePoleSurfaceIsNotOnTheQuartic) {
    // the induced surface is a round cylinder; the fit zeroes the reference
    // node but the relation fails elsewhere (see the decision ledger)
    const OnShell t = on_shell({1.0}, 201, 0.5);
    InducedSurface x = induce_surface(t.sp, {20, 100});
    const ResidualReport r = quartic_check(x, 1.0, {20, 100});
    EXPECT_LE(std::abs(quartic_lhs(x.X(20, 100), 1.0)), 1e-12);
    EXPECT_FALSE(r.get("quartic_fraction").pass);
    EXPECT_LT(r.get("quartic_fraction").max, 0.01);
}
