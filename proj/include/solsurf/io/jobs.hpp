#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "solsurf/backlund/backlund.hpp"
#include "solsurf/frames/cocycle.hpp"
#include "solsurf/io/config.hpp"
#include "solsurf/soliton/sg_surface.hpp"
#include "solsurf/weierstrass/induce.hpp"

namespace solsurf::io {

/// Surface produced by a job, with the nodes to export.
struct MeshArtifact {
    std::string suffix;  ///< appended to the output stem; empty for the main surface
    Immersion3 X;
    Mask keep;
};

/// Outcome of one job: checks, named scalar values and meshes.
struct JobResult {
    ResidualReport report;
    json values = json::object();
    std::vector<MeshArtifact> meshes;

    bool pass() const { return report.pass(); }
};

namespace detail {

/// Runs one stage; a library error becomes a failing "<prefix>error" entry
/// and stops the job, so the report stays partial but well-formed.
inline bool stage(JobResult& r, const std::string& prefix, const std::function<void()>& f) {
    try {
        f();
        return true;
    } catch (const Error& e) {
        Check c;
        c.name = prefix + "error";
        c.max = std::numeric_limits<double>::infinity();
        c.note = e.what();
        r.report.add(c);
        r.report.warnings.push_back(prefix + "stage aborted: " + e.what());
        return false;
    }
}

inline void add(JobResult& r, const ResidualReport& rep, const std::string& prefix) { r.report.merge(rep, prefix); }

/// Sets the tolerance of an existing entry and judges it again.
inline void retol(ResidualReport& rep, const std::string& name, double tol, Bound bound = Bound::at_most) {
    for (Check& c : rep.checks)
        if (c.name == name) {
            c.tol = tol;
            c.bound = bound;
            c.judge();
        }
}

inline double param(const json& p, const char* key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->get<double>();
}

inline std::string param(const json& p, const char* key, const char* fallback) {
    auto it = p.find(key);
    return it == p.end() ? std::string(fallback) : it->get<std::string>();
}

inline Check scalar_check(std::string name, double value, double tol, std::size_t nodes = 0) {
    Check c;
    c.name = std::move(name);
    c.max = c.mean = value;
    c.tol = tol;
    c.nodes = nodes;
    return c;
}

// spinors, conservation, surface and geometry of one rho/H pair
template <class R, class HF>
void weierstrass_core(JobResult& r, const JobConfig& c, const Grid2& g, const R& rho, const HF& h, const Mask& where,
                      const MeanCurvatureField& H) {
    const json& p = c.params;
    const int eps = p.contains("epsilon") ? p["epsilon"].get<int>() : 1;
    SigmaField s;
    SpinorPair sp;
    if (!stage(r, "sigma.", [&] {
            s = sigma_exact(g, rho, where, eps);
            add(r, sigma_residual(s, &H, c.t("sigma")), "sigma.");
            r.values["branch_points"] = s.branch_points.size();
        }))
        return;
    if (!stage(r, "spinors.", [&] {
            sp = rho_to_spinors_exact(s, rho, h, c.t("sigma"));
            add(r, gw_residual(sp, &H, c.t("gw")), "spinors.");
            add(r, conservation_residual(sp, &H, c.t("conservation")), "conservation.");
            add(r, p_equation_residual(sp, &H, c.t("p_equation")), "p_equation.");
            add(r, ll_residual(s, &H, c.t("landau_lifshitz")), "landau_lifshitz.");
        }))
        return;
    InduceOptions opt;
    opt.norm = param(p, "normalization", "generalized") == "classical" ? Normalization::classical
                                                                        : Normalization::generalized;
    opt.seed = c.seed;
    opt.path_tol = c.t("path_independence");
    opt.H = &H;
    if (p.contains("spot_checks")) opt.spot_checks = p["spot_checks"].get<int>();
    Node base;
    InducedSurface x;
    if (!stage(r, "surface.", [&] {
            base = solsurf::detail::nearest_valid(sp.valid, solsurf::detail::grid_centre(g));
            if (p.contains("base")) {
                base = {p["base"][0].get<int>(), p["base"][1].get<int>()};
                require(g.contains(base.i, base.j) && sp.valid(base.i, base.j), "base node is not a valid spinor node");
            }
            r.values["base"] = {base.i, base.j};
            x = induce_surface(sp, base, opt);
            add(r, x.report, "surface.");
        }))
        return;
    stage(r, "geometry.", [&] {
        SurfaceChecks sc;
        sc.h_tol = c.t("h_relative_std");
        sc.conformal_tol = c.t("conformal");
        sc.curvature_tol = c.t("curvature");
        sc.min_p = param(p, "min_p", 0.0);
        const ResidualReport geo = induced_geometry(x, sp, nullptr, sc, opt.norm, H.constant ? nullptr : &H);
        add(r, geo, "geometry.");
        if (H.constant) r.values["mean_curvature_measured"] = number(geo.get("h_relative_std").mean);
    });
    if (p.contains("quartic_a"))
        stage(r, "quartic.", [&] {
            InducedSurface q = x;
            add(r, quartic_check(q, p["quartic_a"].get<double>(), base, c.t("quartic"), c.t("quartic_fraction")),
                "quartic.");
        });
    r.meshes.push_back({"", x.X, x.valid});
}

inline JobResult run_weierstrass(const JobConfig& c) {
    JobResult r;
    const Grid2 g = c.grid.grid();
    const json& rho = c.params["rho"];
    const double radius = param(c.params, "exclusion_radius", -1.0);
    if (rho["family"] == "poles") {
        std::vector<cd> poles;
        for (const json& q : rho["poles"]) poles.emplace_back(q[0].get<double>(), q[1].get<double>());
        const double h0 = param(c.params, "mean_curvature", 1.0);
        const auto h = [h0](auto x, auto y) { return x * 0.0 + y * 0.0 + h0; };
        PoleConfig pc{poles, radius};
        Mask where;
        if (!stage(r, "input.", [&] { where = pc.mask(g); })) return r;
        weierstrass_core(r, c, g, pc.rho(), h, where, MeanCurvatureField::uniform(g, h0));
    } else {
        const TanhCurvature hc{param(rho, "amp", 0.25)};
        const TanhSigmaSolution rs{hc.amp, param(rho, "c", 0.3), param(rho, "beta", 0.4)};
        MeanCurvatureField H;
        if (!stage(r, "input.", [&] { H = MeanCurvatureField::exact(g, hc); })) return r;
        weierstrass_core(r, c, g, rs, hc, Mask(g, 1), H);
    }
    return r;
}

inline JobResult run_soliton_surface(const JobConfig& c) {
    JobResult r;
    const Grid2 g = c.grid.grid();
    const double lambda = param(c.params, "lambda", 1.0);
    Kink k;
    if (c.params.contains("kink")) {
        k.a = param(c.params["kink"], "a", 1.0);
        k.c = param(c.params["kink"], "c", 0.0);
    }
    SGLaxData d;
    SymmetryField s;
    SGSurface surf;
    if (!stage(r, "lax.", [&] {
            d = sg_lax_data(g, k, lambda);
            s = symmetry_field(g, d_dv(k), k);
            const Order lax = param(c.params, "lax_order", "second") == "fourth" ? Order::fourth : Order::second;
            add(r, zero_curvature_residual(d.U_field(), d.V_field(), Orientation::uv, lax,
                                           c.t("zero_curvature"))
                       .report,
                "lax.");
        }))
        return r;
    if (!stage(r, "surface.", [&] {
            surf = sg_surface(d, s, {0, 0}, Mat2c::Identity(), ATerm::linearised, c.t("input"));
            ResidualReport rep = surf.report;
            retol(rep, "frame_cross_order", c.t("cross_order"));
            retol(rep, "immersion_cross_order", c.t("cross_order"));
            add(r, rep, "surface.");
            RealField unit(g), det(g);
            for (std::size_t q = 0; q < g.size(); ++q) {
                const Mat2c& f = surf.frame[q];
                unit[q] = (f.adjoint() * f - Mat2c::Identity()).cwiseAbs().maxCoeff();
                det[q] = std::abs(f.determinant() - 1.0);
            }
            r.report.add(measure("surface.frame_unitarity", unit, nullptr, c.t("frame_group")));
            r.report.add(measure("surface.frame_determinant", det, nullptr, c.t("frame_group")));
        }))
        return r;
    stage(r, "closed_forms.", [&] {
        add(r, compare_closed_forms(surf, s, Order::fourth, 3, c.t("closed_forms")), "closed_forms.");
    });
    stage(r, "euler.", [&] {
        const EulerReport e = euler_characteristic(surf, d, s, Order::fourth, 3, c.t("integrand_identity"));
        add(r, e.report, "euler.");
        r.values["euler"] = {{"formula_signed", number(e.formula_signed)},
                             {"formula_abs", number(e.formula_abs)},
                             {"boundary_form", number(e.boundary_form)},
                             {"mesh_signed", number(e.fd_signed)},
                             {"gauss_bonnet", number(e.gauss_bonnet)},
                             {"welded_chi", e.welded_chi},
                             {"closure_gap", number(e.closure_gap)},
                             {"excluded_fraction", number(e.excluded_fraction)}};
    });
    r.meshes.push_back({"", surf.F, Mask(g, 1)});
    return r;
}

inline JobResult run_backlund(const JobConfig& c) {
    JobResult r;
    const Grid2 g = c.grid.grid();
    const Node base = solsurf::detail::grid_centre(g);
    const std::string seed_kind = param(c.params, "seed_solution", "vacuum");
    const double a = param(c.params, "a_param", 1.0);
    const double init = param(c.params, "initial_value", std::numbers::pi);
    SGSolution u0;
    AutoBT bt;
    if (!stage(r, "backlund.", [&] {
            u0 = seed_kind == "vacuum" ? sg_solution(g, [](auto x, auto t) { return x * 0.0 + t * 0.0; })
                                       : sg_solution(g, VacuumKink(1.0, 0.0, 0.0, std::numbers::pi));
            bt = auto_bt(u0, a, init, base, Order::fourth, c.t("input"), c.t("sine_gordon"));
            add(r, bt.report, "backlund.");
            r.values["degenerate"] = bt.degenerate;
        }))
        return r;
    if (seed_kind == "vacuum" && init > 0.0 && init < 2.0 * std::numbers::pi) {
        const VacuumKink k(a, g.u(base.i), g.v(base.j), init);
        RealField err(g);
        for (int j = 0; j < g.nv; ++j)
            for (int i = 0; i < g.nu; ++i) err(i, j) = std::abs(bt.u.u(i, j) - k(g.u(i), g.v(j)));
        r.report.add(measure("backlund.kink_sup_error", err, nullptr, c.t("kink")));
        r.values["kink_phase"] = number(k.c);
    }
    if (c.params.contains("psi0"))
        stage(r, "psi.", [&] {
            const BTPsi p = bt_psi(bt.u, c.params["psi0"].get<double>(), base, c.t("input"));
            add(r, p.report, "psi.");
            add(r, bt_eliminant_check(p.psi, &bt.u.u, Order::fourth, 2, c.t("psi_equation"), c.t("eliminant")),
                "psi.");
        });
    Immersion3 graph(g);
    for (int j = 0; j < g.nv; ++j)
        for (int i = 0; i < g.nu; ++i) graph(i, j) = Vec3(g.u(i), g.v(j), bt.u.u(i, j));
    r.meshes.push_back({"", graph, Mask(g, 1)});
    return r;
}

inline double max_dev(const RealField& f, double target, const Mask& m) {
    double e = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k)
        if (m[k]) e = std::max(e, std::abs(f[k] - target));
    return e;
}

inline std::size_t count(const Mask& m) {
    std::size_t n = 0;
    for (auto x : m.values) n += x ? 1 : 0;
    return n;
}

inline JobResult run_classical(const JobConfig& c) {
    JobResult r;
    const int nu = c.grid.nu, nv = c.grid.nv;
    std::vector<std::string> surfaces{"sphere", "plane", "tractroid", "pseudospherical"};
    if (c.params.contains("surfaces")) surfaces = c.params["surfaces"].get<std::vector<std::string>>();
    const double pi = std::numbers::pi;
    for (const std::string& name : surfaces) {
        const std::string pre = name + ".";
        stage(r, pre, [&] {
            if (name == "pseudospherical") {
                const Grid2 g = Grid2::make(-3, 3, nu, -3, 3, nv);
                const RealField w = sample(g, [](double u, double v) { return 4 * std::atan(std::exp(u + v)); });
                add(r, check_pseudospherical(w, 1.0, c.t("pseudospherical"), Order::fourth, 2, 1e-3,
                                             c.t("pseudospherical")),
                    pre);
                return;
            }
            Immersion3 X;
            double K0 = 0.0, H0 = 0.0, tol = 0.0;
            if (name == "sphere") {
                const Grid2 g = Grid2::make(0.1, 2 * pi - 0.1, nu, -1.3, 1.3, nv);
                X = sample(g, [](double u, double v) {
                    return Vec3(std::cos(u) * std::cos(v), std::sin(u) * std::cos(v), std::sin(v));
                });
                K0 = H0 = 1.0;
                tol = c.t("sphere");
            } else if (name == "plane") {
                const Grid2 g = Grid2::make(-1, 1, nu, -1, 1, nv);
                X = sample(g, [](double u, double v) { return Vec3(u, v, 0.3 * u - 0.2 * v + 0.5); });
                tol = c.t("plane");
            } else {
                const Grid2 g = Grid2::make(0.2, 3.0, nu, 0.0, 2 * pi, nv);
                X = sample(g, [](double u, double v) {
                    return Vec3(std::cos(v) / std::cosh(u), std::sin(v) / std::cosh(u), u - std::tanh(u));
                });
                K0 = -1.0;
                tol = c.t("tractroid");
            }
            const FormField ff = fundamental_forms(X, +1, Order::fourth);
            const std::size_t n = count(ff.regular);
            r.report.add(scalar_check(pre + "gauss_curvature", max_dev(ff.K, K0, ff.regular), tol, n));
            if (name != "tractroid")
                r.report.add(scalar_check(pre + "mean_curvature", max_dev(ff.H, H0, ff.regular), tol, n));
            if (name == "plane")
                for (const auto& [lbl, f] : {std::pair{"second_form_e", &ff.e}, std::pair{"second_form_f", &ff.f},
                                             std::pair{"second_form_g", &ff.g}})
                    r.report.add(scalar_check(pre + lbl, max_dev(*f, 0.0, ff.regular), tol, n));
            const Mask in = interior_mask(ff.grid, 2);
            add(r, mainardi_codazzi_residual(ff, c.t("codazzi"), Order::fourth, &in), pre);
            r.meshes.push_back({"_" + name, X, Mask(X.grid, 1)});
        });
    }
    return r;
}

inline JobResult run_cocycle(const JobConfig& c) {
    JobResult r;
    std::vector<std::string> systems{"sine-gordon", "kdv"};
    if (c.params.contains("systems")) systems = c.params["systems"].get<std::vector<std::string>>();
    const bool exact = param(c.params, "mode", "exact") == "exact";
    const double id = c.t("identity"), on = c.t("on_shell");
    for (const std::string& sys : systems) {
        const std::string pre = (sys == "kdv" ? std::string("kdv.") : std::string("sine_gordon."));
        stage(r, pre, [&] {
            if (sys == "sine-gordon") {
                const Grid2 g = Grid2::make(-4, 4, c.grid.nu, -4, 4, c.grid.nv);
                const Kink kink;
                if (exact) {
                    add(r, mc_cocycle_residual_exact(g, sg_cocycle_exact(kink), {id, id, on}), pre);
                    // off shell the third entry equals sin u - u_xt
                    auto off = [](auto x, auto t) { return x * t * 0.5; };
                    const auto ro = mc_residual_fields_exact(g, sg_cocycle_exact(off));
                    RealField dev(g);
                    for (int j = 0; j < g.nv; ++j)
                        for (int i = 0; i < g.nu; ++i)
                            dev(i, j) = std::abs(ro[2](i, j) - (std::sin(0.5 * g.u(i) * g.v(j)) - 0.5));
                    r.report.add(measure(pre + "off_shell_mc_1", abs_field(ro[0]), nullptr, id));
                    r.report.add(measure(pre + "off_shell_mc_2", abs_field(ro[1]), nullptr, id));
                    r.report.add(measure(pre + "off_shell_mc_3_minus_residual", dev, nullptr, id));
                } else {
                    const RealField u = sample(g, [&](double x, double t) { return kink(x, t); });
                    const Mask in = interior_mask(g, 2);
                    add(r, mc_cocycle_residual(sg_cocycle(u, Order::fourth), Order::fourth, {id, on, on}, &in), pre);
                }
            } else {
                const Grid2 g = Grid2::make(-10, 10, c.grid.nu, -2, 2, c.grid.nv);
                const double sp = param(c.params, "kdv_speed", 1.0);
                auto soliton = [sp](auto x, auto t) {
                    using std::cosh;
                    auto s = cosh((x - t * sp) * (std::sqrt(sp) / 2));
                    return -(sp / 2) / (s * s);
                };
                if (exact) {
                    add(r, mc_cocycle_residual_exact(g, kdv_cocycle_exact(soliton), {id, on, on}), pre);
                } else {
                    const RealField u = sample(g, [&](double x, double t) { return soliton(x, t); });
                    const Mask in = interior_mask(g, 2);
                    add(r, mc_cocycle_residual(kdv_cocycle(u, Order::fourth), Order::fourth, {id, on, on}, &in), pre);
                }
            }
        });
    }
    return r;
}

}  // namespace detail

/// Runs a validated job. Every check name in the result is unique.
inline JobResult run_job(const JobConfig& c) {
    JobResult r;
    switch (c.kind) {
        case JobKind::weierstrass: r = detail::run_weierstrass(c); break;
        case JobKind::soliton_surface: r = detail::run_soliton_surface(c); break;
        case JobKind::backlund: r = detail::run_backlund(c); break;
        case JobKind::classical_check: r = detail::run_classical(c); break;
        case JobKind::cocycle_check: r = detail::run_cocycle(c); break;
    }
    std::set<std::string> seen;
    for (const Check& ch : r.report.checks)
        if (!seen.insert(ch.name).second) throw std::logic_error("duplicate check name " + ch.name);
    return r;
}

}  // namespace solsurf::io
