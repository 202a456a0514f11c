#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "solsurf/io/mesh.hpp"
#include "solsurf/io/report_json.hpp"

namespace solsurf::io {

/// Invalid configuration; `where` is a JSON-pointer-like location.
struct ConfigError : Error {
    std::string where;
    ConfigError(std::string w, const std::string& what) : Error(what), where(std::move(w)) {}
};

enum class JobKind { weierstrass, soliton_surface, backlund, classical_check, cocycle_check };

inline const std::vector<std::pair<std::string, JobKind>>& job_kinds() {
    static const std::vector<std::pair<std::string, JobKind>> k{{"weierstrass", JobKind::weierstrass},
                                                                {"soliton-surface", JobKind::soliton_surface},
                                                                {"backlund", JobKind::backlund},
                                                                {"classical-check", JobKind::classical_check},
                                                                {"cocycle-check", JobKind::cocycle_check}};
    return k;
}

inline std::string to_string(JobKind k) {
    for (const auto& [n, v] : job_kinds())
        if (v == k) return n;
    return "";
}

inline JobKind parse_job_kind(const std::string& s) {
    for (const auto& [n, v] : job_kinds())
        if (n == s) return v;
    std::string all;
    for (const auto& [n, v] : job_kinds()) all += (all.empty() ? "" : ", ") + n;
    throw ConfigError("/job", "unknown job kind '" + s + "' (" + all + ")");
}

/// Grid of a job. Kinds with fixed per-case domains accept node counts only.
struct GridSpec {
    std::array<double, 2> u{-3.0, 3.0}, v{-3.0, 3.0};
    int nu = 201, nv = 201;

    Grid2 grid(Plane plane = Plane::real) const { return Grid2::make(u[0], u[1], nu, v[0], v[1], nv, plane); }
};

/// Smallest node count per axis: a fourth-order stencil eroded twice plus a
/// boundary margin must leave interior nodes.
inline constexpr int min_nodes = 9;

/// Tolerance names with defaults per job kind.
inline std::map<std::string, double> default_tolerances(JobKind k) {
    switch (k) {
        case JobKind::weierstrass:
            return {{"sigma", 1e-5},          {"gw", 1e-6},           {"conservation", 1e-6},
                    {"p_equation", 1e-4},     {"landau_lifshitz", 1e-5}, {"path_independence", 1e-6},
                    {"h_relative_std", 1e-3}, {"conformal", 1e-4},    {"curvature", 1e-2},
                    {"quartic", 1e-4},        {"quartic_fraction", 0.99}};
        case JobKind::soliton_surface:
            return {{"input", 1e-4},       {"zero_curvature", 1e-5}, {"frame_group", 1e-6},
                    {"cross_order", 1e-5}, {"closed_forms", 1e-3},   {"integrand_identity", 1e-3}};
        case JobKind::backlund:
            return {{"input", 1e-4}, {"sine_gordon", 1e-7}, {"kink", 1e-5}, {"psi_equation", 1e-6}, {"eliminant", 1e-5}};
        case JobKind::classical_check:
            return {{"sphere", 1e-6}, {"plane", 1e-9}, {"tractroid", 1e-4}, {"codazzi", 1e-5}, {"pseudospherical", 1e-5}};
        case JobKind::cocycle_check:
            return {{"identity", 1e-12}, {"on_shell", 1e-4}};
    }
    return {};
}

struct OutputSpec {
    std::string dir = "out";
    std::string name;  ///< file stem; defaults to the job kind
    MeshFormat format = MeshFormat::obj;
};

struct JobConfig {
    JobKind kind = JobKind::weierstrass;
    GridSpec grid;
    json params = json::object();
    std::map<std::string, double> tol;
    OutputSpec output;
    unsigned seed = 12345;
    json source;  ///< validated document with overrides applied

    double t(const std::string& name) const { return tol.at(name); }
};

namespace detail {

inline void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where, where + " must be an object");
    for (const auto& [key, val] : obj.items())
        if (!allowed.count(key))
            throw ConfigError(where + "/" + key, "unknown key '" + key + "' in " + (where.empty() ? "config" : where));
}

inline double number_at(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where, where + " must be a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where, where + " must be finite");
    return x;
}

inline int int_at(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(where, where + " must be an integer");
    return j.get<int>();
}

inline std::string string_at(const json& j, const std::string& where) {
    if (!j.is_string()) throw ConfigError(where, where + " must be a string");
    return j.get<std::string>();
}

inline std::array<double, 2> range_at(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) throw ConfigError(where, where + " must be [min, max]");
    const std::array<double, 2> r{number_at(j[0], where + "/0"), number_at(j[1], where + "/1")};
    if (!(r[1] > r[0])) throw ConfigError(where, where + " must satisfy min < max");
    return r;
}

inline const json* find(const json& obj, const std::string& key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

inline bool fixed_domain(JobKind k) { return k == JobKind::classical_check || k == JobKind::cocycle_check; }

inline GridSpec default_grid(JobKind k) {
    GridSpec g;
    if (k == JobKind::soliton_surface) g.u = g.v = {-4.0, 4.0};
    if (k == JobKind::cocycle_check) g.nu = g.nv = 81;
    if (k == JobKind::classical_check) g.nu = g.nv = 401;
    return g;
}

// per-kind parameter schema
inline void validate_params(JobKind k, const json& p) {
    const std::string w = "/params";
    switch (k) {
        case JobKind::weierstrass: {
            check_keys(p, w, {"rho", "mean_curvature", "epsilon", "exclusion_radius", "normalization", "base",
                              "quartic_a", "spot_checks", "min_p"});
            const json* rho = find(p, "rho");
            if (!rho) throw ConfigError(w + "/rho", "weierstrass job requires params/rho");
            const json* fam = rho->is_object() ? find(*rho, "family") : nullptr;
            if (!fam) throw ConfigError(w + "/rho/family", "params/rho/family is required (poles, tanh)");
            const std::string f = string_at(*fam, w + "/rho/family");
            if (f == "poles") {
                check_keys(*rho, w + "/rho", {"family", "poles"});
                const json* poles = find(*rho, "poles");
                if (!poles || !poles->is_array() || poles->empty())
                    throw ConfigError(w + "/rho/poles", "params/rho/poles must be a nonempty array of [re, im]");
                for (std::size_t a = 0; a < poles->size(); ++a) {
                    const std::string pw = w + "/rho/poles/" + std::to_string(a);
                    const json& q = (*poles)[a];
                    if (!q.is_array() || q.size() != 2) throw ConfigError(pw, pw + " must be [re, im]");
                    number_at(q[0], pw + "/0");
                    number_at(q[1], pw + "/1");
                }
                if (const json* h = find(p, "mean_curvature"))
                    if (!(number_at(*h, w + "/mean_curvature") > 0.0))
                        throw ConfigError(w + "/mean_curvature", "mean_curvature must be positive");
            } else if (f == "tanh") {
                check_keys(*rho, w + "/rho", {"family", "amp", "c", "beta"});
                for (const char* key : {"amp", "c", "beta"})
                    if (const json* x = find(*rho, key)) number_at(*x, w + "/rho/" + key);
                if (find(p, "mean_curvature"))
                    throw ConfigError(w + "/mean_curvature", "the tanh family fixes its own mean curvature");
            } else {
                throw ConfigError(w + "/rho/family", "unknown rho family '" + f + "' (poles, tanh)");
            }
            if (const json* e = find(p, "epsilon")) {
                const int eps = int_at(*e, w + "/epsilon");
                if (eps != 1 && eps != -1) throw ConfigError(w + "/epsilon", "epsilon must be 1 or -1");
            }
            if (const json* r = find(p, "exclusion_radius"))
                if (!(number_at(*r, w + "/exclusion_radius") > 0.0))
                    throw ConfigError(w + "/exclusion_radius", "exclusion_radius must be positive");
            if (const json* n = find(p, "normalization")) {
                const std::string s = string_at(*n, w + "/normalization");
                if (s != "generalized" && s != "classical")
                    throw ConfigError(w + "/normalization", "normalization must be generalized or classical");
            }
            if (const json* b = find(p, "base")) {
                if (!b->is_array() || b->size() != 2) throw ConfigError(w + "/base", "base must be [i, j]");
                int_at((*b)[0], w + "/base/0");
                int_at((*b)[1], w + "/base/1");
            }
            if (const json* a = find(p, "quartic_a")) number_at(*a, w + "/quartic_a");
            if (const json* m = find(p, "min_p"))
                if (!(number_at(*m, w + "/min_p") >= 0.0)) throw ConfigError(w + "/min_p", "min_p must be nonnegative");
            if (const json* s = find(p, "spot_checks"))
                if (int_at(*s, w + "/spot_checks") < 1) throw ConfigError(w + "/spot_checks", "spot_checks must be >= 1");
            break;
        }
        case JobKind::soliton_surface: {
            check_keys(p, w, {"lambda", "kink", "lax_order"});
            if (const json* o = find(p, "lax_order")) {
                const std::string v = string_at(*o, w + "/lax_order");
                if (v != "second" && v != "fourth") throw ConfigError(w + "/lax_order", "lax_order must be second or fourth");
            }
            if (const json* l = find(p, "lambda"))
                if (number_at(*l, w + "/lambda") == 0.0) throw ConfigError(w + "/lambda", "lambda must be nonzero");
            if (const json* kk = find(p, "kink")) {
                check_keys(*kk, w + "/kink", {"a", "c"});
                if (const json* a = find(*kk, "a"))
                    if (number_at(*a, w + "/kink/a") == 0.0) throw ConfigError(w + "/kink/a", "kink a must be nonzero");
                if (const json* c = find(*kk, "c")) number_at(*c, w + "/kink/c");
            }
            break;
        }
        case JobKind::backlund: {
            check_keys(p, w, {"seed_solution", "a_param", "initial_value", "psi0"});
            if (const json* s = find(p, "seed_solution")) {
                const std::string v = string_at(*s, w + "/seed_solution");
                if (v != "vacuum" && v != "kink") throw ConfigError(w + "/seed_solution", "seed_solution must be vacuum or kink");
            }
            if (const json* a = find(p, "a_param"))
                if (number_at(*a, w + "/a_param") == 0.0) throw ConfigError(w + "/a_param", "a_param must be nonzero");
            if (const json* v = find(p, "initial_value")) number_at(*v, w + "/initial_value");
            if (const json* v = find(p, "psi0")) number_at(*v, w + "/psi0");
            break;
        }
        case JobKind::classical_check: {
            check_keys(p, w, {"surfaces"});
            if (const json* s = find(p, "surfaces")) {
                if (!s->is_array() || s->empty()) throw ConfigError(w + "/surfaces", "surfaces must be a nonempty array");
                for (std::size_t a = 0; a < s->size(); ++a) {
                    const std::string v = string_at((*s)[a], w + "/surfaces/" + std::to_string(a));
                    if (v != "sphere" && v != "plane" && v != "tractroid" && v != "pseudospherical")
                        throw ConfigError(w + "/surfaces/" + std::to_string(a),
                                          "unknown surface '" + v + "' (sphere, plane, tractroid, pseudospherical)");
                }
            }
            break;
        }
        case JobKind::cocycle_check: {
            check_keys(p, w, {"systems", "mode", "kdv_speed"});
            if (const json* s = find(p, "systems")) {
                if (!s->is_array() || s->empty()) throw ConfigError(w + "/systems", "systems must be a nonempty array");
                for (std::size_t a = 0; a < s->size(); ++a) {
                    const std::string v = string_at((*s)[a], w + "/systems/" + std::to_string(a));
                    if (v != "sine-gordon" && v != "kdv")
                        throw ConfigError(w + "/systems/" + std::to_string(a), "unknown system '" + v + "' (sine-gordon, kdv)");
                }
            }
            if (const json* m = find(p, "mode")) {
                const std::string v = string_at(*m, w + "/mode");
                if (v != "exact" && v != "finite-difference")
                    throw ConfigError(w + "/mode", "mode must be exact or finite-difference");
            }
            if (const json* c = find(p, "kdv_speed"))
                if (!(number_at(*c, w + "/kdv_speed") > 0.0)) throw ConfigError(w + "/kdv_speed", "kdv_speed must be positive");
            break;
        }
    }
}

}  // namespace detail

/// Validates a configuration document; nothing is computed before this
/// succeeds. Unknown keys anywhere are rejected.
inline JobConfig parse_config(const json& doc) {
    using namespace detail;
    check_keys(doc, "", {"job", "grid", "params", "tolerances", "output", "seed"});
    const json* job = find(doc, "job");
    if (!job) throw ConfigError("/job", "missing required key 'job'");
    JobConfig c;
    c.kind = parse_job_kind(string_at(*job, "/job"));
    c.grid = default_grid(c.kind);
    if (const json* g = find(doc, "grid")) {
        if (fixed_domain(c.kind)) check_keys(*g, "/grid", {"nu", "nv"});
        else check_keys(*g, "/grid", {"u", "v", "nu", "nv"});
        if (const json* u = find(*g, "u")) c.grid.u = range_at(*u, "/grid/u");
        if (const json* v = find(*g, "v")) c.grid.v = range_at(*v, "/grid/v");
        if (const json* n = find(*g, "nu")) c.grid.nu = int_at(*n, "/grid/nu");
        if (const json* n = find(*g, "nv")) c.grid.nv = int_at(*n, "/grid/nv");
    }
    for (auto [name, n] : {std::pair{"nu", c.grid.nu}, std::pair{"nv", c.grid.nv}})
        if (n < min_nodes)
            throw ConfigError(std::string("/grid/") + name, std::string("grid too coarse: ") + name + " = " +
                                                                std::to_string(n) + " (minimum " +
                                                                std::to_string(min_nodes) + ")");
    if (const json* p = find(doc, "params")) c.params = *p;
    validate_params(c.kind, c.params);
    c.tol = default_tolerances(c.kind);
    if (const json* t = find(doc, "tolerances")) {
        if (!t->is_object()) throw ConfigError("/tolerances", "/tolerances must be an object");
        for (const auto& [key, val] : t->items()) {
            if (!c.tol.count(key)) throw ConfigError("/tolerances/" + key, "unknown tolerance '" + key + "'");
            const double x = number_at(val, "/tolerances/" + key);
            if (!(x >= 0.0)) throw ConfigError("/tolerances/" + key, "tolerances must be nonnegative");
            c.tol[key] = x;
        }
    }
    c.output.name = to_string(c.kind);
    if (const json* o = find(doc, "output")) {
        check_keys(*o, "/output", {"dir", "name", "format"});
        if (const json* d = find(*o, "dir")) c.output.dir = string_at(*d, "/output/dir");
        if (const json* n = find(*o, "name")) {
            c.output.name = string_at(*n, "/output/name");
            if (c.output.name.empty() || c.output.name.find('/') != std::string::npos)
                throw ConfigError("/output/name", "output name must be a plain file stem");
        }
        if (const json* f = find(*o, "format")) {
            try {
                c.output.format = parse_format(string_at(*f, "/output/format"));
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                throw ConfigError("/output/format", e.what());
            }
        }
    }
    if (const json* s = find(doc, "seed")) {
        if (!s->is_number_unsigned()) throw ConfigError("/seed", "seed must be a nonnegative integer");
        c.seed = s->get<unsigned>();
    }
    c.source = doc;
    return c;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
    }
}

/// Applies command-line overrides to the document, then validates it.
/// `tols` entries have the form name=value.
inline JobConfig load_config(json doc, const std::optional<std::string>& out_dir,
                             const std::optional<std::string>& format, const std::vector<std::string>& tols) {
    if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
    if (out_dir || format) {
        if (!doc.contains("output")) doc["output"] = json::object();
        if (out_dir) doc["output"]["dir"] = *out_dir;
        if (format) doc["output"]["format"] = *format;
    }
    for (const std::string& t : tols) {
        const auto eq = t.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--tol", "--tol expects name=value, got '" + t + "'");
        const std::string name = t.substr(0, eq), val = t.substr(eq + 1);
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(val, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != val.size()) throw ConfigError("--tol", "--tol value for '" + name + "' is not a number");
        if (!doc.contains("tolerances")) doc["tolerances"] = json::object();
        doc["tolerances"][name] = x;
    }
    return parse_config(doc);
}

}  // namespace solsurf::io
