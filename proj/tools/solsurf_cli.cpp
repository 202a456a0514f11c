#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "solsurf/io/run.hpp"

using namespace solsurf;
using namespace solsurf::io;

namespace {

// exit codes
constexpr int ok = 0, failed = 1, bad_config = 2, io_error = 3, internal = 4;

int report_error(const json& doc, int code) {
    std::cerr << doc.dump() << "\n";
    return code;
}

void summary(const GenOutcome& g) {
    for (const Check& c : g.result.report.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " max=" << c.max << " tol=" << c.tol << "\n";
    for (const std::string& w : g.result.report.warnings) std::cout << "WARN " << w << "\n";
    for (const auto& p : g.written) std::cout << "wrote " << p.string() << "\n";
    std::cout << (g.result.pass() ? "overall: pass" : "overall: fail") << "\n";
}

json default_config(JobKind k) {
    json d{{"job", to_string(k)}};
    if (k == JobKind::weierstrass) d["params"] = {{"rho", {{"family", "poles"}, {"poles", {{1.0, 0.0}}}}}};
    return d;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Soliton surface generator and verifier"};
    app.require_subcommand(1);

    std::string kind, config_path, suite;
    std::optional<std::string> out_dir, format;
    std::vector<std::string> tols;

    CLI::App* gen = app.add_subcommand("gen", "generate a surface, export the mesh and the report");
    gen->add_option("kind", kind, "job kind")->required();
    gen->add_option("--config", config_path, "JSON job configuration")->required();
    gen->add_option("--out", out_dir, "output directory (overrides output.dir)");
    gen->add_option("--format", format, "mesh format: obj, ply or csv")->check(CLI::IsMember({"obj", "ply", "csv"}));
    gen->add_option("--tol", tols, "tolerance override name=value (repeatable)");

    CLI::App* check = app.add_subcommand("check", "run a verification suite without mesh export");
    check->add_option("suite", suite, "suite name (a job kind)")->required();
    check->add_option("--config", config_path, "JSON configuration; defaults to the built-in suite");
    check->add_option("--tol", tols, "tolerance override name=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return report_error(error_document("usage", e.what()), bad_config);
    }

    JobConfig cfg;
    try {
        const bool is_gen = gen->parsed();
        const std::string want = is_gen ? kind : suite;
        const JobKind k = parse_job_kind(want);
        json doc = config_path.empty() ? default_config(k) : read_json_file(config_path);
        cfg = load_config(std::move(doc), out_dir, format, tols);
        if (cfg.kind != k)
            throw ConfigError("/job", "config job '" + to_string(cfg.kind) + "' does not match '" + want + "'");
    } catch (const ConfigError& e) {
        return report_error(error_document("config", e.what(), e.where), bad_config);
    } catch (const Error& e) {
        return report_error(error_document("config", e.what()), bad_config);
    }

    try {
        if (gen->parsed()) {
            const GenOutcome g = generate(cfg, true);
            summary(g);
            return g.result.pass() ? ok : failed;
        }
        const GenOutcome g = generate(cfg, false);
        std::cout << g.report.dump(2) << "\n";
        return g.result.pass() ? ok : failed;
    } catch (const Error& e) {
        return report_error(error_document("io", e.what()), io_error);
    } catch (const std::exception& e) {
        return report_error(error_document("internal", e.what()), internal);
    }
}
