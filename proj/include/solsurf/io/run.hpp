#pragma once

#include <Eigen/Core>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "solsurf/io/jobs.hpp"
#include "solsurf/version.hpp"

namespace solsurf::io {

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    require(EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) == 1, "sha256 failed");
    std::string hex;
    char buf[3];
    for (unsigned int k = 0; k < len; ++k) {
        std::snprintf(buf, sizeof buf, "%02x", md[k]);
        hex += buf;
    }
    return hex;
}

inline json versions() {
    return {{"solsurf", SOLSURF_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"report_schema", 1}};
}

/// Hash of the validated config; the output directory is left out since it
/// does not affect any written byte.
inline std::string config_hash(const JobConfig& c) {
    json doc = c.source;
    if (doc.contains("output")) doc["output"].erase("dir");
    return sha256_hex(doc.dump());
}

/// Report document. It holds no timestamps or paths outside the output
/// directory, so identical configs give identical bytes.
inline json run_report(const JobConfig& c, const JobResult& r, const std::vector<std::string>& artifacts) {
    json grid;
    if (!detail::fixed_domain(c.kind)) {
        grid["u"] = c.grid.u;
        grid["v"] = c.grid.v;
    }
    grid["nu"] = c.grid.nu;
    grid["nv"] = c.grid.nv;
    json tol = json::object();
    for (const auto& [k, v] : c.tol) tol[k] = v;
    json doc;
    doc["job"] = to_string(c.kind);
    doc["pass"] = r.pass();
    doc["checks"] = to_json(r.report);
    doc["warnings"] = r.report.warnings;
    doc["values"] = r.values;
    doc["artifacts"] = artifacts;
    doc["provenance"] = {{"config_sha256", config_hash(c)},
                         {"grid", grid},
                         {"seed", c.seed},
                         {"tolerances", tol},
                         {"versions", versions()}};
    return doc;
}

/// Machine-readable error document.
inline json error_document(const std::string& kind, const std::string& message, const std::string& where = "") {
    json e{{"kind", kind}, {"message", message}};
    if (!where.empty()) e["where"] = where;
    return {{"error", e}};
}

struct GenOutcome {
    JobResult result;
    json report;
    std::vector<std::filesystem::path> written;
};

/// Runs the job and writes meshes and report atomically into the output
/// directory: <name><suffix>.<ext> per mesh and <name>.report.json.
inline GenOutcome generate(const JobConfig& c, bool export_meshes = true) {
    namespace fs = std::filesystem;
    GenOutcome out;
    out.result = run_job(c);
    const fs::path dir = c.output.dir;
    std::vector<std::string> names;
    if (export_meshes)
        for (const MeshArtifact& m : out.result.meshes) {
            const std::string file = c.output.name + m.suffix + extension(c.output.format);
            export_mesh(m.X, c.output.format, dir / file, &m.keep);
            names.push_back(file);
            out.written.push_back(dir / file);
        }
    out.report = run_report(c, out.result, names);
    if (export_meshes) {
        const fs::path rp = dir / (c.output.name + ".report.json");
        write_atomic(rp, out.report.dump(2) + "\n");
        out.written.push_back(rp);
    }
    return out;
}

}  // namespace solsurf::io
