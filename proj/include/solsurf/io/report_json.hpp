#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "json.hpp"

#include "solsurf/numerics/report.hpp"

namespace solsurf::io {

using json = nlohmann::ordered_json;

inline const char* to_string(Bound b) {
    switch (b) {
        case Bound::at_most: return "at_most";
        case Bound::at_least: return "at_least";
        case Bound::info: return "info";
    }
    return "";
}

/// Non-finite values become the strings "inf", "-inf" or "nan".
inline json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

inline json to_json(const Check& c) {
    json j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    j["bound"] = to_string(c.bound);
    j["tol"] = number(c.tol);
    j["max"] = number(c.max);
    j["mean"] = number(c.mean);
    j["nodes"] = c.nodes;
    j["excluded"] = c.excluded;
    if (c.order) j["order"] = number(*c.order);
    if (!c.note.empty()) j["note"] = c.note;
    return j;
}

inline json to_json(const ResidualReport& r) {
    json checks = json::array();
    for (const Check& c : r.checks) checks.push_back(to_json(c));
    return checks;
}

/// Writes `bytes` to a temporary sibling of `path` and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        require(!ec, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        require(static_cast<bool>(out), "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot rename into " + path.string());
    }
}

}  // namespace solsurf::io
