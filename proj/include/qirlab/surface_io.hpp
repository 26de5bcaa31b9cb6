#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "qirlab/lp.hpp"

namespace qirlab {

// Provenance stamped into every emitted file (CSV comment header, JSON
// metadata object or SVG <desc>).
struct OutputStamp {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string version;
    std::map<std::string, std::string> extra;
};

// FNV-1a over the canonical config text; stable across platforms.
std::string config_hash(const std::string& canonical_config);

// One row per (estimator, tau, h): estimate, lower, upper. RFC-4180 body with
// leading '#' provenance comments.
void write_surface_csv(const std::filesystem::path& path, const QirSurface& surface,
                       const OutputStamp& stamp);

void write_surface_json(const std::filesystem::path& path, const QirSurface& surface,
                        const OutputStamp& stamp);

QirSurface read_surface_json(const std::filesystem::path& path);

}  // namespace qirlab
