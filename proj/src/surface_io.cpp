#include "qirlab/surface_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "qirlab/rng.hpp"

namespace qirlab {

namespace {

using nlohmann::json;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_stamp_comments(std::ofstream& out, const OutputStamp& stamp) {
    out << "# config-hash: " << stamp.config_hash << "\n";
    out << "# seed: " << stamp.seed << "\n";
    out << "# version: " << stamp.version << "\n";
    out << "# generator: " << kGeneratorName << "\n";
    for (const auto& [k, v] : stamp.extra) out << "# " << k << ": " << v << "\n";
}

json stamp_json(const OutputStamp& stamp) {
    json j;
    j["config_hash"] = stamp.config_hash;
    j["seed"] = stamp.seed;
    j["version"] = stamp.version;
    j["generator"] = kGeneratorName;
    for (const auto& [k, v] : stamp.extra) j[k] = v;
    return j;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (j.empty()) return {};
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
    return m;
}

}  // namespace

std::string config_hash(const std::string& canonical_config) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const unsigned char c : canonical_config) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
    return buf;
}

void write_surface_csv(const std::filesystem::path& path, const QirSurface& surface,
                       const OutputStamp& stamp) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_stamp_comments(out, stamp);
    out << "estimator,tau,h,estimate";
    if (surface.spec == SqfSpec::Quadratic) out << ",estimate2";
    out << ",lower,upper\n";
    const std::string name = to_string(surface.estimator);
    for (Eigen::Index r = 0; r < surface.n_rows(); ++r) {
        const std::string tau =
            surface.quantiles.empty() ? "" : num(surface.quantiles[static_cast<std::size_t>(r)]);
        for (int h = 0; h <= surface.max_horizon; ++h) {
            out << name << "," << tau << "," << h << "," << num(surface.estimates(r, h));
            if (surface.spec == SqfSpec::Quadratic) out << "," << num(surface.beta2(r, h));
            if (surface.has_bands())
                out << "," << num(surface.lower(r, h)) << "," << num(surface.upper(r, h));
            else
                out << ",,";
            out << "\n";
        }
    }
}

void write_surface_json(const std::filesystem::path& path, const QirSurface& surface,
                        const OutputStamp& stamp) {
    json j;
    j["metadata"] = stamp_json(stamp);
    j["metadata"]["quantile_definition"] = surface.quantile_definition;
    j["metadata"]["sample_window"] = surface.sample_window;
    j["metadata"]["warnings"] = surface.warnings;
    j["metadata"]["notes"] = surface.notes;
    j["metadata"]["band_clamp_count"] = surface.band_clamp_count;
    j["estimator"] = to_string(surface.estimator);
    j["spec"] = to_string(surface.spec);
    j["quantiles"] = surface.quantiles;
    j["max_horizon"] = surface.max_horizon;
    j["timing_restriction"] = surface.timing_restriction;
    j["seed"] = surface.seed;
    j["estimates"] = matrix_json(surface.estimates);
    if (surface.beta2.size() > 0) j["estimates2"] = matrix_json(surface.beta2);
    if (surface.has_bands()) {
        j["lower"] = matrix_json(surface.lower);
        j["upper"] = matrix_json(surface.upper);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

QirSurface read_surface_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open surface file " + path.string());
    json j;
    in >> j;
    QirSurface s;
    s.estimator = estimator_from_string(j.at("estimator").get<std::string>());
    s.spec = j.at("spec").get<std::string>() == "quadratic" ? SqfSpec::Quadratic : SqfSpec::Linear;
    s.quantiles = j.at("quantiles").get<std::vector<double>>();
    s.max_horizon = j.at("max_horizon").get<int>();
    s.timing_restriction = j.value("timing_restriction", false);
    s.seed = j.value("seed", std::uint64_t{0});
    s.estimates = matrix_from_json(j.at("estimates"));
    if (j.contains("estimates2")) s.beta2 = matrix_from_json(j["estimates2"]);
    if (j.contains("lower")) {
        s.lower = matrix_from_json(j["lower"]);
        s.upper = matrix_from_json(j["upper"]);
    }
    if (j.contains("metadata")) {
        const auto& m = j["metadata"];
        s.quantile_definition = m.value("quantile_definition", "");
        s.sample_window = m.value("sample_window", "");
        if (m.contains("warnings")) s.warnings = m["warnings"].get<std::vector<std::string>>();
        if (m.contains("notes")) s.notes = m["notes"].get<std::vector<std::string>>();
        s.band_clamp_count = m.value("band_clamp_count", 0);
    }
    s.generator = kGeneratorName;
    return s;
}

}  // namespace qirlab
