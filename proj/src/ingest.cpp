#include "qirlab/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qirlab {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::int64_t parse_month(const std::string& yyyy_mm) {
    const std::string s = trim(yyyy_mm);
    if (s.size() != 7 || s[4] != '-')
        throw std::invalid_argument("bad date '" + yyyy_mm + "', expected YYYY-MM");
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u})
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            throw std::invalid_argument("bad date '" + yyyy_mm + "', expected YYYY-MM");
    const int year = std::stoi(s.substr(0, 4));
    const int month = std::stoi(s.substr(5, 2));
    if (month < 1 || month > 12) throw std::invalid_argument("bad month in date '" + yyyy_mm + "'");
    return static_cast<std::int64_t>(year) * 12 + (month - 1);
}

std::string format_month(std::int64_t serial) {
    const std::int64_t year = serial / 12;
    const std::int64_t month = serial % 12 + 1;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04lld-%02lld", static_cast<long long>(year),
                  static_cast<long long>(month));
    return buf;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("manifest " + path.string() + " is not valid JSON: " + e.what());
    }

    DatasetManifest m;
    m.base_dir = path.parent_path();
    if (j.contains("window")) {
        m.window_start = j["window"].value("start", m.window_start);
        m.window_end = j["window"].value("end", m.window_end);
    }
    if (!j.contains("series") || !j["series"].is_object())
        throw std::runtime_error("manifest needs a 'series' object");
    for (const auto& [name, src] : j["series"].items()) {
        SeriesSource s;
        s.file = src.at("file").get<std::string>();
        s.column = src.value("column", name);
        s.transform.kind = transform_kind_from_string(src.value("transform", "identity"));
        s.transform.scale = src.value("scale", 1.0);
        m.series[name] = s;
    }
    if (j.contains("ordering")) {
        m.ordering = j["ordering"].get<std::vector<std::string>>();
        if (m.ordering.size() != 8)
            throw std::runtime_error("manifest ordering must list exactly 8 variables, got " +
                                     std::to_string(m.ordering.size()));
    }
    return m;
}

CsvTable read_csv_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open data file " + path.string());
    CsvTable table;
    std::string line;
    std::vector<std::vector<double>> rows;
    bool header = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (trim(line)[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(trim(field));
        if (!line.empty() && line.back() == ',') fields.push_back("");
        if (header) {
            if (fields.size() < 2)
                throw std::runtime_error(path.string() + ": header needs a date and data column");
            table.columns.assign(fields.begin() + 1, fields.end());
            header = false;
            continue;
        }
        if (fields.size() != table.columns.size() + 1)
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected " + std::to_string(table.columns.size() + 1) +
                                     " fields, got " + std::to_string(fields.size()));
        table.months.push_back(parse_month(fields[0]));
        std::vector<double> row;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            try {
                row.push_back(std::stod(fields[i]));
            } catch (const std::exception&) {
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                         ": cannot parse value '" + fields[i] + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
    for (std::size_t i = 1; i < table.months.size(); ++i)
        if (table.months[i] <= table.months[i - 1])
            throw std::runtime_error(path.string() + ": dates not strictly increasing at row " +
                                     std::to_string(i + 1));
    table.values.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(table.columns.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    return table;
}

namespace {

struct DatedSeries {
    std::vector<std::int64_t> months;
    Eigen::VectorXd values;
};

DatedSeries transformed_series(const CsvTable& table, const SeriesSource& src,
                               const std::string& name) {
    const auto it = std::find(table.columns.begin(), table.columns.end(), src.column);
    if (it == table.columns.end())
        throw std::runtime_error("series '" + name + "': column '" + src.column +
                                 "' not found in " + src.file);
    const auto c = static_cast<Eigen::Index>(it - table.columns.begin());
    DatedSeries out;
    Eigen::VectorXd raw = table.values.col(c);
    out.values = apply_transform(raw, src.transform);
    // Differencing transforms drop the first observation.
    const std::size_t offset = table.months.size() - static_cast<std::size_t>(out.values.size());
    out.months.assign(table.months.begin() + static_cast<std::ptrdiff_t>(offset),
                      table.months.end());
    return out;
}

}  // namespace

Panel load_panel(const DatasetManifest& manifest) {
    if (manifest.series.empty()) throw std::runtime_error("manifest has no series");
    std::map<std::string, CsvTable> tables;
    for (const auto& [name, src] : manifest.series)
        if (!tables.count(src.file))
            tables[src.file] = read_csv_table(manifest.base_dir / src.file);

    std::map<std::string, DatedSeries> series;
    for (const auto& [name, src] : manifest.series)
        series[name] = transformed_series(tables.at(src.file), src, name);

    // Inner join on months, then clip to the sample window.
    std::set<std::int64_t> common(series.begin()->second.months.begin(),
                                  series.begin()->second.months.end());
    for (const auto& [name, s] : series) {
        std::set<std::int64_t> own(s.months.begin(), s.months.end());
        std::set<std::int64_t> kept;
        std::set_intersection(common.begin(), common.end(), own.begin(), own.end(),
                              std::inserter(kept, kept.begin()));
        common.swap(kept);
    }
    const std::int64_t lo = parse_month(manifest.window_start);
    const std::int64_t hi = parse_month(manifest.window_end);
    std::vector<std::int64_t> months;
    for (const std::int64_t m : common)
        if (m >= lo && m <= hi) months.push_back(m);
    if (months.empty())
        throw std::runtime_error("no dates remain after joining series over the window " +
                                 manifest.window_start + " .. " + manifest.window_end);

    // The retained window must be gap-free months.
    std::vector<std::string> gaps;
    std::int64_t expected = months.front();
    for (const std::int64_t m : months) {
        while (m != expected && gaps.size() < 10) {
            gaps.push_back(format_month(expected));
            ++expected;
        }
        expected = m + 1;
    }
    if (!gaps.empty()) {
        std::string msg = "missing months inside the sample window:";
        for (const auto& g : gaps) msg += " " + g;
        throw std::runtime_error(msg);
    }

    std::vector<std::string> names;
    std::vector<Eigen::VectorXd> columns;
    for (const auto& [name, s] : series) {
        Eigen::VectorXd col(static_cast<Eigen::Index>(months.size()));
        std::size_t k = 0;
        for (std::size_t i = 0; i < months.size(); ++i) {
            while (s.months[k] != months[i]) ++k;
            col[static_cast<Eigen::Index>(i)] = s.values[static_cast<Eigen::Index>(k)];
        }
        names.push_back(name);
        columns.push_back(std::move(col));
    }
    return Panel(std::move(names), std::move(columns), std::move(months));
}

Eigen::VectorXd make_credit_risk(const Eigen::VectorXd& ebp) {
    if (ebp.size() < 3) throw std::invalid_argument("make_credit_risk: need at least 3 observations");
    return z_score(first_difference(ebp));
}

Eigen::VectorXd make_volatility_risk(const Eigen::VectorXd& realized,
                                     const Eigen::VectorXd& implied) {
    if (realized.size() != implied.size())
        throw std::invalid_argument("make_volatility_risk: length mismatch");
    return z_score(realized - implied);
}

LpDesign empirical_design(const Panel& panel, const std::string& treatment_name,
                          const std::vector<std::string>& ordering) {
    if (ordering.size() != 8)
        throw std::invalid_argument("empirical design: ordering must list exactly 8 variables");
    if (ordering[4] != treatment_name)
        throw std::invalid_argument("empirical design: treatment '" + treatment_name +
                                    "' must be the 5th ordered variable, found '" + ordering[4] +
                                    "'");
    for (const auto& name : ordering)
        if (!panel.has(name))
            throw std::invalid_argument("empirical design: panel lacks ordered variable '" + name +
                                        "'");
    LpDesign design;
    design.outcome = ordering[2];  // industrial production growth
    design.treatment = treatment_name;
    design.contemporaneous.assign(ordering.begin(), ordering.begin() + 4);
    design.lags.columns = ordering;
    design.lags.max_lag = 2;
    design.outcome_mode = OutcomeMode::CumulativeLead;
    design.timing_restriction = true;
    return design;
}

EmpiricalData prepare_empirical(const DatasetManifest& manifest, const std::string& treatment) {
    Panel joined = load_panel(manifest);

    Eigen::VectorXd treatment_col;
    if (treatment == kCreditRiskTreatment) {
        // The manifest declares ebp with a first-difference transform, so the
        // joined column is already differenced; z-score over the window.
        if (!joined.has("ebp"))
            throw std::runtime_error("credit-risk treatment needs an 'ebp' series");
        treatment_col = z_score(joined.col("ebp"));
    } else if (treatment == kVolatilityRiskTreatment) {
        if (!joined.has("realized_vol") || !joined.has("implied_vol"))
            throw std::runtime_error(
                "volatility-risk treatment needs 'realized_vol' and 'implied_vol' series");
        treatment_col = make_volatility_risk(joined.col("realized_vol"), joined.col("implied_vol"));
    } else {
        if (!joined.has(treatment))
            throw std::runtime_error("treatment column '" + treatment + "' not in the panel");
        treatment_col = z_score(joined.col(treatment));
    }

    std::vector<std::string> ordering = manifest.ordering;
    if (ordering.empty())
        ordering = {"consumption", "investment", "ip",          "inflation",
                    treatment,     "sp500",      "treasury10y", "fedfunds"};
    else
        for (auto& name : ordering)
            if (name == "treatment") name = treatment;

    std::vector<std::string> names;
    std::vector<Eigen::VectorXd> columns;
    for (const auto& name : ordering) {
        names.push_back(name);
        columns.push_back(name == treatment ? treatment_col : joined.col(name));
    }
    const std::string window = format_month(joined.index().front()) + " .. " +
                               format_month(joined.index().back());
    Panel panel(std::move(names), std::move(columns),
                std::vector<std::int64_t>(joined.index()));
    LpDesign design = empirical_design(panel, treatment, ordering);
    return EmpiricalData{std::move(panel), std::move(design), treatment, window};
}

}  // namespace qirlab
