#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qirlab/lp.hpp"
#include "qirlab/timeseries.hpp"

namespace qirlab {

// Month serial number (year * 12 + month - 1) used as the panel time index.
std::int64_t parse_month(const std::string& yyyy_mm);
std::string format_month(std::int64_t serial);

struct SeriesSource {
    std::string file;
    std::string column;
    TransformSpec transform;
};

struct DatasetManifest {
    std::filesystem::path base_dir;  // file paths resolve against this
    std::string window_start = "1985-01";
    std::string window_end = "2023-08";
    std::map<std::string, SeriesSource> series;
    std::vector<std::string> ordering;  // optional; 8 entries, treatment 5th
};

DatasetManifest load_manifest(const std::filesystem::path& path);

// One wide CSV: first column `date` (YYYY-MM), remaining columns numeric.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::int64_t> months;
    Eigen::MatrixXd values;  // rows x columns
};

CsvTable read_csv_table(const std::filesystem::path& path);

// Loads every manifest series, applies its transform, inner-joins on dates,
// clips to the sample window and verifies the window has no month gaps.
Panel load_panel(const DatasetManifest& manifest);

// First difference of the excess bond premium, z-scored.
Eigen::VectorXd make_credit_risk(const Eigen::VectorXd& ebp);

// Realized minus implied volatility, z-scored.
Eigen::VectorXd make_volatility_risk(const Eigen::VectorXd& realized,
                                     const Eigen::VectorXd& implied);

// Control recipe for the empirical application: contemporaneous values of the
// four variables ordered before the treatment plus two lags of all eight.
LpDesign empirical_design(const Panel& panel, const std::string& treatment_name,
                          const std::vector<std::string>& ordering);

inline constexpr const char* kCreditRiskTreatment = "credit-risk";
inline constexpr const char* kVolatilityRiskTreatment = "volatility-risk";

struct EmpiricalData {
    Panel panel;
    LpDesign design;
    std::string treatment_name;
    std::string sample_window;
};

// Full pipeline: load, construct the requested treatment, assemble the
// ordered eight-variable panel and the projection design.
EmpiricalData prepare_empirical(const DatasetManifest& manifest, const std::string& treatment);

}  // namespace qirlab
