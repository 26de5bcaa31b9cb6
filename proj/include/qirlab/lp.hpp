#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qirlab/bootstrap.hpp"
#include "qirlab/gqr.hpp"
#include "qirlab/timeseries.hpp"

namespace qirlab {

enum class EstimatorKind { OlsLp, QlpNoControls, QlpWithControls, GqrLp, OracleQlp };

std::string to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(const std::string& s);

struct LpDesign {
    std::string outcome;
    std::string treatment;
    std::vector<std::string> contemporaneous;
    LagSpec lags;
    OutcomeMode outcome_mode = OutcomeMode::Lead;
    bool timing_restriction = false;
};

struct LpConfig {
    SqfSpec spec = SqfSpec::Linear;
    GqrConfig gqr;
    unsigned threads = 1;
};

// Grid of per-(tau, horizon) slope estimates; estimates has one row per
// quantile (a single row for the mean estimator) and H + 1 columns.
struct QirSurface {
    EstimatorKind estimator = EstimatorKind::GqrLp;
    SqfSpec spec = SqfSpec::Linear;
    std::vector<double> quantiles;  // empty for ols-lp
    int max_horizon = 0;
    Eigen::MatrixXd estimates;
    Eigen::MatrixXd beta2;          // second polynomial coefficient; 0x0 for linear
    Eigen::MatrixXd lower, upper;   // bootstrap bands; 0x0 when absent
    bool timing_restriction = false;

    // Provenance carried into every emitted file.
    std::uint64_t seed = 0;
    std::string generator;
    std::string quantile_definition;
    std::string sample_window;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;
    int band_clamp_count = 0;  // times percentile bands were widened to cover the estimate

    Eigen::Index n_rows() const { return estimates.rows(); }
    bool has_bands() const { return lower.size() > 0; }
};

// Per-cell estimate shared by the surface driver, the Monte Carlo lab and the
// bootstrap closures.
struct CellEstimate {
    double beta1 = 0.0;
    double beta2 = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> warnings;
};

CellEstimate estimate_cell(const ProjectionFrame& frame, EstimatorKind estimator, double tau,
                           const LpConfig& config);

// Runs the chosen estimator over horizons 0..H (h = 0 forced to zero under
// the timing restriction) and each quantile. Cell failures are collected and
// re-thrown together, annotated with (tau, h). If boot is set, percentile
// bootstrap bands are attached.
QirSurface run_lp(const Panel& panel, const LpDesign& design, int max_horizon,
                  const std::vector<double>& quantiles, EstimatorKind estimator,
                  const LpConfig& config, const std::optional<BootConfig>& boot = std::nullopt);

}  // namespace qirlab
