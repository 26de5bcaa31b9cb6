#include "qirlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qirlab/parallel.hpp"
#include "qirlab/qr.hpp"
#include "qirlab/rng.hpp"

namespace qirlab {

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::OlsLp: return "ols-lp";
        case EstimatorKind::QlpNoControls: return "qlp-no-controls";
        case EstimatorKind::QlpWithControls: return "qlp-with-controls";
        case EstimatorKind::GqrLp: return "gqr-lp";
        case EstimatorKind::OracleQlp: return "oracle-qlp";
    }
    return "unknown";
}

EstimatorKind estimator_from_string(const std::string& s) {
    if (s == "ols-lp") return EstimatorKind::OlsLp;
    if (s == "qlp-no-controls") return EstimatorKind::QlpNoControls;
    if (s == "qlp-with-controls") return EstimatorKind::QlpWithControls;
    if (s == "gqr-lp") return EstimatorKind::GqrLp;
    if (s == "oracle-qlp") return EstimatorKind::OracleQlp;
    throw std::invalid_argument("unknown estimator '" + s + "'");
}

namespace {

Eigen::MatrixXd poly_design(const Eigen::VectorXd& d, int degree) {
    Eigen::MatrixXd x(d.size(), 1 + degree);
    x.col(0).setOnes();
    x.col(1) = d;
    if (degree == 2) x.col(2) = d.cwiseAbs2();
    return x;
}

Eigen::MatrixXd controls_plus_poly(const ProjectionFrame& frame, int degree) {
    Eigen::MatrixXd x(frame.t_eff(), frame.controls.cols() + degree);
    x.leftCols(frame.controls.cols()) = frame.controls;
    x.col(frame.controls.cols()) = frame.treatment;
    if (degree == 2) x.col(frame.controls.cols() + 1) = frame.treatment.cwiseAbs2();
    return x;
}

}  // namespace

CellEstimate estimate_cell(const ProjectionFrame& frame, EstimatorKind estimator, double tau,
                           const LpConfig& config) {
    const int degree = degree_of(config.spec);
    CellEstimate cell;
    switch (estimator) {
        case EstimatorKind::OlsLp: {
            const Eigen::MatrixXd x = controls_plus_poly(frame, degree);
            const Eigen::VectorXd b = x.colPivHouseholderQr().solve(frame.outcome);
            cell.beta1 = b[frame.controls.cols()];
            if (degree == 2) cell.beta2 = b[frame.controls.cols() + 1];
            break;
        }
        case EstimatorKind::QlpNoControls:
        case EstimatorKind::OracleQlp: {
            const QrFit fit = fit_qr(poly_design(frame.treatment, degree), frame.outcome, tau);
            cell.beta1 = fit.coefficients[1];
            if (degree == 2) cell.beta2 = fit.coefficients[2];
            break;
        }
        case EstimatorKind::QlpWithControls: {
            const QrFit fit = fit_qr(controls_plus_poly(frame, degree), frame.outcome, tau);
            cell.beta1 = fit.coefficients[frame.controls.cols()];
            if (degree == 2) cell.beta2 = fit.coefficients[frame.controls.cols() + 1];
            break;
        }
        case EstimatorKind::GqrLp: {
            const GqrFit fit = fit_gqr(frame, tau, config.spec, config.gqr);
            cell.beta1 = fit.betas[0];
            if (degree == 2) cell.beta2 = fit.betas[1];
            cell.warnings = fit.warnings;
            break;
        }
    }
    return cell;
}

QirSurface run_lp(const Panel& panel, const LpDesign& design, int max_horizon,
                  const std::vector<double>& quantiles, EstimatorKind estimator,
                  const LpConfig& config, const std::optional<BootConfig>& boot) {
    if (max_horizon < 1) throw std::invalid_argument("run_lp: H must be >= 1");
    const bool mean_estimator = estimator == EstimatorKind::OlsLp;
    if (!mean_estimator) {
        if (quantiles.empty()) throw std::invalid_argument("run_lp: no quantiles requested");
        for (const double tau : quantiles)
            if (!(tau > 0.0 && tau < 1.0))
                throw std::invalid_argument("run_lp: quantiles must lie in (0,1)");
    }

    QirSurface surface;
    surface.estimator = estimator;
    surface.spec = config.spec;
    surface.quantiles = mean_estimator ? std::vector<double>{} : quantiles;
    surface.max_horizon = max_horizon;
    surface.timing_restriction = design.timing_restriction;
    surface.generator = kGeneratorName;
    surface.quantile_definition = to_string(config.gqr.quantile_definition);
    if (boot) surface.seed = boot->seed;
    if (design.outcome_mode == OutcomeMode::CumulativeLead)
        surface.notes.push_back(
            "outcome is cumulative: quantiles of cumulative growth are not sums of per-period "
            "quantile effects unless the periods are comonotonic");
    surface.notes.push_back(
        "responses are per unit change in the treatment, not per unit structural shock");

    const auto n_rows = static_cast<Eigen::Index>(mean_estimator ? 1 : quantiles.size());
    const Eigen::Index n_cols = max_horizon + 1;
    surface.estimates.setZero(n_rows, n_cols);
    if (config.spec == SqfSpec::Quadratic) surface.beta2.setZero(n_rows, n_cols);
    if (boot) {
        surface.lower.setZero(n_rows, n_cols);
        surface.upper.setZero(n_rows, n_cols);
    }

    // Frames per horizon are shared across quantile rows.
    const int h_start = design.timing_restriction ? 1 : 0;
    std::vector<ProjectionFrame> frames(static_cast<std::size_t>(max_horizon + 1));
    for (int h = h_start; h <= max_horizon; ++h)
        frames[static_cast<std::size_t>(h)] =
            build_frame(panel, design.outcome, design.treatment, design.contemporaneous,
                        design.lags, h, design.outcome_mode);

    struct Cell {
        Eigen::Index row;
        int h;
        double tau;
    };
    std::vector<Cell> cells;
    for (Eigen::Index row = 0; row < n_rows; ++row)
        for (int h = h_start; h <= max_horizon; ++h)
            cells.push_back({row, h, mean_estimator ? 0.5 : quantiles[static_cast<std::size_t>(row)]});

    std::vector<std::string> cell_errors(cells.size());
    std::vector<std::vector<std::string>> cell_warnings(cells.size());
    const unsigned boot_threads =
        cells.size() >= config.threads ? 1u
                                       : std::max(1u, config.threads /
                                                          static_cast<unsigned>(cells.size()));
    parallel_for(cells.size(), config.threads, [&](std::size_t i) {
        const Cell& cell = cells[i];
        const ProjectionFrame& frame = frames[static_cast<std::size_t>(cell.h)];
        try {
            const CellEstimate est = estimate_cell(frame, estimator, cell.tau, config);
            surface.estimates(cell.row, cell.h) = est.beta1;
            if (config.spec == SqfSpec::Quadratic) surface.beta2(cell.row, cell.h) = est.beta2;
            cell_warnings[i] = est.warnings;
            if (boot) {
                BootConfig cell_boot = *boot;
                cell_boot.seed = derive_seed(boot->seed, i + 1);
                const FrameEstimator closure = [&](const ProjectionFrame& f) {
                    return estimate_cell(f, estimator, cell.tau, config).beta1;
                };
                const BootResult bands = block_bootstrap_ci(frame, closure, cell_boot, boot_threads);
                surface.lower(cell.row, cell.h) = bands.lower;
                surface.upper(cell.row, cell.h) = bands.upper;
            }
        } catch (const std::exception& e) {
            cell_errors[i] = e.what();
        }
    });

    std::string failures;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string tag =
            "(tau=" + std::to_string(cells[i].tau) + ", h=" + std::to_string(cells[i].h) + ")";
        if (!cell_errors[i].empty())
            failures += (failures.empty() ? "" : "; ") + tag + ": " + cell_errors[i];
        for (const auto& w : cell_warnings[i]) surface.warnings.push_back(tag + " " + w);
    }
    if (!failures.empty()) throw std::runtime_error("run_lp: cell failures: " + failures);

    // Percentile bands occasionally miss the point estimate; widen so the
    // emitted surface always satisfies lower <= estimate <= upper.
    if (boot) {
        for (Eigen::Index r = 0; r < n_rows; ++r)
            for (Eigen::Index c = h_start; c < n_cols; ++c) {
                if (surface.estimates(r, c) < surface.lower(r, c)) {
                    surface.lower(r, c) = surface.estimates(r, c);
                    ++surface.band_clamp_count;
                } else if (surface.estimates(r, c) > surface.upper(r, c)) {
                    surface.upper(r, c) = surface.estimates(r, c);
                    ++surface.band_clamp_count;
                }
            }
    }
    return surface;
}

}  // namespace qirlab
