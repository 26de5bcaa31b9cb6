#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qirlab/lp.hpp"

namespace qirlab {

// Structural parameters of the stochastic-volatility SVAR used by the
// simulation laboratory; defaults follow the reference calibration.
struct DgpParams {
    double rho_y = 0.5;
    double rho_d = -0.1;
    double delta_dy = -0.25;
    double delta_yd = -0.1;
    double gamma = -0.2;
    double phi = 9.0;
};

struct SimConfig {
    Eigen::Index sample_length = 1000;
    int burn_in = 1000;
    std::uint64_t seed = 1;
    int mc_reps = 100;
};

// Simulated path after burn-in; the structural shocks are recorded exactly as
// drawn so the path can be replayed and the oracle regressions can see them.
struct SimPath {
    Eigen::VectorXd y, d, z_y, z_d;
};

// One recursion step:
//   vol_t = (1 + phi * sqrt(exp(D_{t-1}))) / (1 + phi)
//   Y_t   = rho_y Y_{t-1} + delta_dy D_{t-1} + vol_t Z^Y_t
//   D_t   = gamma Y_t + delta_yd Y_{t-1} + rho_d D_{t-1} + Z^D_t
// Y is ordered first: Z^D moves Y only from t+1 on. Negative gamma means
// weak growth tightens financial conditions within the period.
struct SvarState {
    double y = 0.0;
    double d = 0.0;
    double vol = 1.0;
};

SvarState step_svar(const DgpParams& params, const SvarState& prev, double z_y, double z_d);

// Runs the recursion from the zero initial state and discards the first
// burn_in observations.
SimPath simulate(const DgpParams& params, const SimConfig& config);

// Cumulative outcome sum_{j=0..h} Y_{t+j}, defined for t = 0 .. T-1-h.
Eigen::VectorXd cumulative_outcome(const Eigen::VectorXd& y, int h);

// Empirical tau-quantile curves of the cumulative outcome over
// equal-probability bins of the recorded structural shock Z^D.
struct BinnedSqf {
    int horizon = 1;
    std::vector<double> taus;
    Eigen::VectorXd bin_mid;    // within-bin mean of Z^D
    Eigen::MatrixXd quantiles;  // taus x bins
    std::vector<std::string> warnings;
};

BinnedSqf sqf_by_binning(const SimPath& path, int h, const std::vector<double>& taus, int n_bins);

// Benchmark QIR: quantile regression of the cumulative outcome directly on
// the recorded structural shock, which is independent by construction.
QirSurface oracle_qir(const SimPath& path, int max_horizon, const std::vector<double>& taus,
                      SqfSpec spec);

struct McRow {
    EstimatorKind estimator;
    double tau = 0.5;
    int horizon = 1;
    double truth = 0.0;
    double mean_bias = 0.0;
    double rmse = 0.0;
    int failures = 0;
    int reps_used = 0;
};

struct McTable {
    std::vector<McRow> rows;
    DgpParams params;
    SimConfig config;
    std::vector<double> taus;
    int max_horizon = 1;
};

// Estimator race: simulates mc_reps paths, runs each requested estimator with
// controls (Y_t, D_{t-1}, Y_{t-1}) per horizon and quantile, and reports mean
// bias and RMSE against the replication-averaged oracle QIR.
McTable monte_carlo(const DgpParams& params, const SimConfig& config,
                    const std::vector<EstimatorKind>& estimators, int max_horizon,
                    const std::vector<double>& taus, const LpConfig& lp_config);

Panel lab_panel(const SimPath& path);
LpDesign lab_design();

}  // namespace qirlab
