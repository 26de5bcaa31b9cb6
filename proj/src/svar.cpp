#include "qirlab/svar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qirlab/parallel.hpp"
#include "qirlab/qr.hpp"
#include "qirlab/rng.hpp"

namespace qirlab {

SvarState step_svar(const DgpParams& params, const SvarState& prev, double z_y, double z_d) {
    SvarState next;
    next.vol = (1.0 + params.phi * std::sqrt(std::exp(prev.d))) / (1.0 + params.phi);
    next.y = params.rho_y * prev.y + params.delta_dy * prev.d + next.vol * z_y;
    next.d = params.gamma * next.y + params.delta_yd * prev.y + params.rho_d * prev.d + z_d;
    return next;
}

SimPath simulate(const DgpParams& params, const SimConfig& config) {
    if (config.sample_length < 1) throw std::invalid_argument("simulate: T must be >= 1");
    if (config.burn_in < 0) throw std::invalid_argument("simulate: burn-in must be >= 0");
    if (!(params.phi >= 0.0) || !(1.0 + params.phi > 0.0))
        throw std::invalid_argument("simulate: phi must be non-negative");

    const Eigen::Index total = config.sample_length + config.burn_in;
    NormalSampler rng(config.seed);
    SimPath path;
    path.y.resize(config.sample_length);
    path.d.resize(config.sample_length);
    path.z_y.resize(config.sample_length);
    path.z_d.resize(config.sample_length);

    SvarState state;
    for (Eigen::Index t = 0; t < total; ++t) {
        const double zy = rng.normal();
        const double zd = rng.normal();
        state = step_svar(params, state, zy, zd);
        if (!std::isfinite(state.y) || !std::isfinite(state.d))
            throw std::runtime_error("simulate: state became non-finite at t = " +
                                     std::to_string(t));
        if (t >= config.burn_in) {
            const Eigen::Index i = t - config.burn_in;
            path.y[i] = state.y;
            path.d[i] = state.d;
            path.z_y[i] = zy;
            path.z_d[i] = zd;
        }
    }
    return path;
}

Eigen::VectorXd cumulative_outcome(const Eigen::VectorXd& y, int h) {
    if (h < 0) throw std::invalid_argument("cumulative_outcome: h must be >= 0");
    if (y.size() <= h) throw std::invalid_argument("cumulative_outcome: series shorter than h");
    const Eigen::Index n = y.size() - h;
    Eigen::VectorXd out(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        double acc = 0.0;
        for (int j = 0; j <= h; ++j) acc += y[t + j];
        out[t] = acc;
    }
    return out;
}

BinnedSqf sqf_by_binning(const SimPath& path, int h, const std::vector<double>& taus, int n_bins) {
    if (n_bins < 2) throw std::invalid_argument("sqf_by_binning: need at least 2 bins");
    const Eigen::VectorXd yc = cumulative_outcome(path.y, h);
    const Eigen::Index n = yc.size();
    if (n < 4 * static_cast<Eigen::Index>(n_bins))
        throw std::invalid_argument("sqf_by_binning: ensemble too short for the bin count");

    // Sort pairs (Z^D_t, Y^c_{t+h}) by the shock and cut into equal-count bins.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return path.z_d[a] < path.z_d[b]; });

    BinnedSqf out;
    out.horizon = h;
    out.taus = taus;
    out.bin_mid.resize(n_bins);
    out.quantiles.resize(static_cast<Eigen::Index>(taus.size()), n_bins);
    for (int b = 0; b < n_bins; ++b) {
        const Eigen::Index lo = n * b / n_bins;
        const Eigen::Index hi = n * (b + 1) / n_bins;
        const Eigen::Index count = hi - lo;
        if (count < 50)
            out.warnings.push_back("bin " + std::to_string(b) + " holds only " +
                                   std::to_string(count) + " observations");
        Eigen::VectorXd z(count), v(count);
        for (Eigen::Index i = lo; i < hi; ++i) {
            z[i - lo] = path.z_d[order[static_cast<std::size_t>(i)]];
            v[i - lo] = yc[order[static_cast<std::size_t>(i)]];
        }
        out.bin_mid[b] = z.mean();
        for (std::size_t q = 0; q < taus.size(); ++q)
            out.quantiles(static_cast<Eigen::Index>(q), b) =
                empirical_quantile(v, taus[q], QuantileDef::LinearInterpolation);
    }
    return out;
}

Panel lab_panel(const SimPath& path) {
    std::vector<std::int64_t> index(static_cast<std::size_t>(path.y.size()));
    std::iota(index.begin(), index.end(), 0);
    return Panel({"Y", "D", "ZD"}, {path.y, path.d, path.z_d}, index);
}

LpDesign lab_design() {
    LpDesign design;
    design.outcome = "Y";
    design.treatment = "D";
    design.contemporaneous = {"Y"};
    design.lags = {{"Y", "D"}, 1};
    design.outcome_mode = OutcomeMode::CumulativeLead;
    design.timing_restriction = false;
    return design;
}

QirSurface oracle_qir(const SimPath& path, int max_horizon, const std::vector<double>& taus,
                      SqfSpec spec) {
    LpDesign design;
    design.outcome = "Y";
    design.treatment = "ZD";
    design.outcome_mode = OutcomeMode::CumulativeLead;
    LpConfig config;
    config.spec = spec;
    return run_lp(lab_panel(path), design, max_horizon, taus, EstimatorKind::OracleQlp, config);
}

McTable monte_carlo(const DgpParams& params, const SimConfig& config,
                    const std::vector<EstimatorKind>& estimators, int max_horizon,
                    const std::vector<double>& taus, const LpConfig& lp_config) {
    if (config.mc_reps < 2) throw std::invalid_argument("monte_carlo: need at least 2 replications");
    if (max_horizon < 1) throw std::invalid_argument("monte_carlo: H must be >= 1");

    const std::size_t n_taus = taus.size();
    const std::size_t n_h = static_cast<std::size_t>(max_horizon);
    const std::size_t cells_per_est = n_taus * n_h;
    const std::size_t reps = static_cast<std::size_t>(config.mc_reps);

    // betas[e][rep * cells + cell]; the oracle is always computed as entry 0.
    std::vector<EstimatorKind> all;
    all.push_back(EstimatorKind::OracleQlp);
    for (const auto e : estimators)
        if (e != EstimatorKind::OracleQlp) all.push_back(e);
    std::vector<std::vector<double>> betas(
        all.size(), std::vector<double>(reps * cells_per_est,
                                        std::numeric_limits<double>::quiet_NaN()));

    LpConfig cell_config = lp_config;
    cell_config.threads = 1;

    parallel_for(reps, lp_config.threads, [&](std::size_t rep) {
        SimConfig rep_config = config;
        rep_config.seed = derive_seed(config.seed, rep);
        const SimPath path = simulate(params, rep_config);
        const Panel panel = lab_panel(path);
        const LpDesign design = lab_design();

        LpDesign oracle_design;
        oracle_design.outcome = "Y";
        oracle_design.treatment = "ZD";
        oracle_design.outcome_mode = OutcomeMode::CumulativeLead;

        for (int h = 1; h <= max_horizon; ++h) {
            ProjectionFrame frame;
            ProjectionFrame oracle_frame;
            bool frame_ok = true;
            try {
                frame = build_frame(panel, design.outcome, design.treatment,
                                    design.contemporaneous, design.lags, h, design.outcome_mode);
                oracle_frame = build_frame(panel, oracle_design.outcome, oracle_design.treatment,
                                           {}, {}, h, oracle_design.outcome_mode);
            } catch (const std::exception&) {
                frame_ok = false;
            }
            for (std::size_t q = 0; q < n_taus; ++q) {
                const std::size_t cell = q * n_h + static_cast<std::size_t>(h - 1);
                for (std::size_t e = 0; e < all.size(); ++e) {
                    if (!frame_ok) continue;
                    const bool oracle = all[e] == EstimatorKind::OracleQlp;
                    try {
                        const CellEstimate est = estimate_cell(oracle ? oracle_frame : frame,
                                                               all[e], taus[q], cell_config);
                        betas[e][rep * cells_per_est + cell] = est.beta1;
                    } catch (const std::exception&) {
                        // left as NaN; counted below
                    }
                }
            }
        }
    });

    McTable table;
    table.params = params;
    table.config = config;
    table.taus = taus;
    table.max_horizon = max_horizon;

    // Truth per (tau, h): the oracle estimate averaged over replications.
    std::vector<double> truth(cells_per_est, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t cell = 0; cell < cells_per_est; ++cell) {
        double sum = 0.0;
        int n = 0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const double b = betas[0][rep * cells_per_est + cell];
            if (std::isfinite(b)) {
                sum += b;
                ++n;
            }
        }
        if (n > 0) truth[cell] = sum / n;
    }

    for (std::size_t e = 0; e < all.size(); ++e) {
        if (e == 0 && std::find(estimators.begin(), estimators.end(),
                                EstimatorKind::OracleQlp) == estimators.end())
            continue;
        for (std::size_t q = 0; q < n_taus; ++q)
            for (std::size_t h = 1; h <= n_h; ++h) {
                const std::size_t cell = q * n_h + (h - 1);
                McRow row;
                row.estimator = all[e];
                row.tau = taus[q];
                row.horizon = static_cast<int>(h);
                row.truth = truth[cell];
                double sum = 0.0, sum_sq = 0.0;
                int n = 0;
                for (std::size_t rep = 0; rep < reps; ++rep) {
                    const double b = betas[e][rep * cells_per_est + cell];
                    if (!std::isfinite(b)) continue;
                    const double err = b - truth[cell];
                    sum += err;
                    sum_sq += err * err;
                    ++n;
                }
                row.failures = static_cast<int>(reps) - n;
                row.reps_used = n;
                if (row.failures * 20 > static_cast<int>(reps))
                    throw std::runtime_error(
                        "monte_carlo: more than 5% of replications failed for " +
                        to_string(all[e]) + " at (tau=" + std::to_string(taus[q]) +
                        ", h=" + std::to_string(h) + ")");
                row.mean_bias = n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
                row.rmse = n > 0 ? std::sqrt(sum_sq / n) : std::numeric_limits<double>::quiet_NaN();
                table.rows.push_back(row);
            }
    }
    return table;
}

}  // namespace qirlab
