#include "qirlab/bootstrap.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qirlab/gqr.hpp"
#include "qirlab/parallel.hpp"
#include "qirlab/rng.hpp"

namespace qirlab {

namespace {

// Unbiased-enough bounded draw via multiply-high; avoids the
// implementation-defined std::uniform_int_distribution.
Eigen::Index bounded_draw(std::mt19937_64& rng, Eigen::Index n) {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(rng()) * static_cast<unsigned __int128>(n);
    return static_cast<Eigen::Index>(wide >> 64);
}

}  // namespace

std::vector<Eigen::Index> draw_block_indices(Eigen::Index t_eff, int block_length,
                                             std::mt19937_64& rng) {
    if (block_length < 1 || block_length > t_eff)
        throw std::invalid_argument("block bootstrap: block length must lie in [1, T_eff]");
    const Eigen::Index l = block_length;
    const Eigen::Index n_starts = t_eff - l + 1;
    std::vector<Eigen::Index> rows;
    rows.reserve(static_cast<std::size_t>(t_eff + l));
    while (static_cast<Eigen::Index>(rows.size()) < t_eff) {
        const Eigen::Index start = bounded_draw(rng, n_starts);
        for (Eigen::Index j = 0; j < l; ++j) rows.push_back(start + j);
    }
    rows.resize(static_cast<std::size_t>(t_eff));
    return rows;
}

ProjectionFrame resample_frame(const ProjectionFrame& frame,
                               const std::vector<Eigen::Index>& rows) {
    ProjectionFrame out;
    out.horizon = frame.horizon;
    out.control_names = frame.control_names;
    const auto n = static_cast<Eigen::Index>(rows.size());
    out.outcome.resize(n);
    out.treatment.resize(n);
    out.controls.resize(n, frame.controls.cols());
    out.timestamps.resize(rows.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index r = rows[static_cast<std::size_t>(i)];
        out.outcome[i] = frame.outcome[r];
        out.treatment[i] = frame.treatment[r];
        out.controls.row(i) = frame.controls.row(r);
        out.timestamps[static_cast<std::size_t>(i)] =
            frame.timestamps[static_cast<std::size_t>(r)];
    }
    return out;
}

BootResult block_bootstrap_ci(const ProjectionFrame& frame, const FrameEstimator& estimator,
                              const BootConfig& config, unsigned threads) {
    if (config.replications < 2)
        throw std::invalid_argument("block bootstrap: need at least 2 replications");
    if (!(config.level > 0.0 && config.level < 1.0))
        throw std::invalid_argument("block bootstrap: level must lie in (0,1)");
    const int b = config.replications;
    std::vector<double> draws(static_cast<std::size_t>(b),
                              std::numeric_limits<double>::quiet_NaN());

    parallel_for(static_cast<std::size_t>(b), threads, [&](std::size_t rep) {
        std::mt19937_64 rng(derive_seed(config.seed, rep));
        const auto rows = draw_block_indices(frame.t_eff(), config.block_length, rng);
        const ProjectionFrame resampled = resample_frame(frame, rows);
        try {
            draws[rep] = estimator(resampled);
        } catch (const std::exception&) {
            // left as NaN; counted below
        }
    });

    BootResult out;
    std::vector<double> ok;
    ok.reserve(draws.size());
    for (const double d : draws)
        if (std::isfinite(d)) ok.push_back(d);
    out.failures = b - static_cast<int>(ok.size());
    if (out.failures > b / 10)
        throw std::runtime_error("block bootstrap: more than 10% of replications failed (" +
                                 std::to_string(out.failures) + " of " + std::to_string(b) + ")");
    out.draws = Eigen::Map<const Eigen::VectorXd>(ok.data(), static_cast<Eigen::Index>(ok.size()));
    const double a = (1.0 - config.level) / 2.0;
    out.lower = empirical_quantile(out.draws, a, QuantileDef::LinearInterpolation);
    out.upper = empirical_quantile(out.draws, 1.0 - a, QuantileDef::LinearInterpolation);
    return out;
}

}  // namespace qirlab
