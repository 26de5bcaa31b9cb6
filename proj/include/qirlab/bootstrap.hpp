#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "qirlab/timeseries.hpp"

namespace qirlab {

struct BootConfig {
    int block_length = 7;
    int replications = 1000;
    double level = 0.90;
    std::uint64_t seed = 0;
};

struct BootResult {
    double lower = 0.0;
    double upper = 0.0;
    Eigen::VectorXd draws;  // successful replications, in replication order
    int failures = 0;
};

using FrameEstimator = std::function<double(const ProjectionFrame&)>;

// Row indices of one block-of-blocks resample: ceil(T/l) block starts drawn
// uniformly with replacement, blocks concatenated and truncated to T rows.
std::vector<Eigen::Index> draw_block_indices(Eigen::Index t_eff, int block_length,
                                             std::mt19937_64& rng);

// Copies the selected rows into a new frame; every resampled row is a
// verbatim copy of an original (outcome-lead, treatment, controls) tuple.
ProjectionFrame resample_frame(const ProjectionFrame& frame,
                               const std::vector<Eigen::Index>& rows);

// Percentile confidence interval from re-estimating on B block resamples.
// Failed replications are skipped; more than 10% of them is an error.
BootResult block_bootstrap_ci(const ProjectionFrame& frame, const FrameEstimator& estimator,
                              const BootConfig& config, unsigned threads = 1);

}  // namespace qirlab
