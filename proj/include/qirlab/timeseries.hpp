#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qirlab {

// Aligned multivariate time series. Immutable after construction; the
// constructor rejects ragged columns, duplicate names, non-increasing time
// stamps and non-finite values.
class Panel {
public:
    Panel(std::vector<std::string> names, std::vector<Eigen::VectorXd> columns,
          std::vector<std::int64_t> index);

    Eigen::Index rows() const { return index_.empty() ? 0 : static_cast<Eigen::Index>(index_.size()); }
    std::size_t column_count() const { return names_.size(); }
    bool has(std::string_view name) const;
    const Eigen::VectorXd& col(std::string_view name) const;
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<std::int64_t>& index() const { return index_; }

private:
    std::vector<std::string> names_;
    std::vector<Eigen::VectorXd> columns_;
    std::vector<std::int64_t> index_;
};

enum class TransformKind { CumulativeLogGrowth, FirstDifference, ZScore, Identity };

struct TransformSpec {
    TransformKind kind = TransformKind::Identity;
    double scale = 1.0;
};

TransformKind transform_kind_from_string(std::string_view s);

// 100 * [ln(levels[t+h]) - ln(levels[t-1])] for t = 1 .. T-1-h; element i of
// the result corresponds to t = i + 1. h = 0 gives one-period log growth.
Eigen::VectorXd cumulative_log_growth(const Eigen::VectorXd& levels, int h);

// x[t] - x[t-1] for t = 1 .. T-1; element i corresponds to t = i + 1.
Eigen::VectorXd first_difference(const Eigen::VectorXd& x);

// Centers and scales to sample mean 0, sample (n-1) standard deviation 1.
Eigen::VectorXd z_score(const Eigen::VectorXd& x);

// Applies spec to x and multiplies by spec.scale. Differencing transforms
// shorten the series by one; the caller owns date re-alignment.
Eigen::VectorXd apply_transform(const Eigen::VectorXd& x, const TransformSpec& spec);

enum class OutcomeMode {
    Lead,            // outcome row t carries y[t+h]
    CumulativeLead,  // outcome row t carries sum_{j=0..h} y[t+j]
};

struct LagSpec {
    std::vector<std::string> columns;
    int max_lag = 0;
};

// Per-horizon regression frame. Rows are aligned on the treatment date t:
// outcome leads by h, controls are [intercept, contemporaneous, lags].
struct ProjectionFrame {
    int horizon = 0;
    Eigen::VectorXd outcome;
    Eigen::VectorXd treatment;
    Eigen::MatrixXd controls;
    std::vector<std::string> control_names;
    std::vector<std::int64_t> timestamps;  // time stamp of each row's treatment

    Eigen::Index t_eff() const { return outcome.size(); }
};

ProjectionFrame build_frame(const Panel& panel, std::string_view outcome,
                            std::string_view treatment,
                            const std::vector<std::string>& contemporaneous_controls,
                            const LagSpec& lag_spec, int h,
                            OutcomeMode mode = OutcomeMode::Lead);

}  // namespace qirlab
