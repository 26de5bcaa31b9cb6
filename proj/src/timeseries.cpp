#include "qirlab/timeseries.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace qirlab {

Panel::Panel(std::vector<std::string> names, std::vector<Eigen::VectorXd> columns,
             std::vector<std::int64_t> index)
    : names_(std::move(names)), columns_(std::move(columns)), index_(std::move(index)) {
    if (names_.size() != columns_.size())
        throw std::invalid_argument("panel: names and columns differ in count");
    if (index_.empty()) throw std::invalid_argument("panel: empty time index");
    const auto t = static_cast<Eigen::Index>(index_.size());
    std::set<std::string> seen;
    for (std::size_t c = 0; c < names_.size(); ++c) {
        if (!seen.insert(names_[c]).second)
            throw std::invalid_argument("panel: duplicate column name '" + names_[c] + "'");
        if (columns_[c].size() != t)
            throw std::invalid_argument("panel: column '" + names_[c] + "' has length " +
                                        std::to_string(columns_[c].size()) + ", expected " +
                                        std::to_string(t));
        for (Eigen::Index i = 0; i < t; ++i)
            if (!std::isfinite(columns_[c][i]))
                throw std::invalid_argument("panel: non-finite value in column '" + names_[c] +
                                            "' at row " + std::to_string(i));
    }
    for (std::size_t i = 1; i < index_.size(); ++i)
        if (index_[i] <= index_[i - 1])
            throw std::invalid_argument("panel: time index not strictly increasing at position " +
                                        std::to_string(i));
}

bool Panel::has(std::string_view name) const {
    for (const auto& n : names_)
        if (n == name) return true;
    return false;
}

const Eigen::VectorXd& Panel::col(std::string_view name) const {
    for (std::size_t c = 0; c < names_.size(); ++c)
        if (names_[c] == name) return columns_[c];
    throw std::out_of_range("panel: no column named '" + std::string(name) + "'");
}

TransformKind transform_kind_from_string(std::string_view s) {
    if (s == "cumulative-log-growth" || s == "log-growth") return TransformKind::CumulativeLogGrowth;
    if (s == "first-difference" || s == "diff") return TransformKind::FirstDifference;
    if (s == "z-score") return TransformKind::ZScore;
    if (s == "identity" || s == "none" || s.empty()) return TransformKind::Identity;
    throw std::invalid_argument("unknown transform kind '" + std::string(s) + "'");
}

Eigen::VectorXd cumulative_log_growth(const Eigen::VectorXd& levels, int h) {
    if (h < 0) throw std::invalid_argument("cumulative_log_growth: h must be >= 0");
    if (levels.size() < h + 2)
        throw std::invalid_argument("cumulative_log_growth: need at least h + 2 observations");
    for (Eigen::Index i = 0; i < levels.size(); ++i)
        if (!(levels[i] > 0.0))
            throw std::invalid_argument("cumulative_log_growth: non-positive level at index " +
                                        std::to_string(i));
    const Eigen::Index n = levels.size() - h - 1;
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i)
        out[i] = 100.0 * (std::log(levels[i + 1 + h]) - std::log(levels[i]));
    return out;
}

Eigen::VectorXd first_difference(const Eigen::VectorXd& x) {
    if (x.size() < 2) throw std::invalid_argument("first_difference: need at least 2 observations");
    return x.tail(x.size() - 1) - x.head(x.size() - 1);
}

Eigen::VectorXd z_score(const Eigen::VectorXd& x) {
    if (x.size() < 2) throw std::invalid_argument("z_score: need at least 2 observations");
    const double mean = x.mean();
    const Eigen::VectorXd centered = x.array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(x.size() - 1));
    if (!(sd > 0.0) || !std::isfinite(sd)) throw std::invalid_argument("z_score: degenerate series");
    return centered / sd;
}

Eigen::VectorXd apply_transform(const Eigen::VectorXd& x, const TransformSpec& spec) {
    Eigen::VectorXd out;
    switch (spec.kind) {
        case TransformKind::CumulativeLogGrowth: out = cumulative_log_growth(x, 0); break;
        case TransformKind::FirstDifference: out = first_difference(x); break;
        case TransformKind::ZScore: out = z_score(x); break;
        case TransformKind::Identity: out = x; break;
    }
    if (spec.scale != 1.0) out *= spec.scale;
    return out;
}

ProjectionFrame build_frame(const Panel& panel, std::string_view outcome,
                            std::string_view treatment,
                            const std::vector<std::string>& contemporaneous_controls,
                            const LagSpec& lag_spec, int h, OutcomeMode mode) {
    if (h < 0) throw std::invalid_argument("build_frame: h must be >= 0");
    if (lag_spec.max_lag < 0) throw std::invalid_argument("build_frame: max lag must be >= 0");
    const Eigen::VectorXd& y = panel.col(outcome);
    const Eigen::VectorXd& d = panel.col(treatment);
    std::vector<const Eigen::VectorXd*> contemp_cols;
    for (const auto& name : contemporaneous_controls) contemp_cols.push_back(&panel.col(name));
    std::vector<const Eigen::VectorXd*> lag_cols;
    for (const auto& name : lag_spec.columns) lag_cols.push_back(&panel.col(name));

    const Eigen::Index t_total = panel.rows();
    const Eigen::Index maxlag = lag_spec.max_lag;
    const Eigen::Index t_eff = t_total - h - maxlag;
    const Eigen::Index n_lag_cols =
        lag_spec.max_lag == 0 ? 0 : static_cast<Eigen::Index>(lag_spec.columns.size());
    const Eigen::Index k = 1 + static_cast<Eigen::Index>(contemporaneous_controls.size()) +
                           n_lag_cols * maxlag;
    if (t_eff < k + 2)
        throw std::invalid_argument("build_frame: insufficient observations (T_eff = " +
                                    std::to_string(t_eff) + ", controls = " + std::to_string(k) +
                                    ")");

    ProjectionFrame frame;
    frame.horizon = h;
    frame.outcome.resize(t_eff);
    frame.treatment.resize(t_eff);
    frame.controls.resize(t_eff, k);
    frame.timestamps.resize(static_cast<std::size_t>(t_eff));
    frame.control_names.reserve(static_cast<std::size_t>(k));
    frame.control_names.emplace_back("intercept");
    for (const auto& name : contemporaneous_controls) frame.control_names.push_back(name);
    for (int lag = 1; lag <= lag_spec.max_lag; ++lag)
        for (const auto& name : lag_spec.columns)
            frame.control_names.push_back(name + ".l" + std::to_string(lag));

    for (Eigen::Index i = 0; i < t_eff; ++i) {
        const Eigen::Index t = maxlag + i;
        if (mode == OutcomeMode::Lead) {
            frame.outcome[i] = y[t + h];
        } else {
            double acc = 0.0;
            for (int j = 0; j <= h; ++j) acc += y[t + j];
            frame.outcome[i] = acc;
        }
        frame.treatment[i] = d[t];
        frame.timestamps[static_cast<std::size_t>(i)] = panel.index()[static_cast<std::size_t>(t)];
        Eigen::Index c = 0;
        frame.controls(i, c++) = 1.0;
        for (const auto* col : contemp_cols) frame.controls(i, c++) = (*col)[t];
        for (int lag = 1; lag <= lag_spec.max_lag; ++lag)
            for (const auto* col : lag_cols) frame.controls(i, c++) = (*col)[t - lag];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(frame.controls);
    if (qr.rank() < k)
        throw std::invalid_argument("build_frame: control matrix is rank deficient (rank " +
                                    std::to_string(qr.rank()) + " of " + std::to_string(k) + ")");
    return frame;
}

}  // namespace qirlab
