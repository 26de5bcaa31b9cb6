#include "qirlab/gqr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qirlab/qr.hpp"

namespace qirlab {

std::string to_string(SqfSpec spec) { return spec == SqfSpec::Linear ? "linear" : "quadratic"; }

std::string to_string(QuantileDef def) {
    return def == QuantileDef::LinearInterpolation ? "linear-interpolation" : "inverted-cdf";
}

double empirical_quantile(const Eigen::VectorXd& x, double tau, QuantileDef def) {
    const Eigen::Index n = x.size();
    if (n == 0) throw std::invalid_argument("empirical_quantile: empty sample");
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("empirical_quantile: tau must lie in (0,1)");
    std::vector<double> sorted(x.data(), x.data() + n);
    if (def == QuantileDef::InvertedCdf) {
        const auto idx = static_cast<Eigen::Index>(
            std::ceil(tau * static_cast<double>(n)) - 1.0);
        const auto j = std::min(std::max<Eigen::Index>(idx, 0), n - 1);
        std::nth_element(sorted.begin(), sorted.begin() + j, sorted.end());
        return sorted[static_cast<std::size_t>(j)];
    }
    const double pos = tau * static_cast<double>(n - 1);
    const auto lo = static_cast<Eigen::Index>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    std::nth_element(sorted.begin(), sorted.begin() + lo, sorted.end());
    const double xlo = sorted[static_cast<std::size_t>(lo)];
    if (frac == 0.0 || lo + 1 >= n) return xlo;
    const double xhi = *std::min_element(sorted.begin() + lo + 1, sorted.end());
    return xlo + frac * (xhi - xlo);
}

namespace {

Eigen::VectorXd treatment_polynomial_residual(const Eigen::VectorXd& outcome,
                                              const Eigen::VectorXd& treatment,
                                              const Eigen::VectorXd& betas, SqfSpec spec) {
    Eigen::VectorXd r = outcome - betas[0] * treatment;
    if (spec == SqfSpec::Quadratic) r -= betas[1] * treatment.cwiseAbs2();
    return r;
}

}  // namespace

double solve_intercept(const Eigen::VectorXd& outcome, const Eigen::VectorXd& treatment,
                       const Eigen::VectorXd& betas, double tau, SqfSpec spec, QuantileDef qdef) {
    if (outcome.size() != treatment.size())
        throw std::invalid_argument("solve_intercept: length mismatch");
    if (betas.size() != degree_of(spec))
        throw std::invalid_argument("solve_intercept: beta length does not match spec");
    return empirical_quantile(treatment_polynomial_residual(outcome, treatment, betas, spec), tau,
                              qdef);
}

GqrObjective gqr_objective(const ProjectionFrame& frame, double tau, const Eigen::VectorXd& betas,
                           SqfSpec spec, const GqrConfig& config) {
    const Eigen::Index t = frame.t_eff();
    const Eigen::VectorXd residual =
        treatment_polynomial_residual(frame.outcome, frame.treatment, betas, spec);
    const double alpha = empirical_quantile(residual, tau, config.quantile_definition);

    Eigen::VectorXd indicator(t);
    for (Eigen::Index i = 0; i < t; ++i) indicator[i] = residual[i] <= alpha ? 1.0 : 0.0;

    const BinaryFit bf = fit_binary(frame.controls, indicator, config.link, config.ridge);

    GqrObjective out;
    out.alpha = alpha;
    const int degree = degree_of(spec);
    out.g = Eigen::VectorXd::Zero(degree);
    for (Eigen::Index i = 0; i < t; ++i) {
        const double diff = indicator[i] - bf.fitted_probabilities[i];
        double dpow = 1.0;
        for (int j = 0; j < degree; ++j) {
            dpow *= frame.treatment[i];
            out.g[j] += dpow * diff;
        }
    }
    out.g /= static_cast<double>(t);
    out.objective = out.g.squaredNorm();
    return out;
}

namespace {

struct Axis {
    double center = 0.0;
    double halfwidth = 1.0;
};

double sample_sd(const Eigen::VectorXd& x) {
    if (x.size() < 2) return 0.0;
    const Eigen::VectorXd c = x.array() - x.mean();
    return std::sqrt(c.squaredNorm() / static_cast<double>(x.size() - 1));
}

// Rough scale of the QR slope estimate used to size the initial grid:
// IQR(outcome) / (sqrt(T_eff) * sd(treatment power)).
double scale_proxy(const ProjectionFrame& frame, const Eigen::VectorXd& dpow, double center) {
    const double iqr = empirical_quantile(frame.outcome, 0.75, QuantileDef::LinearInterpolation) -
                       empirical_quantile(frame.outcome, 0.25, QuantileDef::LinearInterpolation);
    const double sd = sample_sd(dpow);
    const double proxy = iqr / (std::sqrt(static_cast<double>(frame.t_eff())) * sd);
    if (!std::isfinite(proxy) || proxy <= 0.0) return std::abs(center) + 1.0;
    return proxy;
}

}  // namespace

GqrFit fit_gqr(const ProjectionFrame& frame, double tau, SqfSpec spec, const GqrConfig& config) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("fit_gqr: tau must lie in (0,1)");
    if (config.grid_points < 11 || config.grid_points % 2 == 0)
        throw std::invalid_argument("fit_gqr: grid_points must be odd and >= 11");
    if (config.refinements < 0) throw std::invalid_argument("fit_gqr: refinements must be >= 0");

    const int degree = degree_of(spec);
    const Eigen::Index t = frame.t_eff();
    GqrFit fit;
    fit.tau = tau;
    fit.horizon = frame.horizon;

    const double tail = std::min(tau, 1.0 - tau) * static_cast<double>(t);
    if (tail < 5.0)
        fit.warnings.push_back("tau tail holds fewer than 5 observations (" +
                               std::to_string(tail) + "); the binary step is fragile here");

    // Center the grid at the QR-with-controls slope estimate for this frame.
    Eigen::MatrixXd design(t, frame.controls.cols() + degree);
    design.leftCols(frame.controls.cols()) = frame.controls;
    design.col(frame.controls.cols()) = frame.treatment;
    if (degree == 2) design.col(frame.controls.cols() + 1) = frame.treatment.cwiseAbs2();
    const QrFit qr = fit_qr(design, frame.outcome, tau);

    std::vector<Axis> axes(static_cast<std::size_t>(degree));
    const int points_per_axis = degree == 1 ? config.grid_points : std::min(config.grid_points, 41);
    for (int j = 0; j < degree; ++j) {
        axes[j].center = qr.coefficients[frame.controls.cols() + j];
        Eigen::VectorXd dpow = frame.treatment;
        for (int p = 1; p < j + 1; ++p) dpow = dpow.cwiseProduct(frame.treatment);
        axes[j].halfwidth =
            config.grid_halfwidth_factor * scale_proxy(frame, dpow, axes[j].center);
    }

    Eigen::VectorXd best = Eigen::VectorXd::Zero(degree);
    for (int j = 0; j < degree; ++j) best[j] = axes[j].center;
    GqrObjective best_eval;
    double best_center_dist = 0.0;
    bool have_best = false;
    bool boundary_hit = false;

    for (int stage = 0; stage <= config.refinements; ++stage) {
        if (stage > 0) {
            // The incumbent becomes the new stage center; keeping its
            // evaluation makes the per-stage objective non-increasing by
            // construction.
            for (int j = 0; j < degree; ++j) {
                axes[j].center = best[j];
                axes[j].halfwidth /= config.shrink_factor;
            }
            best_center_dist = 0.0;
        }
        const int n_points = points_per_axis;
        const long total = degree == 1 ? n_points : static_cast<long>(n_points) * n_points;
        boundary_hit = false;
        for (long p = 0; p < total; ++p) {
            Eigen::VectorXd candidate(degree);
            bool on_boundary = false;
            long rem = p;
            for (int j = 0; j < degree; ++j) {
                const long ij = rem % n_points;
                rem /= n_points;
                const double step = 2.0 * axes[j].halfwidth / static_cast<double>(n_points - 1);
                candidate[j] = axes[j].center - axes[j].halfwidth + step * static_cast<double>(ij);
                if (ij == 0 || ij == n_points - 1) on_boundary = true;
            }
            const GqrObjective eval = gqr_objective(frame, tau, candidate, spec, config);
            if (config.evaluation_observer) config.evaluation_observer(candidate, eval.objective);
            double center_dist = 0.0;
            for (int j = 0; j < degree; ++j)
                center_dist += (candidate[j] - axes[j].center) * (candidate[j] - axes[j].center);
            const bool better = !have_best || eval.objective < best_eval.objective ||
                                (eval.objective == best_eval.objective &&
                                 center_dist < best_center_dist);
            if (better) {
                best = candidate;
                best_eval = eval;
                best_center_dist = center_dist;
                boundary_hit = on_boundary;
                have_best = true;
            }
        }
        fit.stage_objectives.push_back(best_eval.objective);
    }
    if (boundary_hit)
        fit.warnings.push_back("incumbent sits on the outer grid boundary after refinement; "
                               "the search grid may be too narrow");

    fit.betas = best;
    fit.alpha = best_eval.alpha;
    fit.objective = best_eval.objective;
    fit.g = best_eval.g;
    fit.grid_resolution = 2.0 * axes[0].halfwidth / static_cast<double>(points_per_axis - 1);

    const Eigen::VectorXd qhat_residual =
        treatment_polynomial_residual(frame.outcome, frame.treatment, best, spec);
    Eigen::Index below = 0;
    for (Eigen::Index i = 0; i < t; ++i)
        if (qhat_residual[i] <= fit.alpha) ++below;
    fit.coverage = static_cast<double>(below) / static_cast<double>(t);
    return fit;
}

}  // namespace qirlab
