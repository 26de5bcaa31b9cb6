#include "qirlab/binary.hpp"

#include <cmath>
#include <stdexcept>

namespace qirlab {

std::string to_string(LinkKind link) { return link == LinkKind::Logit ? "logit" : "probit"; }

namespace {

constexpr double kProbFloor = 1e-14;

double logistic(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.70710678118654752440); }

double normal_pdf(double z) { return 0.39894228040143267794 * std::exp(-0.5 * z * z); }

// Penalized negative log-likelihood; the ridge term skips the intercept.
double penalized_nll(const Eigen::VectorXd& eta, const Eigen::VectorXd& y, LinkKind link,
                     const Eigen::VectorXd& beta, double ridge) {
    double nll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        double p = link == LinkKind::Logit ? logistic(eta[i]) : normal_cdf(eta[i]);
        p = std::min(std::max(p, kProbFloor), 1.0 - kProbFloor);
        nll -= y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p);
    }
    for (Eigen::Index j = 1; j < beta.size(); ++j) nll += ridge * beta[j] * beta[j];
    return nll;
}

bool newton_fit(const Eigen::MatrixXd& w, const Eigen::VectorXd& y, LinkKind link, double ridge,
                Eigen::VectorXd& beta, int& iterations) {
    const Eigen::Index t = w.rows();
    const Eigen::Index k = w.cols();
    const int kMaxIter = 100;
    const double kGradTol = 1e-8;

    beta = Eigen::VectorXd::Zero(k);
    double nll = penalized_nll(w * beta, y, link, beta, ridge);
    for (int iter = 1; iter <= kMaxIter; ++iter) {
        iterations = iter;
        const Eigen::VectorXd eta = w * beta;
        Eigen::VectorXd score(t);    // d loglik / d eta
        Eigen::VectorXd weight(t);   // Fisher information of eta
        for (Eigen::Index i = 0; i < t; ++i) {
            if (link == LinkKind::Logit) {
                const double p = logistic(eta[i]);
                score[i] = y[i] - p;
                weight[i] = std::max(p * (1.0 - p), kProbFloor);
            } else {
                const double p = std::min(std::max(normal_cdf(eta[i]), kProbFloor), 1.0 - kProbFloor);
                const double phi = normal_pdf(eta[i]);
                score[i] = phi * (y[i] - p) / (p * (1.0 - p));
                weight[i] = std::max(phi * phi / (p * (1.0 - p)), kProbFloor);
            }
        }
        Eigen::VectorXd grad = w.transpose() * score;
        for (Eigen::Index j = 1; j < k; ++j) grad[j] -= 2.0 * ridge * beta[j];
        if (grad.norm() < kGradTol) return true;

        Eigen::MatrixXd hess = w.transpose() * weight.asDiagonal() * w;
        for (Eigen::Index j = 1; j < k; ++j) hess(j, j) += 2.0 * ridge;
        const Eigen::VectorXd step = hess.ldlt().solve(grad);
        if (!step.allFinite()) return false;
        if (step.norm() < 1e-10 * (1.0 + beta.norm())) return true;

        // Step halving keeps the penalized likelihood from degrading. The
        // slack tracks the roundoff of summing T likelihood terms.
        const double slack = 1e-9 * (1.0 + std::abs(nll));
        double scale = 1.0;
        for (int half = 0; half < 30; ++half) {
            const Eigen::VectorXd cand = beta + scale * step;
            const double cand_nll = penalized_nll(w * cand, y, link, cand, ridge);
            if (cand_nll <= nll + slack) {
                beta = cand;
                nll = cand_nll;
                break;
            }
            scale *= 0.5;
            if (half == 29) return false;
        }
    }
    return false;
}

}  // namespace

BinaryFit fit_binary(const Eigen::MatrixXd& w, const Eigen::VectorXd& indicator, LinkKind link,
                     double ridge) {
    const Eigen::Index t = w.rows();
    const Eigen::Index k = w.cols();
    if (indicator.size() != t)
        throw std::invalid_argument("fit_binary: indicator length does not match W rows");
    if (t <= k) throw std::invalid_argument("fit_binary: need more observations than columns");
    for (Eigen::Index i = 0; i < t; ++i)
        if (indicator[i] != 0.0 && indicator[i] != 1.0)
            throw std::invalid_argument("fit_binary: indicator must be 0/1");

    BinaryFit fit;
    fit.link = link;

    const double ones = indicator.sum();
    if (ones == 0.0 || ones == static_cast<double>(t)) {
        const double p = ones == 0.0 ? 1.0 / static_cast<double>(t + 1)
                                     : static_cast<double>(t) / static_cast<double>(t + 1);
        fit.coefficients = Eigen::VectorXd::Zero(k);
        if (link == LinkKind::Logit) {
            fit.coefficients[0] = std::log(p / (1.0 - p));
        } else {
            // Invert the probit link by bisection; only runs in this corner.
            double lo = -40.0, hi = 40.0;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (normal_cdf(mid) < p ? lo : hi) = mid;
            }
            fit.coefficients[0] = 0.5 * (lo + hi);
        }
        fit.fitted_probabilities = Eigen::VectorXd::Constant(t, p);
        fit.converged = true;
        fit.ridge = ridge;
        return fit;
    }

    double penalty = ridge;
    while (true) {
        Eigen::VectorXd beta;
        int iterations = 0;
        if (newton_fit(w, indicator, link, penalty, beta, iterations)) {
            fit.coefficients = beta;
            fit.fitted_probabilities.resize(t);
            const Eigen::VectorXd eta = w * beta;
            for (Eigen::Index i = 0; i < t; ++i) {
                const double p = link == LinkKind::Logit ? logistic(eta[i]) : normal_cdf(eta[i]);
                fit.fitted_probabilities[i] = std::min(std::max(p, kProbFloor), 1.0 - kProbFloor);
            }
            fit.converged = true;
            fit.ridge = penalty;
            fit.iterations = iterations;
            return fit;
        }
        if (penalty >= 1e-2) break;
        penalty *= 10.0;
    }
    throw std::runtime_error("fit_binary: binary fit failed (no convergence up to ridge 1e-2)");
}

}  // namespace qirlab
