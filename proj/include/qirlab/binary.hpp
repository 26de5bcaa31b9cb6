#pragma once

#include <Eigen/Dense>
#include <string>

namespace qirlab {

enum class LinkKind { Logit, Probit };

std::string to_string(LinkKind link);

struct BinaryFit {
    LinkKind link = LinkKind::Logit;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd fitted_probabilities;  // strictly inside (0, 1)
    bool converged = false;
    double ridge = 0.0;  // penalty actually used
    int iterations = 0;
};

// Ridge-penalized maximum likelihood for P(indicator = 1 | W). Column 0 of W
// must be the intercept; the ridge penalty (default 1e-6) excludes it. On
// non-convergence the penalty escalates by x10 up to 1e-2 before giving up.
// An all-zero or all-one indicator yields the degenerate constant fit with
// probabilities clamped to [1/(T+1), T/(T+1)].
BinaryFit fit_binary(const Eigen::MatrixXd& w, const Eigen::VectorXd& indicator,
                     LinkKind link = LinkKind::Logit, double ridge = 1e-6);

}  // namespace qirlab
