#pragma once

#include <Eigen/Dense>

namespace qirlab {

struct QrFit {
    double tau = 0.5;
    Eigen::VectorXd coefficients;
    double objective = 0.0;  // attained check loss
    int iterations = 0;
};

double check_loss(const Eigen::VectorXd& residuals, double tau);

// Minimizes sum_t rho_tau(y_t - x_t'b) with the Frisch-Newton primal-dual
// interior point method (Mehrotra corrector) on the bounded-variable dual
//   max y'a  s.t.  X'a = (1 - tau) X'1,  a in [0, 1]^T.
// X must have full column rank and more rows than columns.
QrFit fit_qr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double tau);

}  // namespace qirlab
