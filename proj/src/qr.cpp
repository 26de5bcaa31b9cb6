#include "qirlab/qr.hpp"

#include <cmath>
#include <stdexcept>

namespace qirlab {

double check_loss(const Eigen::VectorXd& residuals, double tau) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < residuals.size(); ++i) {
        const double u = residuals[i];
        loss += u * (tau - (u < 0.0 ? 1.0 : 0.0));
    }
    return loss;
}

namespace {

// Largest step in (0, cap] keeping z + step * dz elementwise above lo.
double max_step(const Eigen::VectorXd& z, const Eigen::VectorXd& dz, double lo, double cap) {
    double step = cap;
    for (Eigen::Index i = 0; i < z.size(); ++i)
        if (dz[i] < 0.0) step = std::min(step, (lo - z[i]) / dz[i]);
    return step;
}

}  // namespace

QrFit fit_qr(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double tau) {
    const Eigen::Index t = x.rows();
    const Eigen::Index k = x.cols();
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("fit_qr: tau must lie in (0,1)");
    if (y.size() != t) throw std::invalid_argument("fit_qr: y length does not match X rows");
    if (t <= k) throw std::invalid_argument("fit_qr: need more observations than columns");
    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
        if (qr.rank() < k) throw std::invalid_argument("fit_qr: design matrix is rank deficient");
    }

    const double kTiny = 1e-12;
    const int kMaxIter = 100;
    const double gap_tol = 1e-11 * (1.0 + y.cwiseAbs().sum());

    // Interior start: a is exactly feasible for X'a = (1-tau)X'1, and the
    // least-squares residual is split as v - u = y - Xb with u, v > 0, which
    // zeroes the stationarity residual y - Xb + u - v from the first step.
    Eigen::VectorXd a = Eigen::VectorXd::Constant(t, 1.0 - tau);
    Eigen::VectorXd s = Eigen::VectorXd::Constant(t, tau);
    Eigen::VectorXd b = (x.transpose() * x).ldlt().solve(x.transpose() * y);
    Eigen::VectorXd r = y - x * b;
    Eigen::VectorXd v(t), u(t);
    for (Eigen::Index i = 0; i < t; ++i) {
        v[i] = std::max(r[i], 0.0) + 0.1;
        u[i] = v[i] - r[i];
    }

    QrFit fit;
    fit.tau = tau;
    Eigen::VectorXd best_b = b;
    double best_obj = check_loss(y - x * b, tau);
    const Eigen::VectorXd rhs_eq = (1.0 - tau) * x.colwise().sum().transpose();

    for (int iter = 1; iter <= kMaxIter; ++iter) {
        fit.iterations = iter;
        const double gap = a.dot(u) + s.dot(v);
        if (gap < gap_tol) break;

        r = y - x * b;
        const Eigen::VectorXd rho_stat = r + u - v;
        const Eigen::VectorXd q_dual = rhs_eq - x.transpose() * a;
        const Eigen::VectorXd w = (u.array() / a.array() + v.array() / s.array()).matrix();
        const Eigen::VectorXd winv = w.cwiseInverse();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(x.transpose() * winv.asDiagonal() * x);

        // Affine (predictor) direction: mu = 0, no second-order terms.
        Eigen::VectorXd rhs_a = rho_stat - u + v;
        Eigen::VectorXd db = ldlt.solve(x.transpose() * (winv.cwiseProduct(rhs_a)) - q_dual);
        Eigen::VectorXd da = winv.cwiseProduct(rhs_a - x * db);
        Eigen::VectorXd du = -u - u.cwiseProduct(da).cwiseQuotient(a);
        Eigen::VectorXd dv = -v + v.cwiseProduct(da).cwiseQuotient(s);

        const double ap_aff = std::min(max_step(a, da, 0.0, 1.0), max_step(s, -da, 0.0, 1.0));
        const double ad_aff = std::min(max_step(u, du, 0.0, 1.0), max_step(v, dv, 0.0, 1.0));
        const double gap_aff = (a + ap_aff * da).dot(u + ad_aff * du) +
                               (s - ap_aff * da).dot(v + ad_aff * dv);
        const double sigma = std::pow(std::min(1.0, std::max(gap_aff, 0.0) / gap), 3.0);
        const double mu = sigma * gap / (2.0 * static_cast<double>(t));

        // Corrector direction with centering and Mehrotra second-order terms.
        const Eigen::VectorXd comp_a =
            (Eigen::VectorXd::Constant(t, mu) - a.cwiseProduct(u) - da.cwiseProduct(du))
                .cwiseQuotient(a);
        const Eigen::VectorXd comp_s =
            (Eigen::VectorXd::Constant(t, mu) - s.cwiseProduct(v) + da.cwiseProduct(dv))
                .cwiseQuotient(s);
        rhs_a = rho_stat + comp_a - comp_s;
        db = ldlt.solve(x.transpose() * (winv.cwiseProduct(rhs_a)) - q_dual);
        da = winv.cwiseProduct(rhs_a - x * db);
        du = comp_a - u.cwiseProduct(da).cwiseQuotient(a);
        dv = comp_s + v.cwiseProduct(da).cwiseQuotient(s);

        const double ap = 0.9995 * std::min(max_step(a, da, kTiny, 1.0), max_step(s, -da, kTiny, 1.0));
        const double ad = 0.9995 * std::min(max_step(u, du, kTiny, 1.0), max_step(v, dv, kTiny, 1.0));
        a += ap * da;
        s -= ap * da;
        u += ad * du;
        v += ad * dv;
        b += ad * db;

        const double obj = check_loss(y - x * b, tau);
        if (obj < best_obj) {
            best_obj = obj;
            best_b = b;
        }
    }

    fit.coefficients = best_b;
    fit.objective = best_obj;
    return fit;
}

}  // namespace qirlab
