// Shared helpers for the test suites: independent oracles and small
// statistical utilities. Everything here is deliberately brute-force and
// kept free of the library's solver code paths.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "qirlab/rng.hpp"

namespace testutil {

inline double check_loss_ref(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& b, double tau) {
    double loss = 0.0;
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
        const double u = y[t] - x.row(t).dot(b);
        loss += u * (tau - (u < 0.0 ? 1.0 : 0.0));
    }
    return loss;
}

// Refined dense grid search over a symmetric coefficient box. Returns the
// smallest check loss found; an upper bound on the true minimum.
inline double qr_grid_oracle(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double tau,
                             double box_halfwidth, int stages = 10, int points = 21) {
    const int k = static_cast<int>(x.cols());
    Eigen::VectorXd center = Eigen::VectorXd::Zero(k);
    double halfwidth = box_halfwidth;
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_b = center;
    for (int stage = 0; stage < stages; ++stage) {
        long total = 1;
        for (int j = 0; j < k; ++j) total *= points;
        for (long p = 0; p < total; ++p) {
            Eigen::VectorXd b(k);
            long rem = p;
            for (int j = 0; j < k; ++j) {
                const long ij = rem % points;
                rem /= points;
                b[j] = center[j] - halfwidth +
                       2.0 * halfwidth * static_cast<double>(ij) / (points - 1);
            }
            const double loss = check_loss_ref(x, y, b, tau);
            if (loss < best) {
                best = loss;
                best_b = b;
            }
        }
        center = best_b;
        halfwidth /= 4.0;
    }
    return best;
}

// Exact minimum of the check loss via vertex enumeration: some optimal basic
// solution interpolates k observations, so trying every size-k subset finds
// the global minimum (T choose k stays tiny in these tests).
inline double qr_vertex_oracle(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double tau) {
    const Eigen::Index t = x.rows();
    const Eigen::Index k = x.cols();
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
    double best = std::numeric_limits<double>::infinity();
    const auto evaluate = [&]() {
        Eigen::MatrixXd sub(k, k);
        Eigen::VectorXd rhs(k);
        for (Eigen::Index j = 0; j < k; ++j) {
            sub.row(j) = x.row(idx[static_cast<std::size_t>(j)]);
            rhs[j] = y[idx[static_cast<std::size_t>(j)]];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        if (!lu.isInvertible()) return;
        const Eigen::VectorXd b = lu.solve(rhs);
        best = std::min(best, check_loss_ref(x, y, b, tau));
    };
    // Iterative combination generator.
    for (Eigen::Index j = 0; j < k; ++j) idx[static_cast<std::size_t>(j)] = j;
    for (;;) {
        evaluate();
        Eigen::Index j = k - 1;
        while (j >= 0 && idx[static_cast<std::size_t>(j)] == t - k + j) --j;
        if (j < 0) break;
        ++idx[static_cast<std::size_t>(j)];
        for (Eigen::Index m = j + 1; m < k; ++m)
            idx[static_cast<std::size_t>(m)] = idx[static_cast<std::size_t>(m - 1)] + 1;
    }
    return best;
}

// Regularized upper incomplete gamma Q(a, x) by series/continued fraction;
// gives chi-square tail probabilities for the uniformity tests.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi_square_p_value(double stat, double dof) { return gamma_q(dof / 2.0, stat / 2.0); }

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sd_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (const double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace testutil
