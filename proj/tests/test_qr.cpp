#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qirlab/qr.hpp"
#include "qirlab/rng.hpp"
#include "test_util.hpp"

using namespace qirlab;

namespace {

struct Instance {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

Instance random_instance(std::uint64_t seed, Eigen::Index t, Eigen::Index k) {
    NormalSampler rng(seed);
    Instance inst;
    inst.x.resize(t, k);
    inst.x.col(0).setOnes();
    for (Eigen::Index j = 1; j < k; ++j)
        for (Eigen::Index i = 0; i < t; ++i) inst.x(i, j) = rng.normal();
    Eigen::VectorXd beta(k);
    for (Eigen::Index j = 0; j < k; ++j) beta[j] = 2.0 * rng.uniform() - 1.0;
    inst.y = inst.x * beta;
    for (Eigen::Index i = 0; i < t; ++i) inst.y[i] += 0.5 * rng.normal();
    return inst;
}

}  // namespace

TEST_CASE("intercept-only median") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(5, 1);
    Eigen::VectorXd y(5);
    y << 1, 2, 3, 4, 5;
    const QrFit fit = fit_qr(x, y, 0.5);
    CHECK(fit.objective == doctest::Approx(check_loss(y.array() - 3.0, 0.5)).epsilon(1e-9));
    CHECK(fit.coefficients[0] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("exact linear data interpolates at any tau") {
    Eigen::MatrixXd x(6, 2);
    x.col(0).setOnes();
    x.col(1) << 1, 2, 3, 4, 5, 6;
    const Eigen::VectorXd y = 2.0 * x.col(1);
    for (double tau : {0.2, 0.5, 0.8}) {
        const QrFit fit = fit_qr(x, y, tau);
        CHECK(fit.objective < 1e-8);
        CHECK(fit.coefficients[1] == doctest::Approx(2.0).epsilon(1e-5));
        CHECK(fit.coefficients[0] == doctest::Approx(0.0).epsilon(1e-5));
    }
}

TEST_CASE("objective matches the brute-force oracles on random instances") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        const Instance inst = random_instance(seed, 20, 2);
        for (double tau : {0.25, 0.5, 0.9}) {
            const QrFit fit = fit_qr(inst.x, inst.y, tau);
            const double vertex = testutil::qr_vertex_oracle(inst.x, inst.y, tau);
            const double grid = testutil::qr_grid_oracle(inst.x, inst.y, tau, 5.0);
            CHECK(std::abs(fit.objective - vertex) < 1e-6);
            CHECK(fit.objective <= grid + 1e-6);
        }
    }
}

TEST_CASE("invariant: reported objective equals the residual check loss") {
    const Instance inst = random_instance(9, 25, 3);
    const QrFit fit = fit_qr(inst.x, inst.y, 0.3);
    const double recomputed = check_loss(inst.y - inst.x * fit.coefficients, 0.3);
    CHECK(fit.objective == doctest::Approx(recomputed).epsilon(1e-8));
}

TEST_CASE("subgradient optimality at the solution") {
    const Instance inst = random_instance(17, 40, 3);
    for (double tau : {0.1, 0.5, 0.7}) {
        const QrFit fit = fit_qr(inst.x, inst.y, tau);
        const Eigen::VectorXd r = inst.y - inst.x * fit.coefficients;
        Eigen::VectorXd subgrad = Eigen::VectorXd::Zero(3);
        Eigen::VectorXd interp_bound = Eigen::VectorXd::Zero(3);
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            if (std::abs(r[i]) <= 1e-7)
                interp_bound += inst.x.row(i).cwiseAbs();
            else
                subgrad += inst.x.row(i) * (tau - (r[i] < 0.0 ? 1.0 : 0.0));
        }
        for (Eigen::Index j = 0; j < 3; ++j)
            CHECK(std::abs(subgrad[j]) <= interp_bound[j] + 1e-5);
    }
}

TEST_CASE("intercept-only fits are monotone in tau") {
    NormalSampler rng(23);
    Eigen::VectorXd y(31);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = rng.normal() * 3.0;
    Eigen::MatrixXd x = Eigen::MatrixXd::Ones(y.size(), 1);
    double prev = -1e300;
    for (double tau = 0.1; tau < 0.95; tau += 0.1) {
        const QrFit fit = fit_qr(x, y, tau);
        CHECK(fit.coefficients[0] >= prev - 1e-8);
        prev = fit.coefficients[0];
    }
}

TEST_CASE("scale equivariance in y") {
    const Instance inst = random_instance(31, 30, 2);
    const QrFit base = fit_qr(inst.x, inst.y, 0.25);
    const QrFit scaled = fit_qr(inst.x, 3.5 * inst.y, 0.25);
    CHECK(scaled.objective == doctest::Approx(3.5 * base.objective).epsilon(1e-7));
    for (Eigen::Index j = 0; j < 2; ++j)
        CHECK(scaled.coefficients[j] == doctest::Approx(3.5 * base.coefficients[j]).epsilon(1e-4));
}

TEST_CASE("error paths") {
    const Instance inst = random_instance(5, 10, 2);
    CHECK_THROWS_AS(fit_qr(inst.x, inst.y, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_qr(inst.x, inst.y, 1.0), std::invalid_argument);
    Eigen::MatrixXd rankdef(10, 2);
    rankdef.col(0).setOnes();
    rankdef.col(1).setOnes();
    CHECK_THROWS_WITH_AS(fit_qr(rankdef, inst.y, 0.5), doctest::Contains("rank deficient"),
                         std::invalid_argument);
    Eigen::MatrixXd wide = Eigen::MatrixXd::Random(3, 4);
    Eigen::VectorXd short_y = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(fit_qr(wide, short_y, 0.5), std::invalid_argument);
}
