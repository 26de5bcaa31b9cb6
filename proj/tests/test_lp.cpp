#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "qirlab/lp.hpp"
#include "qirlab/rng.hpp"

using namespace qirlab;

namespace {

Panel noise_panel(std::uint64_t seed, Eigen::Index t) {
    NormalSampler rng(seed);
    Eigen::VectorXd y(t), d(t), w(t);
    for (Eigen::Index i = 0; i < t; ++i) {
        y[i] = rng.normal();
        d[i] = rng.normal();
        w[i] = rng.normal();
    }
    std::vector<std::int64_t> idx(static_cast<std::size_t>(t));
    std::iota(idx.begin(), idx.end(), 0);
    return Panel({"y", "d", "w"}, {y, d, w}, idx);
}

LpDesign noise_design(bool timing = false) {
    LpDesign design;
    design.outcome = "y";
    design.treatment = "d";
    design.contemporaneous = {"w"};
    design.lags = {{"y", "d"}, 1};
    design.timing_restriction = timing;
    return design;
}

// Plain Gaussian elimination on the normal equations; no shared code with
// the library's least-squares path.
Eigen::VectorXd ols_by_normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::Index k = x.cols();
    Eigen::MatrixXd a = x.transpose() * x;
    Eigen::VectorXd b = x.transpose() * y;
    for (Eigen::Index p = 0; p < k; ++p) {
        Eigen::Index pivot = p;
        for (Eigen::Index r = p + 1; r < k; ++r)
            if (std::abs(a(r, p)) > std::abs(a(pivot, p))) pivot = r;
        a.row(p).swap(a.row(pivot));
        std::swap(b[p], b[pivot]);
        for (Eigen::Index r = p + 1; r < k; ++r) {
            const double m = a(r, p) / a(p, p);
            a.row(r) -= m * a.row(p);
            b[r] -= m * b[p];
        }
    }
    Eigen::VectorXd out(k);
    for (Eigen::Index r = k - 1; r >= 0; --r) {
        double acc = b[r];
        for (Eigen::Index c = r + 1; c < k; ++c) acc -= a(r, c) * out[c];
        out[r] = acc / a(r, r);
    }
    return out;
}

}  // namespace

TEST_CASE("white-noise outcome yields responses near zero for every estimator") {
    const Panel panel = noise_panel(1, 500);
    const LpDesign design = noise_design();
    LpConfig config;
    for (const EstimatorKind kind :
         {EstimatorKind::OlsLp, EstimatorKind::QlpNoControls, EstimatorKind::QlpWithControls,
          EstimatorKind::GqrLp}) {
        const QirSurface s = run_lp(panel, design, 2, {0.3, 0.5}, kind, config);
        for (Eigen::Index r = 0; r < s.n_rows(); ++r)
            for (int h = 0; h <= 2; ++h)
                CHECK(std::abs(s.estimates(r, h)) < 0.2);  // ~3 standard errors at T=500
    }
}

TEST_CASE("ols-lp agrees with an independent normal-equations solve") {
    const Panel panel = noise_panel(7, 120);
    const LpDesign design = noise_design();
    LpConfig config;
    const QirSurface s = run_lp(panel, design, 3, {0.5}, EstimatorKind::OlsLp, config);
    for (int h = 0; h <= 3; ++h) {
        const ProjectionFrame frame = build_frame(panel, design.outcome, design.treatment,
                                                  design.contemporaneous, design.lags, h);
        Eigen::MatrixXd x(frame.t_eff(), frame.controls.cols() + 1);
        x.leftCols(frame.controls.cols()) = frame.controls;
        x.col(frame.controls.cols()) = frame.treatment;
        const Eigen::VectorXd beta = ols_by_normal_equations(x, frame.outcome);
        CHECK(s.estimates(0, h) ==
              doctest::Approx(beta[frame.controls.cols()]).epsilon(1e-8));
    }
}

TEST_CASE("surface dimensions and the timing restriction") {
    const Panel panel = noise_panel(3, 200);
    LpConfig config;
    const QirSurface open_impact =
        run_lp(panel, noise_design(false), 4, {0.2, 0.5, 0.8}, EstimatorKind::QlpWithControls,
               config);
    CHECK(open_impact.estimates.rows() == 3);
    CHECK(open_impact.estimates.cols() == 5);
    CHECK(open_impact.estimates.row(0).cwiseAbs().sum() > 0.0);

    const QirSurface restricted =
        run_lp(panel, noise_design(true), 4, {0.2, 0.5, 0.8}, EstimatorKind::QlpWithControls,
               config);
    for (Eigen::Index r = 0; r < 3; ++r) CHECK(restricted.estimates(r, 0) == 0.0);
    CHECK(restricted.timing_restriction);

    const QirSurface mean_surface =
        run_lp(panel, noise_design(false), 4, {0.5}, EstimatorKind::OlsLp, config);
    CHECK(mean_surface.estimates.rows() == 1);
    CHECK(mean_surface.quantiles.empty());
}

TEST_CASE("bootstrap bands are ordered and deterministic in the seed") {
    const Panel panel = noise_panel(9, 260);
    const LpDesign design = noise_design();
    LpConfig config;
    config.threads = 4;
    BootConfig boot;
    boot.replications = 60;
    boot.block_length = 5;
    boot.seed = 123;
    const QirSurface a =
        run_lp(panel, design, 2, {0.25, 0.5}, EstimatorKind::QlpWithControls, config, boot);
    const QirSurface b =
        run_lp(panel, design, 2, {0.25, 0.5}, EstimatorKind::QlpWithControls, config, boot);
    REQUIRE(a.has_bands());
    CHECK(a.estimates == b.estimates);
    CHECK(a.lower == b.lower);
    CHECK(a.upper == b.upper);
    for (Eigen::Index r = 0; r < a.n_rows(); ++r)
        for (int h = 0; h <= 2; ++h) {
            CHECK(a.lower(r, h) <= a.estimates(r, h));
            CHECK(a.estimates(r, h) <= a.upper(r, h));
        }
}

TEST_CASE("cell failures are annotated with tau and horizon") {
    // A constant treatment makes every design rank deficient.
    const Eigen::Index t = 60;
    NormalSampler rng(4);
    Eigen::VectorXd y(t);
    for (Eigen::Index i = 0; i < t; ++i) y[i] = rng.normal();
    std::vector<std::int64_t> idx(static_cast<std::size_t>(t));
    std::iota(idx.begin(), idx.end(), 0);
    const Panel panel({"y", "d"}, {y, Eigen::VectorXd::Ones(t)}, idx);
    LpDesign design;
    design.outcome = "y";
    design.treatment = "d";
    LpConfig config;
    CHECK_THROWS_WITH_AS(
        run_lp(panel, design, 2, {0.5}, EstimatorKind::QlpNoControls, config),
        doctest::Contains("(tau=0.5"), std::runtime_error);
}

TEST_CASE("estimator names round-trip") {
    for (const EstimatorKind kind :
         {EstimatorKind::OlsLp, EstimatorKind::QlpNoControls, EstimatorKind::QlpWithControls,
          EstimatorKind::GqrLp, EstimatorKind::OracleQlp})
        CHECK(estimator_from_string(to_string(kind)) == kind);
    CHECK_THROWS(estimator_from_string("qr"));
}
