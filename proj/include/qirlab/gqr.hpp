#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "qirlab/binary.hpp"
#include "qirlab/timeseries.hpp"

namespace qirlab {

enum class SqfSpec { Linear, Quadratic };

inline int degree_of(SqfSpec spec) { return spec == SqfSpec::Linear ? 1 : 2; }
std::string to_string(SqfSpec spec);

enum class QuantileDef {
    LinearInterpolation,  // interpolate between order statistics (default)
    InvertedCdf,          // lowest order statistic with CDF >= tau
};

std::string to_string(QuantileDef def);

// Empirical tau-quantile of x under the given definition.
double empirical_quantile(const Eigen::VectorXd& x, double tau, QuantileDef def);

struct GqrConfig {
    LinkKind link = LinkKind::Logit;
    int grid_points = 101;             // must be odd and >= 11
    double grid_halfwidth_factor = 5.0;
    int refinements = 2;
    double shrink_factor = 10.0;
    QuantileDef quantile_definition = QuantileDef::LinearInterpolation;
    double ridge = 1e-6;
    // Test hook: observes every (betas, objective) evaluation in grid order.
    std::function<void(const Eigen::VectorXd&, double)> evaluation_observer;
};

struct GqrFit {
    double tau = 0.5;
    int horizon = 0;
    double alpha = 0.0;       // intercept of the fitted structural quantile function
    Eigen::VectorXd betas;    // treatment polynomial coefficients (1 or 2)
    double objective = 0.0;   // attained g'Ag with identity A
    Eigen::VectorXd g;        // moment vector at the optimum
    double grid_resolution = 0.0;           // final step size on the first beta axis
    double coverage = 0.0;                  // #{Y <= q_hat(D)} / T_eff
    std::vector<double> stage_objectives;   // incumbent objective per grid stage
    std::vector<std::string> warnings;
};

// Intercept step: the tau-quantile of outcome minus the treatment polynomial,
// which pins the candidate quantile function to unconditional coverage tau.
double solve_intercept(const Eigen::VectorXd& outcome, const Eigen::VectorXd& treatment,
                       const Eigen::VectorXd& betas, double tau, SqfSpec spec,
                       QuantileDef qdef = QuantileDef::LinearInterpolation);

// Moment objective for a candidate beta vector: recovers the intercept, forms
// the below-quantile indicator, fits the binary model of the indicator on the
// frame controls, and returns g'g with
//   g_j = (1/T) sum_t D_t^j (I_t - tau_hat_{W,t}).
struct GqrObjective {
    double objective = 0.0;
    Eigen::VectorXd g;
    double alpha = 0.0;
};

GqrObjective gqr_objective(const ProjectionFrame& frame, double tau, const Eigen::VectorXd& betas,
                           SqfSpec spec, const GqrConfig& config);

// Grid-search estimator: centers the beta grid at the quantile regression
// (with controls) estimate, evaluates the moment objective over the grid and
// refines around the incumbent. Ties break toward the stage center.
GqrFit fit_gqr(const ProjectionFrame& frame, double tau, SqfSpec spec, const GqrConfig& config);

}  // namespace qirlab
