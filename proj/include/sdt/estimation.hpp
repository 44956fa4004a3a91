#pragma once

#include <optional>

#include "sdt/density.hpp"
#include "sdt/model.hpp"
#include "sdt/sample.hpp"
#include "sdt/tuning.hpp"

namespace sdt {

enum class FitRoute { EmpiricalDpd, DiscreteMsde, BasuLindsay };

// How the density-power-divergence route solves for theta:
//  - ExactMinimizer: minimize the empirical DPD criterion (the default;
//    Fisher-consistent, and the convention assumed by the asymptotics).
//  - WeightedScore: solve (1/n) sum f^beta(x_i) u(x_i) = 0, i.e. the weighted
//    likelihood equations without the model-mass correction term.  This is a
//    widely used variant for reporting fits; its scale component is not
//    Fisher-consistent (sigma* = sigma sqrt(1-beta) at the normal model), so
//    downstream inference always uses the exact route.
enum class DpdSolver { ExactMinimizer, WeightedScore };

struct EstimationConfig {
    double tolerance = 1e-9;   // max-norm target for the estimating-equation residual
    int max_iterations = 500;
    int multistart = 5;
    DpdSolver solver = DpdSolver::ExactMinimizer;
};

struct FitResult {
    VectorXd theta_hat;
    double objective = 0.0;   // value of the route's criterion at theta_hat
    VectorXd lagrange;        // multipliers in the estimating-equation convention; empty if unconstrained
    double grad_norm = 0.0;   // max-norm of the estimating-equation residual
    int iterations = 0;
    bool converged = false;
    FitRoute route = FitRoute::EmpiricalDpd;
    DpdSolver solver = DpdSolver::ExactMinimizer;
    double beta = 0.0;        // estimation tuning (beta, tau); tau = 0 for the DPD route
    double tau = 0.0;
    double bandwidth = 0.0;   // Basu-Lindsay route only
};

// int f_theta^{1+b} (closed form when hooked, else quadrature/summation).
double power_mass(const ParametricModel& model, const VectorXd& theta, double b);
// xi_b = int u f^{1+b}.
VectorXd xi_vector(const ParametricModel& model, const VectorXd& theta, double b);

// Empirical DPD criterion V_n(theta) and the estimating function
// Psi(theta) = (1/n) sum f^beta u - xi_beta (so grad V_n = -(1+beta) Psi).
double dpd_objective(const Sample& sample, const ParametricModel& model, double beta,
                     const VectorXd& theta);
VectorXd dpd_psi(const Sample& sample, const ParametricModel& model, double beta,
                 const VectorXd& theta);

FitResult mdpde_fit(const Sample& sample, const ParametricModel& model, double beta,
                    const EstimationConfig& cfg = {});
FitResult restricted_mdpde_fit(const Sample& sample, const ParametricModel& model, double beta,
                               const ConstraintSet& constraints,
                               const EstimationConfig& cfg = {});

// Minimum S-divergence estimation against the empirical mass function
// (discrete families).
FitResult msde_fit_discrete(const Sample& sample, const ParametricModel& model,
                            const TuningParams& tp,
                            const ConstraintSet* constraints = nullptr,
                            const EstimationConfig& cfg = {});

// Basu-Lindsay style route: both the data density and the family are smoothed
// with the same Gaussian kernel before minimizing S.
FitResult msde_fit_basu_lindsay(const Sample& sample, const ParametricModel& model,
                                const TuningParams& tp, double bandwidth,
                                const ConstraintSet* constraints = nullptr,
                                const EstimationConfig& cfg = {});
// Same, with a caller-supplied smoothed data density on its grid.
FitResult msde_fit_basu_lindsay(const GridFunction& g_star, const ParametricModel& model,
                                const TuningParams& tp, double bandwidth,
                                const ConstraintSet* constraints = nullptr,
                                const EstimationConfig& cfg = {});

// Max-norm of the route's estimating equation at the fitted point, including
// the constraint term H lambda_n when multipliers are present.
double estimating_equation_residual(const FitResult& fit, const Sample& sample,
                                    const ParametricModel& model,
                                    const ConstraintSet* constraints = nullptr);

}  // namespace sdt
