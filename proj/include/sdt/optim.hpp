#pragma once

#include <Eigen/Dense>
#include <functional>

namespace sdt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using ScalarFn = std::function<double(const VectorXd&)>;
using GradientFn = std::function<VectorXd(const VectorXd&)>;

struct OptimOptions {
    double grad_tol = 1e-9;
    int max_iterations = 500;
};

struct OptimResult {
    VectorXd x;
    double fval = 0.0;
    double grad_norm = 0.0;  // max-norm of the gradient at x
    int iterations = 0;
    bool converged = false;
};

VectorXd numeric_gradient(const ScalarFn& f, const VectorXd& x, double rel_step = 1e-7);

// BFGS with backtracking line search.  Objectives may return +inf outside
// their domain; the line search treats that as "too far".
OptimResult minimize_bfgs(const ScalarFn& f, const GradientFn& grad, const VectorXd& x0,
                          const OptimOptions& opts = {});

OptimResult nelder_mead(const ScalarFn& f, const VectorXd& x0, int max_evals = 4000,
                        double ftol = 1e-14);

// BFGS, then a Nelder-Mead restart if the gradient has not been driven below
// tolerance, then a damped Newton polish on the gradient system.  This is the
// workhorse used by all fitting routes.
OptimResult minimize_robust(const ScalarFn& f, const GradientFn& grad, const VectorXd& x0,
                            const OptimOptions& opts = {});

}  // namespace sdt
