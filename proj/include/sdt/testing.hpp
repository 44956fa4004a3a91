#pragma once

#include <cmath>

#include "sdt/asymptotics.hpp"
#include "sdt/closed_form.hpp"
#include "sdt/estimation.hpp"

namespace sdt {

inline double standard_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

struct TestSpec {
    ParametricModel model;
    ConstraintSet null_constraints;
    double beta = 0.0;    // estimation tuning for both fits
    double gamma = 0.0;   // divergence tuning of the statistic
    double lambda = 0.0;
    double alpha_level = 0.05;
    EstimationConfig estimation;
};

struct TestReport {
    FitResult unrestricted;
    FitResult restricted;
    double statistic = 0.0;
    NullLawSpec law;  // evaluated at the restricted estimate
    double critical_value = 0.0;
    double p_value = 0.0;
    bool reject = false;
    double alpha_level = 0.05;
    double beta = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;
    long long n = 0;
};

// 2 n S(f_theta_hat, f_theta_tilde).
double sdt_statistic(const ParametricModel& model, const VectorXd& theta_hat,
                     const VectorXd& theta_tilde, const TuningParams& tp, long long n);

TestReport run_sdt(const Sample& sample, const TestSpec& spec);

// Constrained minimizer of the population density-power divergence from
// f_theta_star to the family; the center of the null law used by the power
// approximation.
VectorXd population_restricted_dpd(const ParametricModel& model,
                                   const ConstraintSet& constraints, double beta,
                                   const VectorXd& theta_star);

// First-order approximation to the power of the level-alpha test at a fixed
// alternative theta_star and sample size n.
double power_approximation(const TestSpec& spec, const VectorXd& theta_star, long long n);

}  // namespace sdt
