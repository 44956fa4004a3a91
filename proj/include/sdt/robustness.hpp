#pragma once

#include <cstdint>

#include "sdt/testing.hpp"

namespace sdt {

// Influence function of the unrestricted fit at the model point theta:
// J_beta^{-1} (f^beta(y) u(y) - xi_beta).
VectorXd if_mdpde(const ParametricModel& model, const VectorXd& theta, double beta, double y);

// Restricted analog; the projection P replaces J^{-1}, which keeps the curve
// tangent to the constraint set (H^T IF = 0).
VectorXd if_restricted_mdpde(const ParametricModel& model, const VectorXd& theta, double beta,
                             const ConstraintSet& constraints, double y);

// Second-order influence of the statistic: D^T A_gamma D with
// D = IF_unrestricted - IF_restricted.  (The first-order influence vanishes
// under the null.)
double if2_sdt(const ParametricModel& model, const VectorXd& theta0, double beta,
               double gamma, const ConstraintSet& constraints, double y);

// Asymptotic rejection probability at a contiguous alternative Delta/sqrt(n)
// with contamination eps/sqrt(n) at the point y.  Delta and eps may be zero;
// eps may be negative (the function is used to form derivatives in eps).
double contaminated_power(const TestSpec& spec, const VectorXd& theta0,
                          const VectorXd& delta, double eps, double y);

// d/d eps of the rejection probability at eps = 0 (central difference with
// step 1e-4): under the null (level influence) and at a shift Delta (power
// influence).  The level influence is identically zero because the
// noncentralities are quadratic in eps.
double level_influence(const TestSpec& spec, const VectorXd& theta0, double y);
double power_influence(const TestSpec& spec, const VectorXd& theta0, const VectorXd& delta,
                       double y);

// Data-generating description for Monte Carlo runs: observations are drawn
// from (1 - eps_n) F_theta + eps_n delta_y with eps_n = epsilon / sqrt(n).
struct ContaminationSpec {
    double epsilon = 0.0;
    double point = 0.0;
};

struct SimulationSummary {
    double rate = 0.0;   // fraction of replicates rejecting
    double mc_se = 0.0;  // binomial standard error of the rate
    int replicates = 0;
    int rejects = 0;
    int failures = 0;  // replicates whose fits did not converge (still counted)
    long long n = 0;
    std::uint64_t seed = 0;
};

// Seeded, reproducible rejection-rate estimate.  Per-replicate seeds are
// derived from the master seed, so results do not depend on `jobs`.
SimulationSummary simulate_level_power(const TestSpec& spec, const VectorXd& theta_true,
                                       const ContaminationSpec& contamination, long long n,
                                       int replicates, std::uint64_t seed, int jobs = 1);

}  // namespace sdt
