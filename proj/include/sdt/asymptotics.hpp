#pragma once

#include "sdt/mixture.hpp"
#include "sdt/model.hpp"

namespace sdt {

// Order-beta curvature/variability matrices of a family at theta:
//   j  = int u u^T f^{1+beta}
//   xi = int u f^{1+beta}
//   k  = int u u^T f^{1+2 beta} - xi xi^T
//   v  = k  (the estimating function here has no extra centering beyond xi,
//            so the mid matrix of every sandwich equals k; kept as a separate
//            field so callers read the formulas as written)
struct DpdMatrices {
    MatrixXd j;
    VectorXd xi;
    MatrixXd k;
    MatrixXd v;
};

DpdMatrices dpd_matrices(const ParametricModel& model, const VectorXd& theta, double beta);

// P = J^{-1} - J^{-1} H (H^T J^{-1} H)^{-1} H^T J^{-1}; H is p x r, full rank.
MatrixXd restricted_projection(const MatrixXd& j, const MatrixXd& h);

// Sigma~ = (J^{-1} - P) V (J^{-1} - P), symmetrized.
MatrixXd sigma_tilde_matrix(const MatrixXd& j, const MatrixXd& p, const MatrixXd& v);

// Hessian of S(f_{theta1}, f_theta) in theta1 at theta1 = theta, by central
// second differences with steps 1e-4 * (1 + |theta_i|).  The result does not
// depend on lambda; the parameter is exposed so that invariance can be
// exercised, and defaults to the value used internally.
MatrixXd a_gamma_matrix(const ParametricModel& model, const VectorXd& theta, double gamma,
                        double lambda = 0.0);

// Everything needed to evaluate the null law of the statistic at theta0.
struct NullLawSpec {
    VectorXd theta0;
    double beta = 0.0;
    double gamma = 0.0;
    MatrixXd a_gamma;
    MatrixXd sigma_tilde;
    VectorXd zetas;  // positive eigenvalues of A_gamma Sigma~, descending
    int rank = 0;
};

NullLawSpec null_law(const ParametricModel& model, const VectorXd& theta0, double beta,
                     double gamma, const ConstraintSet& constraints);

// Central mixture sum_i zeta_i chi2_1.
ChiSquareMixture to_mixture(const NullLawSpec& law);

// Law under a local shift: weights stay the zetas, each chi-square picks up a
// noncentrality from the component of Sigma~^{-1/2} delta_star along the
// corresponding eigenvector.  delta_star must lie in the range of Sigma~.
ChiSquareMixture noncentral_shift(const NullLawSpec& law, const VectorXd& delta_star);

}  // namespace sdt
