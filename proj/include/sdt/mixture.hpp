#pragma once

#include <Eigen/Dense>

namespace sdt {

// Law of sum_i w_i * chi2(dof_i, delta_i); weights strictly positive.
struct ChiSquareMixture {
    Eigen::VectorXd weights;
    Eigen::VectorXd dofs;
    Eigen::VectorXd deltas;  // noncentrality parameters
};

ChiSquareMixture make_mixture(Eigen::VectorXd weights, Eigen::VectorXd dofs,
                              Eigen::VectorXd deltas);

// Upper tail P(Q > x) via characteristic-function inversion (Imhof's
// integral), absolute error below 1e-6.  x <= 0 returns 1.
double mixture_tail(const ChiSquareMixture& mixture, double x);

// Upper-alpha quantile: the x with mixture_tail(x) = alpha (within 1e-6).
double mixture_quantile(const ChiSquareMixture& mixture, double alpha);

}  // namespace sdt
