#pragma once

#include <Eigen/Dense>

#include "sdt/errors.hpp"
#include "sdt/model.hpp"

namespace sdt::detail {

// Parameterization of the affine set {theta : C theta = t} as
// theta = theta_p + basis * y with orthonormal basis columns spanning ker C.
struct AffineParam {
    Eigen::VectorXd theta_p;
    Eigen::MatrixXd basis;  // p x (p - r)
};

inline AffineParam affine_parameterization(const ConstraintSet& cs, int dim_p) {
    if (!cs.affine) {
        throw InvalidArgumentError("expected an affine constraint set");
    }
    const Eigen::MatrixXd& c = cs.affine->c;
    const Eigen::VectorXd& t = cs.affine->target;
    if (c.cols() != dim_p) {
        throw InvalidArgumentError("constraint dimension does not match the model");
    }
    AffineParam ap;
    ap.theta_p = c.colPivHouseholderQr().solve(t);
    if ((c * ap.theta_p - t).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + t.cwiseAbs().maxCoeff())) {
        throw InvalidArgumentError("affine constraint is inconsistent");
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
    Eigen::MatrixXd kernel = lu.kernel();
    if (lu.rank() < c.rows()) {
        throw InvalidArgumentError("affine constraint rows are not linearly independent");
    }
    if (kernel.cols() > 0 && lu.rank() < c.cols()) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
        ap.basis = qr.householderQ() * Eigen::MatrixXd::Identity(dim_p, kernel.cols());
    } else {
        ap.basis = Eigen::MatrixXd::Zero(dim_p, 0);
    }
    return ap;
}

}  // namespace sdt::detail
