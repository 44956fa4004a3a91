#include "sdt/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "sdt/divergence.hpp"
#include "sdt/errors.hpp"
#include "sdt/estimation.hpp"
#include "sdt/quadrature.hpp"

namespace sdt {

namespace {

MatrixXd outer_integral(const ParametricModel& model, const VectorXd& theta, double power) {
    // int u u^T f^{1+power}
    const int p = model.dim_p;
    MatrixXd acc = MatrixXd::Zero(p, p);
    if (model.is_discrete()) {
        const long long limit = model.support_limit(theta);
        for (long long k = 0; k <= limit; ++k) {
            const double x = static_cast<double>(k);
            const double f = model.density(theta, x);
            const VectorXd u = model.score(theta, x);
            acc += std::pow(f, 1.0 + power) * u * u.transpose();
        }
        return acc;
    }
    const auto [c, s] = model.window_hint(theta);
    for (int i = 0; i < p; ++i) {
        for (int j = i; j < p; ++j) {
            const double val = integrate_gl(
                [&](double x) {
                    const VectorXd u = model.score(theta, x);
                    return std::pow(model.density(theta, x), 1.0 + power) * u[i] * u[j];
                },
                c - 10.0 * s, c + 10.0 * s);
            acc(i, j) = val;
            acc(j, i) = val;
        }
    }
    return acc;
}

void require_psd(const MatrixXd& m, const std::string& what, double tol = 1e-6) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    const double max_abs = es.eigenvalues().cwiseAbs().maxCoeff();
    if (es.eigenvalues().minCoeff() < -tol * std::max(1.0, max_abs)) {
        throw EvaluationError(what + " is not positive semidefinite");
    }
}

MatrixXd psd_sqrt(const MatrixXd& m, bool inverse) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    const VectorXd ev = es.eigenvalues();
    const double max_ev = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    VectorXd d(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const double v = std::max(ev[i], 0.0);
        if (inverse) {
            d[i] = v > 1e-12 * max_ev ? 1.0 / std::sqrt(v) : 0.0;
        } else {
            d[i] = std::sqrt(v);
        }
    }
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

DpdMatrices dpd_matrices(const ParametricModel& model, const VectorXd& theta, double beta) {
    model.check_theta(theta);
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw InvalidArgumentError("dpd_matrices: beta must lie in [0,1]");
    }
    DpdMatrices m;
    if (model.matrices_hook) {
        const ModelMatrices mm = model.matrices_hook(theta, beta);
        m.j = mm.j;
        m.xi = mm.xi;
        m.k = mm.k;
    } else {
        m.j = outer_integral(model, theta, beta);
        m.xi = xi_vector(model, theta, beta);
        m.k = outer_integral(model, theta, 2.0 * beta) - m.xi * m.xi.transpose();
    }
    m.v = m.k;
    require_psd(m.j, model.name + ": J matrix");
    require_psd(m.k, model.name + ": K matrix");
    // J must be invertible for any of the sandwiches to make sense.
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.j);
    if (es.eigenvalues().minCoeff() <= 1e-12 * std::max(1.0, es.eigenvalues().maxCoeff())) {
        throw EvaluationError(model.name + ": J matrix is singular");
    }
    return m;
}

MatrixXd restricted_projection(const MatrixXd& j, const MatrixXd& h) {
    if (j.rows() != j.cols() || h.rows() != j.rows() || h.cols() == 0 ||
        h.cols() > h.rows()) {
        throw InvalidArgumentError("restricted_projection: bad shapes");
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(h);
    if (qr.rank() < h.cols()) {
        throw InvalidArgumentError("restricted_projection: H is rank deficient");
    }
    const MatrixXd jinv = j.inverse();
    const MatrixXd jh = jinv * h;                       // p x r
    const MatrixXd mid = (h.transpose() * jh).inverse();  // r x r
    MatrixXd p = jinv - jh * mid * jh.transpose();
    return 0.5 * (p + p.transpose());
}

MatrixXd sigma_tilde_matrix(const MatrixXd& j, const MatrixXd& p, const MatrixXd& v) {
    const MatrixXd diff = j.inverse() - p;
    MatrixXd s = diff * v * diff;
    return 0.5 * (s + s.transpose());
}

MatrixXd a_gamma_matrix(const ParametricModel& model, const VectorXd& theta, double gamma,
                        double lambda) {
    model.check_theta(theta);
    const TuningParams tp(gamma, lambda);
    const int p = model.dim_p;
    auto div = [&](const VectorXd& t1) {
        return s_divergence_between_members(model, t1, theta, tp);
    };
    VectorXd step(p);
    for (int i = 0; i < p; ++i) step[i] = 1e-4 * (1.0 + std::fabs(theta[i]));
    MatrixXd a(p, p);
    for (int i = 0; i < p; ++i) {
        VectorXd tp_ = theta, tm = theta;
        tp_[i] += step[i];
        tm[i] -= step[i];
        // S(theta, theta) = 0 exactly, so the diagonal needs only two evaluations.
        a(i, i) = (div(tp_) + div(tm)) / (step[i] * step[i]);
        for (int j = i + 1; j < p; ++j) {
            VectorXd tpp = theta, tpm = theta, tmp = theta, tmm = theta;
            tpp[i] += step[i];
            tpp[j] += step[j];
            tpm[i] += step[i];
            tpm[j] -= step[j];
            tmp[i] -= step[i];
            tmp[j] += step[j];
            tmm[i] -= step[i];
            tmm[j] -= step[j];
            a(i, j) = (div(tpp) - div(tpm) - div(tmp) + div(tmm)) /
                      (4.0 * step[i] * step[j]);
            a(j, i) = a(i, j);
        }
    }
    require_psd(a, model.name + ": A_gamma");
    return a;
}

NullLawSpec null_law(const ParametricModel& model, const VectorXd& theta0, double beta,
                     double gamma, const ConstraintSet& constraints) {
    const DpdMatrices mats = dpd_matrices(model, theta0, beta);
    const MatrixXd h = constraints.jacobian(theta0);
    const MatrixXd p = restricted_projection(mats.j, h);
    const MatrixXd sig = sigma_tilde_matrix(mats.j, p, mats.v);
    const MatrixXd a = a_gamma_matrix(model, theta0, gamma);

    const MatrixXd root = psd_sqrt(sig, false);
    MatrixXd m = root * a * root;
    m = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    const VectorXd ev = es.eigenvalues();
    const double max_ev = ev.cwiseAbs().maxCoeff();
    if (!(max_ev > 0.0)) {
        throw EvaluationError("null_law: degenerate law (no positive weights)");
    }
    std::vector<double> keep;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > 1e-10 * max_ev) keep.push_back(ev[i]);
    }
    if (keep.empty()) {
        throw EvaluationError("null_law: degenerate law (no positive weights)");
    }
    std::sort(keep.begin(), keep.end(), std::greater<double>());

    NullLawSpec law;
    law.theta0 = theta0;
    law.beta = beta;
    law.gamma = gamma;
    law.a_gamma = a;
    law.sigma_tilde = sig;
    law.zetas = Eigen::Map<VectorXd>(keep.data(), static_cast<Eigen::Index>(keep.size()));
    law.rank = static_cast<int>(keep.size());
    return law;
}

ChiSquareMixture to_mixture(const NullLawSpec& law) {
    return make_mixture(law.zetas, VectorXd::Ones(law.zetas.size()),
                        VectorXd::Zero(law.zetas.size()));
}

ChiSquareMixture noncentral_shift(const NullLawSpec& law, const VectorXd& delta_star) {
    if (delta_star.size() != law.sigma_tilde.rows()) {
        throw InvalidArgumentError("noncentral_shift: shift has wrong dimension");
    }
    const MatrixXd root = psd_sqrt(law.sigma_tilde, false);
    const MatrixXd pinv_root = psd_sqrt(law.sigma_tilde, true);
    const VectorXd w = pinv_root * delta_star;
    const double dnorm = delta_star.norm();
    if ((root * w - delta_star).norm() > 1e-8 * (1.0 + dnorm)) {
        throw InvalidArgumentError(
            "noncentral_shift: shift lies outside the range of sigma_tilde");
    }
    MatrixXd m = root * law.a_gamma * root;
    m = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    const VectorXd ev = es.eigenvalues();
    const VectorXd proj = es.eigenvectors().transpose() * w;
    const double max_ev = ev.cwiseAbs().maxCoeff();

    // Components of w along null eigenvectors would contribute a linear (not
    // chi-square) term; they must vanish.
    std::vector<std::pair<double, double>> comps;  // (weight, delta)
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > 1e-10 * max_ev) {
            comps.emplace_back(ev[i], proj[i] * proj[i]);
        } else if (std::fabs(proj[i]) > 1e-6 * (1.0 + w.norm())) {
            throw EvaluationError(
                "noncentral_shift: shift has a component outside the quadratic form");
        }
    }
    std::sort(comps.begin(), comps.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    VectorXd weights(static_cast<Eigen::Index>(comps.size()));
    VectorXd deltas(static_cast<Eigen::Index>(comps.size()));
    for (std::size_t i = 0; i < comps.size(); ++i) {
        weights[static_cast<Eigen::Index>(i)] = comps[i].first;
        deltas[static_cast<Eigen::Index>(i)] = comps[i].second;
    }
    return make_mixture(weights, VectorXd::Ones(weights.size()), deltas);
}

}  // namespace sdt
