#include "sdt/testing.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "sdt/detail/affine.hpp"
#include "sdt/divergence.hpp"
#include "sdt/errors.hpp"
#include "sdt/optim.hpp"
#include "sdt/quadrature.hpp"

namespace sdt {

double sdt_statistic(const ParametricModel& model, const VectorXd& theta_hat,
                     const VectorXd& theta_tilde, const TuningParams& tp, long long n) {
    if (n < 1) throw InvalidArgumentError("sdt_statistic: n must be >= 1");
    return 2.0 * static_cast<double>(n) *
           s_divergence_between_members(model, theta_hat, theta_tilde, tp);
}

TestReport run_sdt(const Sample& sample, const TestSpec& spec) {
    TestReport rep;
    rep.alpha_level = spec.alpha_level;
    rep.beta = spec.beta;
    rep.gamma = spec.gamma;
    rep.lambda = spec.lambda;
    rep.n = sample.n();
    if (!(spec.alpha_level > 0.0 && spec.alpha_level < 1.0)) {
        throw InvalidArgumentError("run_sdt: alpha must lie in (0,1)");
    }
    const TuningParams tp(spec.gamma, spec.lambda);

    rep.unrestricted = mdpde_fit(sample, spec.model, spec.beta, spec.estimation);
    rep.restricted = restricted_mdpde_fit(sample, spec.model, spec.beta,
                                          spec.null_constraints, spec.estimation);
    rep.statistic = sdt_statistic(spec.model, rep.unrestricted.theta_hat,
                                  rep.restricted.theta_hat, tp, rep.n);
    // Null law with the restricted estimate plugged in.
    rep.law = null_law(spec.model, rep.restricted.theta_hat, spec.beta, spec.gamma,
                       spec.null_constraints);
    const ChiSquareMixture mix = to_mixture(rep.law);
    rep.critical_value = mixture_quantile(mix, spec.alpha_level);
    rep.p_value = mixture_tail(mix, rep.statistic);
    rep.reject = rep.statistic > rep.critical_value;
    return rep;
}

namespace {

// Population DPD criterion between a fixed member f_star and f_theta:
//   d_b(theta) = int f_theta^{1+b} - (1 + 1/b) int f_theta^b f_star   (b > 0)
//   d_0(theta) = -int f_star log f_theta
// with gradient (1+b) [xi_b(theta) - int f_theta^b u_theta f_star].
struct PopulationDpd {
    const ParametricModel& model;
    VectorXd theta_star;
    double beta;

    std::pair<double, double> window(const VectorXd& theta) const {
        const auto [c1, s1] = model.window_hint(theta_star);
        const auto [c2, s2] = model.window_hint(theta);
        return {std::min(c1 - 10.0 * s1, c2 - 10.0 * s2),
                std::max(c1 + 10.0 * s1, c2 + 10.0 * s2)};
    }

    double value(const VectorXd& theta) const {
        if (model.is_discrete()) {
            const long long limit =
                std::max(model.support_limit(theta), model.support_limit(theta_star));
            double mass = 0.0, cross = 0.0;
            for (long long k = 0; k <= limit; ++k) {
                const double x = static_cast<double>(k);
                const double f = model.density(theta, x);
                const double fs = model.density(theta_star, x);
                if (beta == 0.0) {
                    cross += fs * std::log(std::max(f, 1e-300));
                } else {
                    mass += std::pow(f, 1.0 + beta);
                    cross += std::pow(f, beta) * fs;
                }
            }
            return beta == 0.0 ? -cross : mass - (1.0 + 1.0 / beta) * cross;
        }
        const auto [lo, hi] = window(theta);
        if (beta == 0.0) {
            return -integrate_gl(
                [&](double x) {
                    return model.density(theta_star, x) * model.log_density(theta, x);
                },
                lo, hi);
        }
        const double mass = power_mass(model, theta, beta);
        const double cross = integrate_gl(
            [&](double x) {
                return std::pow(model.density(theta, x), beta) *
                       model.density(theta_star, x);
            },
            lo, hi);
        return mass - (1.0 + 1.0 / beta) * cross;
    }

    VectorXd grad(const VectorXd& theta) const {
        const int p = model.dim_p;
        VectorXd cross = VectorXd::Zero(p);
        if (model.is_discrete()) {
            const long long limit =
                std::max(model.support_limit(theta), model.support_limit(theta_star));
            for (long long k = 0; k <= limit; ++k) {
                const double x = static_cast<double>(k);
                const double w =
                    beta == 0.0 ? 1.0 : std::pow(model.density(theta, x), beta);
                cross += w * model.density(theta_star, x) * model.score(theta, x);
            }
        } else {
            const auto [lo, hi] = window(theta);
            for (int i = 0; i < p; ++i) {
                cross[i] = integrate_gl(
                    [&](double x) {
                        const double w =
                            beta == 0.0 ? 1.0 : std::pow(model.density(theta, x), beta);
                        return w * model.density(theta_star, x) * model.score(theta, x)[i];
                    },
                    lo, hi);
            }
        }
        return ((1.0 + beta) * (xi_vector(model, theta, beta) - cross)).eval();
    }
};

}  // namespace

VectorXd population_restricted_dpd(const ParametricModel& model,
                                   const ConstraintSet& constraints, double beta,
                                   const VectorXd& theta_star) {
    model.check_theta(theta_star);
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw InvalidArgumentError("population fit: beta must lie in [0,1]");
    }
    if (!constraints.affine) {
        throw UnsupportedError("population fit: affine null constraints only");
    }
    const PopulationDpd pop{model, theta_star, beta};
    const detail::AffineParam ap = detail::affine_parameterization(constraints, model.dim_p);
    if (ap.basis.cols() == 0) {
        model.check_theta(ap.theta_p);
        return ap.theta_p;
    }
    auto to_theta = [&](const VectorXd& y) { return (ap.theta_p + ap.basis * y).eval(); };
    auto value_y = [&](const VectorXd& y) {
        const VectorXd theta = to_theta(y);
        if (model.in_param_space && !model.in_param_space(theta)) {
            return std::numeric_limits<double>::infinity();
        }
        try {
            const double v = pop.value(theta);
            return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
        } catch (const EvaluationError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    auto grad_y = [&](const VectorXd& y) {
        return (ap.basis.transpose() * pop.grad(to_theta(y))).eval();
    };

    // Starts: the projection of theta_star onto the constraint set, plus mild
    // spreads of it.
    const VectorXd y_star = ap.basis.transpose() * (theta_star - ap.theta_p);
    std::vector<VectorXd> ys = {y_star};
    for (int i = 0; i < y_star.size(); ++i) {
        VectorXd yp = y_star, ym = y_star;
        yp[i] += 0.3 * (1.0 + std::fabs(y_star[i]));
        ym[i] -= 0.3 * (1.0 + std::fabs(y_star[i]));
        ys.push_back(yp);
        ys.push_back(ym);
    }
    OptimOptions opts;
    opts.grad_tol = 1e-10;
    OptimResult best;
    bool have = false;
    for (const VectorXd& y0 : ys) {
        if (!std::isfinite(value_y(y0))) continue;
        OptimResult r = minimize_robust(value_y, grad_y, y0, opts);
        if (!have || r.fval < best.fval) {
            best = r;
            have = true;
        }
    }
    if (!have) throw ConvergenceError("population fit: no feasible start");
    return to_theta(best.x);
}

double power_approximation(const TestSpec& spec, const VectorXd& theta_star, long long n) {
    if (n < 1) throw InvalidArgumentError("power_approximation: n must be >= 1");
    const ParametricModel& model = spec.model;
    model.check_theta(theta_star);
    if (spec.null_constraints.h(theta_star).lpNorm<Eigen::Infinity>() <= 1e-9) {
        throw InvalidArgumentError(
            "power_approximation: theta_star must violate the null constraints");
    }
    const TuningParams tp(spec.gamma, spec.lambda);

    const VectorXd theta0 =
        population_restricted_dpd(model, spec.null_constraints, spec.beta, theta_star);
    const NullLawSpec law =
        null_law(model, theta0, spec.beta, spec.gamma, spec.null_constraints);
    const double crit = mixture_quantile(to_mixture(law), spec.alpha_level);

    const double s_sep = s_divergence_between_members(model, theta_star, theta0, tp);

    // Gradients of S in each slot by central differences.
    const int p = model.dim_p;
    VectorXd m1(p), m2(p);
    for (int i = 0; i < p; ++i) {
        const double h1 = 1e-5 * (1.0 + std::fabs(theta_star[i]));
        VectorXd tp1 = theta_star, tm1 = theta_star;
        tp1[i] += h1;
        tm1[i] -= h1;
        m1[i] = (s_divergence_between_members(model, tp1, theta0, tp) -
                 s_divergence_between_members(model, tm1, theta0, tp)) /
                (2.0 * h1);
        const double h2 = 1e-5 * (1.0 + std::fabs(theta0[i]));
        VectorXd tp2 = theta0, tm2 = theta0;
        tp2[i] += h2;
        tm2[i] -= h2;
        m2[i] = (s_divergence_between_members(model, theta_star, tp2, tp) -
                 s_divergence_between_members(model, theta_star, tm2, tp)) /
                (2.0 * h2);
    }

    const DpdMatrices at_star = dpd_matrices(model, theta_star, spec.beta);
    const MatrixXd jinv = at_star.j.inverse();
    const MatrixXd sig_star = jinv * at_star.v * jinv;

    const DpdMatrices at_null = dpd_matrices(model, theta0, spec.beta);
    const MatrixXd h = spec.null_constraints.jacobian(theta0);
    const MatrixXd proj = restricted_projection(at_null.j, h);
    const MatrixXd sig_null = proj * at_null.v * proj;

    const double var = m1.dot(sig_star * m1) + m2.dot(sig_null * m2);
    if (!(var > 1e-30)) {
        throw EvaluationError(
            "power_approximation: degenerate variance (alternative too close to the null)");
    }
    const double sd = std::sqrt(var);
    const double arg = std::sqrt(static_cast<double>(n)) / sd *
                       (crit / (2.0 * static_cast<double>(n)) - s_sep);
    return 1.0 - standard_normal_cdf(arg);
}

}  // namespace sdt
