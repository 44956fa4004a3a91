#include "sdt/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "sdt/detail/affine.hpp"
#include "sdt/divergence.hpp"
#include "sdt/errors.hpp"
#include "sdt/optim.hpp"
#include "sdt/quadrature.hpp"

namespace sdt {

namespace {

double guard_inf(double v) {
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

double power_mass(const ParametricModel& model, const VectorXd& theta, double b) {
    model.check_theta(theta);
    if (b == 0.0) return 1.0;
    if (model.power_integral_hook) return model.power_integral_hook(theta, b);
    if (model.is_discrete()) {
        const long long limit = model.support_limit(theta);
        double acc = 0.0;
        for (long long k = 0; k <= limit; ++k) {
            acc += std::pow(model.density(theta, static_cast<double>(k)), 1.0 + b);
        }
        return acc;
    }
    const auto [c, s] = model.window_hint(theta);
    return integrate_gl(
        [&](double x) { return std::pow(model.density(theta, x), 1.0 + b); },
        c - 10.0 * s, c + 10.0 * s);
}

VectorXd xi_vector(const ParametricModel& model, const VectorXd& theta, double b) {
    model.check_theta(theta);
    if (b == 0.0) return VectorXd::Zero(model.dim_p);
    if (model.matrices_hook) return model.matrices_hook(theta, b).xi;
    if (model.is_discrete()) {
        const long long limit = model.support_limit(theta);
        VectorXd acc = VectorXd::Zero(model.dim_p);
        for (long long k = 0; k <= limit; ++k) {
            const double x = static_cast<double>(k);
            acc += std::pow(model.density(theta, x), 1.0 + b) * model.score(theta, x);
        }
        return acc;
    }
    const auto [c, s] = model.window_hint(theta);
    VectorXd acc = VectorXd::Zero(model.dim_p);
    // Component-wise quadrature keeps the generic path simple.
    for (int i = 0; i < model.dim_p; ++i) {
        acc[i] = integrate_gl(
            [&](double x) {
                return std::pow(model.density(theta, x), 1.0 + b) * model.score(theta, x)[i];
            },
            c - 10.0 * s, c + 10.0 * s);
    }
    return acc;
}

double dpd_objective(const Sample& sample, const ParametricModel& model, double beta,
                     const VectorXd& theta) {
    model.check_theta(theta);
    const double n = static_cast<double>(sample.n());
    if (beta == 0.0) {
        double acc = 0.0;
        for (double x : sample.values) acc -= model.log_density(theta, x);
        return acc / n;
    }
    double emp = 0.0;
    for (double x : sample.values) emp += std::pow(model.density(theta, x), beta);
    emp /= n;
    return power_mass(model, theta, beta) - (1.0 + 1.0 / beta) * emp;
}

VectorXd dpd_psi(const Sample& sample, const ParametricModel& model, double beta,
                 const VectorXd& theta) {
    model.check_theta(theta);
    const double n = static_cast<double>(sample.n());
    VectorXd acc = VectorXd::Zero(model.dim_p);
    for (double x : sample.values) {
        const double w = beta == 0.0 ? 1.0 : std::pow(model.density(theta, x), beta);
        acc += w * model.score(theta, x);
    }
    acc /= n;
    return acc - xi_vector(model, theta, beta);
}

namespace {

// The estimating function whose root defines the fit; fed to the residual
// report and to the multiplier recovery.
using PsiFn = std::function<VectorXd(const VectorXd&)>;

struct RouteSpec {
    ScalarFn value;     // criterion in theta coordinates
    GradientFn grad;    // its gradient in theta coordinates
    PsiFn psi;
    FitRoute route = FitRoute::EmpiricalDpd;
    DpdSolver solver = DpdSolver::ExactMinimizer;
    double beta = 0.0;
    double tau = 0.0;
    double bandwidth = 0.0;
};

ScalarFn wrap_feasible(const ParametricModel& model, ScalarFn value) {
    return [&model, value = std::move(value)](const VectorXd& theta) {
        // Line searches probe freely in internal coordinates; a non-finite or
        // out-of-space point is simply infeasible, not an error.
        if (!theta.allFinite() ||
            (model.in_param_space && !model.in_param_space(theta))) {
            return std::numeric_limits<double>::infinity();
        }
        try {
            return guard_inf(value(theta));
        } catch (const EvaluationError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
}

void finalize(FitResult& fit, const RouteSpec& rs, const ConstraintSet* constraints,
              const EstimationConfig& cfg) {
    const VectorXd psi = rs.psi(fit.theta_hat);
    VectorXd resid = psi;
    bool feasible = true;
    if (constraints) {
        const MatrixXd h = constraints->jacobian(fit.theta_hat);
        fit.lagrange = h.colPivHouseholderQr().solve(-psi);
        resid = psi + h * fit.lagrange;
        feasible = constraints->h(fit.theta_hat).cwiseAbs().maxCoeff() <= 1e-8;
    }
    fit.grad_norm = resid.size() ? resid.cwiseAbs().maxCoeff() : 0.0;
    fit.converged = feasible && fit.grad_norm <= cfg.tolerance;
    fit.route = rs.route;
    fit.solver = rs.solver;
    fit.beta = rs.beta;
    fit.tau = rs.tau;
    fit.bandwidth = rs.bandwidth;
}

std::vector<VectorXd> gather_starts(const Sample& sample, const ParametricModel& model,
                                    const EstimationConfig& cfg) {
    if (!model.default_starts) {
        throw UnsupportedError(model.name + ": no default starting points");
    }
    std::vector<VectorXd> starts = model.default_starts(sample.values);
    const std::size_t want =
        std::max<std::size_t>(1, std::min<std::size_t>(cfg.multistart, starts.size()));
    starts.resize(want);
    return starts;
}

FitResult fit_unconstrained(const ParametricModel& model, const RouteSpec& rs,
                            const std::vector<VectorXd>& starts,
                            const EstimationConfig& cfg) {
    ScalarFn value = wrap_feasible(model, rs.value);
    auto value_z = [&](const VectorXd& z) { return value(model.from_internal(z)); };
    auto grad_z = [&](const VectorXd& z) {
        try {
            const VectorXd theta = model.from_internal(z);
            return (model.internal_scale(z).cwiseProduct(rs.grad(theta))).eval();
        } catch (const std::exception&) {
            return VectorXd::Constant(z.size(), std::numeric_limits<double>::quiet_NaN())
                .eval();
        }
    };
    OptimOptions opts;
    opts.grad_tol = 0.1 * cfg.tolerance;
    opts.max_iterations = cfg.max_iterations;
    OptimResult best;
    bool have = false;
    for (const VectorXd& s : starts) {
        if (!std::isfinite(value(s))) continue;
        OptimResult r = minimize_robust(value_z, grad_z, model.to_internal(s), opts);
        if (!have || r.fval < best.fval) {
            best = r;
            have = true;
        }
    }
    if (!have) throw ConvergenceError(model.name + ": no feasible starting point");
    FitResult fit;
    fit.theta_hat = model.from_internal(best.x);
    fit.objective = best.fval;
    fit.iterations = best.iterations;
    return fit;
}

using detail::AffineParam;
using detail::affine_parameterization;

FitResult fit_affine(const ParametricModel& model, const RouteSpec& rs,
                     const ConstraintSet& cs, const std::vector<VectorXd>& starts,
                     const EstimationConfig& cfg) {
    const AffineParam ap = affine_parameterization(cs, model.dim_p);
    ScalarFn value = wrap_feasible(model, rs.value);
    if (ap.basis.cols() == 0) {
        // Fully determined point; nothing to optimize.
        model.check_theta(ap.theta_p);
        FitResult fit;
        fit.theta_hat = ap.theta_p;
        fit.objective = value(ap.theta_p);
        fit.iterations = 0;
        return fit;
    }
    auto to_theta = [&](const VectorXd& y) { return (ap.theta_p + ap.basis * y).eval(); };
    auto value_y = [&](const VectorXd& y) { return value(to_theta(y)); };
    auto grad_y = [&](const VectorXd& y) {
        return (ap.basis.transpose() * rs.grad(to_theta(y))).eval();
    };
    OptimOptions opts;
    opts.grad_tol = 0.1 * cfg.tolerance;
    opts.max_iterations = cfg.max_iterations;
    OptimResult best;
    bool have = false;
    for (const VectorXd& s : starts) {
        const VectorXd y0 = ap.basis.transpose() * (s - ap.theta_p);
        if (!std::isfinite(value_y(y0))) continue;
        OptimResult r = minimize_robust(value_y, grad_y, y0, opts);
        if (!have || r.fval < best.fval) {
            best = r;
            have = true;
        }
    }
    if (!have) throw ConvergenceError(model.name + ": no feasible restricted starting point");
    FitResult fit;
    fit.theta_hat = to_theta(best.x);
    fit.objective = best.fval;
    fit.iterations = best.iterations;
    return fit;
}

FitResult fit_augmented_lagrangian(const ParametricModel& model, const RouteSpec& rs,
                                   const ConstraintSet& cs,
                                   const std::vector<VectorXd>& starts,
                                   const EstimationConfig& cfg) {
    ScalarFn value = wrap_feasible(model, rs.value);
    VectorXd mult = VectorXd::Zero(cs.r);
    double rho = 10.0;
    OptimOptions opts;
    opts.grad_tol = 0.1 * cfg.tolerance;
    opts.max_iterations = cfg.max_iterations;

    auto penalized = [&](const VectorXd& theta) {
        const double base = value(theta);
        if (!std::isfinite(base)) return base;
        const VectorXd hv = cs.h(theta);
        return base + mult.dot(hv) + 0.5 * rho * hv.squaredNorm();
    };
    auto penalized_grad = [&](const VectorXd& theta) {
        const VectorXd hv = cs.h(theta);
        const MatrixXd hj = cs.jacobian(theta);
        return (rs.grad(theta) + hj * (mult + rho * hv)).eval();
    };
    auto value_z = [&](const VectorXd& z) { return penalized(model.from_internal(z)); };
    auto grad_z = [&](const VectorXd& z) {
        try {
            const VectorXd theta = model.from_internal(z);
            return (model.internal_scale(z).cwiseProduct(penalized_grad(theta))).eval();
        } catch (const std::exception&) {
            return VectorXd::Constant(z.size(), std::numeric_limits<double>::quiet_NaN())
                .eval();
        }
    };

    // First outer pass: multistart; later passes warm-start.
    VectorXd z;
    double best_val = std::numeric_limits<double>::infinity();
    bool have = false;
    int iters = 0;
    for (const VectorXd& s : starts) {
        if (!std::isfinite(value(s))) continue;
        OptimResult r = minimize_robust(value_z, grad_z, model.to_internal(s), opts);
        iters += r.iterations;
        if (!have || r.fval < best_val) {
            z = r.x;
            best_val = r.fval;
            have = true;
        }
    }
    if (!have) throw ConvergenceError(model.name + ": no feasible restricted starting point");

    double h_prev = std::numeric_limits<double>::infinity();
    for (int outer = 0; outer < 40; ++outer) {
        const VectorXd theta = model.from_internal(z);
        const double h_now = cs.h(theta).cwiseAbs().maxCoeff();
        if (h_now <= 1e-8) break;
        mult += rho * cs.h(theta);
        if (h_now > 0.25 * h_prev) rho *= 2.0;
        h_prev = h_now;
        OptimResult r = minimize_robust(value_z, grad_z, z, opts);
        iters += r.iterations;
        z = r.x;
    }
    FitResult fit;
    fit.theta_hat = model.from_internal(z);
    fit.objective = value(fit.theta_hat);
    fit.iterations = iters;
    return fit;
}

FitResult fit_with_route(const Sample& sample, const ParametricModel& model,
                         const RouteSpec& rs, const ConstraintSet* constraints,
                         const EstimationConfig& cfg) {
    const std::vector<VectorXd> starts = gather_starts(sample, model, cfg);
    FitResult fit;
    if (!constraints) {
        fit = fit_unconstrained(model, rs, starts, cfg);
    } else if (constraints->affine) {
        fit = fit_affine(model, rs, *constraints, starts, cfg);
    } else {
        fit = fit_augmented_lagrangian(model, rs, *constraints, starts, cfg);
    }
    finalize(fit, rs, constraints, cfg);
    return fit;
}

// Weighted-score route: solve Psi_w(theta) = (1/n) sum f^beta u = 0 (projected
// onto the feasible subspace when an affine constraint is present) by
// minimizing the squared residual and polishing with Newton steps on the
// residual system itself.
FitResult fit_weighted_score(const Sample& sample, const ParametricModel& model, double beta,
                             const ConstraintSet* constraints, const EstimationConfig& cfg) {
    if (beta >= 1.0) {
        throw InvalidArgumentError(
            "weighted-score solver: beta must be < 1 (the scale equation degenerates)");
    }
    if (constraints && !constraints->affine) {
        throw UnsupportedError("weighted-score solver supports affine constraints only");
    }
    auto psi_w = [&sample, &model, beta](const VectorXd& theta) {
        return (dpd_psi(sample, model, beta, theta) + xi_vector(model, theta, beta)).eval();
    };

    const std::vector<VectorXd> starts = gather_starts(sample, model, cfg);
    FitResult fit;
    RouteSpec rs;
    rs.route = FitRoute::EmpiricalDpd;
    rs.solver = DpdSolver::WeightedScore;
    rs.beta = beta;
    rs.psi = [psi_w](const VectorXd& th) { return psi_w(th); };
    rs.value = [&sample, &model, beta](const VectorXd& th) {
        return dpd_objective(sample, model, beta, th);
    };

    auto solve_system = [&](auto to_theta, auto project, const VectorXd& y0, int dim) {
        auto residual = [&](const VectorXd& y) { return project(psi_w(to_theta(y))); };
        auto merit = [&](const VectorXd& y) {
            const VectorXd theta = to_theta(y);
            if (model.in_param_space && !model.in_param_space(theta)) {
                return std::numeric_limits<double>::infinity();
            }
            return 0.5 * residual(y).squaredNorm();
        };
        auto merit_grad = [&](const VectorXd& y) { return numeric_gradient(merit, y); };
        OptimOptions opts;
        opts.grad_tol = 1e-16;  // merit gradient scale, not the reported residual
        opts.max_iterations = cfg.max_iterations;
        OptimResult r = minimize_bfgs(merit, merit_grad, y0, opts);
        // Newton on the residual system.
        VectorXd y = r.x;
        for (int it = 0; it < 60; ++it) {
            const VectorXd res = residual(y);
            if (res.cwiseAbs().maxCoeff() <= 0.1 * cfg.tolerance) break;
            MatrixXd jac(dim, dim);
            for (int i = 0; i < dim; ++i) {
                const double h = 1e-6 * (1.0 + std::fabs(y[i]));
                VectorXd yp = y, ym = y;
                yp[i] += h;
                ym[i] -= h;
                jac.col(i) = (residual(yp) - residual(ym)) / (2.0 * h);
            }
            VectorXd step = jac.colPivHouseholderQr().solve(-res);
            if (!step.allFinite()) break;
            double t = 1.0;
            bool ok = false;
            const double base = res.squaredNorm();
            for (int ls = 0; ls < 40; ++ls) {
                VectorXd yn = y + t * step;
                if (std::isfinite(merit(yn)) && residual(yn).squaredNorm() < base) {
                    y = yn;
                    ok = true;
                    break;
                }
                t *= 0.5;
            }
            if (!ok) break;
        }
        return std::pair<VectorXd, int>(y, r.iterations);
    };

    // Mean weight carried by the sample at theta.  Roots where this mass
    // underflows solve the weighted equations vacuously (every summand is
    // zero) and must not be selected.
    auto weight_mass = [&](const VectorXd& theta) {
        double acc = 0.0;
        for (double x : sample.values) acc += std::exp(beta * model.log_density(theta, x));
        return acc / static_cast<double>(sample.n());
    };
    // Candidate ranking: genuinely solved roots beat unsolved ones; among
    // solved roots the one with the smallest divergence objective wins (the
    // weighted equations can have several roots), otherwise smaller residual.
    double best_value = std::numeric_limits<double>::infinity();
    double best_resid = std::numeric_limits<double>::infinity();
    bool best_solved = false;
    VectorXd best_theta;
    auto consider = [&](const VectorXd& theta, const VectorXd& projected) {
        if (!theta.allFinite()) return;
        if (model.in_param_space && !model.in_param_space(theta)) return;
        if (weight_mass(theta) <= 1e-30) return;
        const double resid = projected.cwiseAbs().maxCoeff();
        const bool solved = resid <= cfg.tolerance;
        const double value = rs.value(theta);
        bool better;
        if (best_theta.size() == 0) {
            better = true;
        } else if (solved != best_solved) {
            better = solved;
        } else {
            better = solved ? value < best_value : resid < best_resid;
        }
        if (better) {
            best_theta = theta;
            best_value = value;
            best_resid = resid;
            best_solved = solved;
        }
    };

    if (!constraints) {
        auto to_theta = [&](const VectorXd& z) { return model.from_internal(z); };
        auto project = [](const VectorXd& v) { return v; };
        int iters = 0;
        for (const VectorXd& s : starts) {
            auto [z, it] = solve_system(to_theta, project, model.to_internal(s), model.dim_p);
            iters += it;
            const VectorXd theta = to_theta(z);
            consider(theta, psi_w(theta));
        }
        if (best_theta.size() == 0) throw ConvergenceError("weighted-score: no solution found");
        fit.theta_hat = best_theta;
        fit.iterations = iters;
    } else {
        const AffineParam ap = affine_parameterization(*constraints, model.dim_p);
        if (ap.basis.cols() == 0) {
            model.check_theta(ap.theta_p);
            fit.theta_hat = ap.theta_p;
            fit.iterations = 0;
        } else {
            auto to_theta = [&](const VectorXd& y) { return (ap.theta_p + ap.basis * y).eval(); };
            auto project = [&](const VectorXd& v) { return (ap.basis.transpose() * v).eval(); };
            int iters = 0;
            for (const VectorXd& s : starts) {
                const VectorXd y0 = ap.basis.transpose() * (s - ap.theta_p);
                auto [y, it] =
                    solve_system(to_theta, project, y0, static_cast<int>(ap.basis.cols()));
                iters += it;
                const VectorXd theta = to_theta(y);
                consider(theta, project(psi_w(theta)));
            }
            if (best_theta.size() == 0) {
                throw ConvergenceError("weighted-score: no restricted solution found");
            }
            fit.theta_hat = best_theta;
            fit.iterations = iters;
        }
    }
    fit.objective = rs.value(fit.theta_hat);
    finalize(fit, rs, constraints, cfg);
    return fit;
}

RouteSpec dpd_route(const Sample& sample, const ParametricModel& model, double beta) {
    RouteSpec rs;
    rs.route = FitRoute::EmpiricalDpd;
    rs.beta = beta;
    rs.value = [&sample, &model, beta](const VectorXd& th) {
        return dpd_objective(sample, model, beta, th);
    };
    rs.grad = [&sample, &model, beta](const VectorXd& th) {
        return (-(1.0 + beta) * dpd_psi(sample, model, beta, th)).eval();
    };
    rs.psi = [&sample, &model, beta](const VectorXd& th) {
        return dpd_psi(sample, model, beta, th);
    };
    return rs;
}

}  // namespace

FitResult mdpde_fit(const Sample& sample, const ParametricModel& model, double beta,
                    const EstimationConfig& cfg) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw InvalidArgumentError("mdpde_fit: beta must lie in [0,1]");
    }
    if (cfg.solver == DpdSolver::WeightedScore) {
        return fit_weighted_score(sample, model, beta, nullptr, cfg);
    }
    return fit_with_route(sample, model, dpd_route(sample, model, beta), nullptr, cfg);
}

FitResult restricted_mdpde_fit(const Sample& sample, const ParametricModel& model, double beta,
                               const ConstraintSet& constraints, const EstimationConfig& cfg) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw InvalidArgumentError("restricted_mdpde_fit: beta must lie in [0,1]");
    }
    if (constraints.r > model.dim_p) {
        throw InvalidArgumentError("restricted_mdpde_fit: more constraints than parameters");
    }
    if (cfg.solver == DpdSolver::WeightedScore) {
        return fit_weighted_score(sample, model, beta, &constraints, cfg);
    }
    return fit_with_route(sample, model, dpd_route(sample, model, beta), &constraints, cfg);
}

namespace {

struct DiscreteData {
    std::vector<double> g;  // empirical mass on 0..limit
    long long limit = 0;
};

DiscreteData discrete_data(const Sample& sample, const ParametricModel& model,
                           const std::vector<VectorXd>& starts) {
    DiscreteTable table = relative_frequency(sample);
    long long limit = table.points.back();
    for (const VectorXd& s : starts) {
        if (model.in_param_space && !model.in_param_space(s)) continue;
        limit = std::max(limit, model.support_limit(s));
    }
    DiscreteData dd;
    dd.limit = limit;
    dd.g.assign(static_cast<std::size_t>(limit + 1), 0.0);
    for (std::size_t i = 0; i < table.points.size(); ++i) {
        dd.g[static_cast<std::size_t>(table.points[i])] = table.mass[i];
    }
    return dd;
}

}  // namespace

FitResult msde_fit_discrete(const Sample& sample, const ParametricModel& model,
                            const TuningParams& tp, const ConstraintSet* constraints,
                            const EstimationConfig& cfg) {
    if (!model.is_discrete()) {
        throw InvalidArgumentError("msde_fit_discrete: model must have counting support");
    }
    const std::vector<VectorXd> starts = gather_starts(sample, model, cfg);
    // The truncation point is frozen for the whole fit so the objective stays
    // smooth in theta.
    auto dd = std::make_shared<DiscreteData>(discrete_data(sample, model, starts));

    RouteSpec rs;
    rs.route = FitRoute::DiscreteMsde;
    rs.beta = tp.gamma;
    rs.tau = tp.lambda;
    rs.value = [dd, &model, tp](const VectorXd& th) {
        double acc = 0.0;
        for (long long k = 0; k <= dd->limit; ++k) {
            acc += s_divergence_term(dd->g[static_cast<std::size_t>(k)],
                                     model.density(th, static_cast<double>(k)), tp);
        }
        return acc;
    };
    auto psi = [dd, &model, tp](const VectorXd& th) {
        VectorXd acc = VectorXd::Zero(model.dim_p);
        for (long long k = 0; k <= dd->limit; ++k) {
            const double x = static_cast<double>(k);
            const double f = model.density(th, x);
            if (f <= 0.0) continue;
            const double delta = dd->g[static_cast<std::size_t>(k)] / f - 1.0;
            acc += k_transform(delta, tp.a) * std::pow(f, 1.0 + tp.gamma) *
                   model.score(th, x);
        }
        return acc;
    };
    rs.psi = psi;
    rs.grad = [psi, tp](const VectorXd& th) { return (-(1.0 + tp.gamma) * psi(th)).eval(); };
    return fit_with_route(sample, model, rs, constraints, cfg);
}

namespace {

FitResult basu_lindsay_impl(const Sample& sample, const GridFunction& g_star,
                            const ParametricModel& model, const TuningParams& tp,
                            double bandwidth, const ConstraintSet* constraints,
                            const EstimationConfig& cfg) {
    const SmoothedModel sm = smooth_model(model, bandwidth);
    auto star = std::make_shared<ParametricModel>(sm.star);
    auto grid = std::make_shared<GridFunction>(g_star);
    const std::size_t m = grid->values.size();
    const double dx = grid->dx();

    auto node = [grid](std::size_t j) {
        return grid->lo + static_cast<double>(j) * grid->dx();
    };
    auto weight = [m, dx](std::size_t j) {
        return (j == 0 || j + 1 == m) ? 0.5 * dx : dx;
    };

    RouteSpec rs;
    rs.route = FitRoute::BasuLindsay;
    rs.beta = tp.gamma;
    rs.tau = tp.lambda;
    rs.bandwidth = bandwidth;
    rs.value = [grid, star, tp, node, weight, m](const VectorXd& th) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            acc += weight(j) * s_divergence_term(grid->values[j], star->density(th, node(j)), tp);
        }
        return acc;
    };
    auto psi = [grid, star, tp, node, weight, m](const VectorXd& th) {
        VectorXd acc = VectorXd::Zero(star->dim_p);
        for (std::size_t j = 0; j < m; ++j) {
            const double x = node(j);
            const double f = star->density(th, x);
            if (f <= 0.0) continue;
            const double delta = grid->values[j] / f - 1.0;
            acc += weight(j) * k_transform(delta, tp.a) * std::pow(f, 1.0 + tp.gamma) *
                   star->score(th, x);
        }
        return acc;
    };
    rs.psi = psi;
    rs.grad = [psi, tp](const VectorXd& th) { return (-(1.0 + tp.gamma) * psi(th)).eval(); };
    return fit_with_route(sample, model, rs, constraints, cfg);
}

}  // namespace

FitResult msde_fit_basu_lindsay(const Sample& sample, const ParametricModel& model,
                                const TuningParams& tp, double bandwidth,
                                const ConstraintSet* constraints,
                                const EstimationConfig& cfg) {
    if (model.is_discrete()) {
        throw InvalidArgumentError("msde_fit_basu_lindsay: model must be continuous");
    }
    const GridFunction g_star = kernel_density(sample, bandwidth);
    return basu_lindsay_impl(sample, g_star, model, tp, bandwidth, constraints, cfg);
}

FitResult msde_fit_basu_lindsay(const GridFunction& g_star, const ParametricModel& model,
                                const TuningParams& tp, double bandwidth,
                                const ConstraintSet* constraints,
                                const EstimationConfig& cfg) {
    if (model.is_discrete()) {
        throw InvalidArgumentError("msde_fit_basu_lindsay: model must be continuous");
    }
    // Starting points still come from raw data; synthesize a pseudo-sample
    // from the grid midpoint statistics instead.
    Sample pseudo;
    const double dx = g_star.dx();
    for (std::size_t j = 0; j < g_star.values.size(); ++j) {
        // Weighted resampling is unnecessary; the starts only need location/scale.
        const double x = g_star.lo + static_cast<double>(j) * dx;
        const int copies = static_cast<int>(std::round(g_star.values[j] * dx * 1000.0));
        for (int c = 0; c < copies; ++c) pseudo.values.push_back(x);
    }
    if (pseudo.values.size() < 2) {
        pseudo.values = {g_star.lo, 0.5 * (g_star.lo + g_star.hi), g_star.hi};
    }
    return basu_lindsay_impl(pseudo, g_star, model, tp, bandwidth, constraints, cfg);
}

double estimating_equation_residual(const FitResult& fit, const Sample& sample,
                                    const ParametricModel& model,
                                    const ConstraintSet* constraints) {
    VectorXd psi;
    switch (fit.route) {
        case FitRoute::EmpiricalDpd: {
            psi = dpd_psi(sample, model, fit.beta, fit.theta_hat);
            if (fit.solver == DpdSolver::WeightedScore) {
                psi += xi_vector(model, fit.theta_hat, fit.beta);
            }
            break;
        }
        case FitRoute::DiscreteMsde: {
            const TuningParams tp(fit.beta, fit.tau);
            DiscreteTable table = relative_frequency(sample);
            long long limit = std::max(table.points.back(), model.support_limit(fit.theta_hat));
            std::vector<double> g(static_cast<std::size_t>(limit + 1), 0.0);
            for (std::size_t i = 0; i < table.points.size(); ++i) {
                g[static_cast<std::size_t>(table.points[i])] = table.mass[i];
            }
            psi = VectorXd::Zero(model.dim_p);
            for (long long k = 0; k <= limit; ++k) {
                const double x = static_cast<double>(k);
                const double f = model.density(fit.theta_hat, x);
                if (f <= 0.0) continue;
                const double delta = g[static_cast<std::size_t>(k)] / f - 1.0;
                psi += k_transform(delta, tp.a) * std::pow(f, 1.0 + tp.gamma) *
                       model.score(fit.theta_hat, x);
            }
            break;
        }
        case FitRoute::BasuLindsay: {
            const TuningParams tp(fit.beta, fit.tau);
            const SmoothedModel sm = smooth_model(model, fit.bandwidth);
            const GridFunction g_star = kernel_density(sample, fit.bandwidth);
            const std::size_t m = g_star.values.size();
            const double dx = g_star.dx();
            psi = VectorXd::Zero(model.dim_p);
            for (std::size_t j = 0; j < m; ++j) {
                const double x = g_star.lo + static_cast<double>(j) * dx;
                const double w = (j == 0 || j + 1 == m) ? 0.5 * dx : dx;
                const double f = sm.star.density(fit.theta_hat, x);
                if (f <= 0.0) continue;
                const double delta = g_star.values[j] / f - 1.0;
                psi += w * k_transform(delta, tp.a) * std::pow(f, 1.0 + tp.gamma) *
                       sm.star.score(fit.theta_hat, x);
            }
            break;
        }
    }
    if (constraints && fit.lagrange.size() > 0) {
        psi += constraints->jacobian(fit.theta_hat) * fit.lagrange;
    }
    return psi.cwiseAbs().maxCoeff();
}

}  // namespace sdt
