#include "sdt/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdt/errors.hpp"
#include "sdt/quadrature.hpp"

namespace sdt {

double s_divergence_term(double g_val, double f_val, const TuningParams& tp) {
    if (!(g_val >= 0.0) || !(f_val >= 0.0)) {
        throw InvalidArgumentError("s_divergence: negative density value");
    }
    const double gp1 = 1.0 + tp.gamma;

    if (tp.a_is_zero()) {
        // S -> int f^{1+g} log(f/g) + (int g^{1+g} - int f^{1+g}) / (1+g)
        if (f_val == 0.0) return std::pow(g_val, gp1) / gp1;
        if (g_val == 0.0) {
            throw EvaluationError("s_divergence: f^{1+gamma} log(f/g) diverges where g=0");
        }
        const double fp = std::pow(f_val, gp1);
        return fp * std::log(f_val / g_val) + (std::pow(g_val, gp1) - fp) / gp1;
    }
    if (tp.b_is_zero()) {
        if (g_val == 0.0) return std::pow(f_val, gp1) / gp1;
        if (f_val == 0.0) {
            throw EvaluationError("s_divergence: g^{1+gamma} log(g/f) diverges where f=0");
        }
        const double gp = std::pow(g_val, gp1);
        return gp * std::log(g_val / f_val) + (std::pow(f_val, gp1) - gp) / gp1;
    }

    if (f_val == 0.0 && g_val == 0.0) return 0.0;
    if (f_val == 0.0) {
        if (tp.b < 0.0) {
            throw EvaluationError("s_divergence: f^B g^A diverges where f=0 (B<0)");
        }
        return std::pow(g_val, gp1) / tp.b;
    }
    if (g_val == 0.0) {
        if (tp.a < 0.0) {
            throw EvaluationError("s_divergence: f^B g^A diverges where g=0 (A<0)");
        }
        return std::pow(f_val, gp1) / tp.a;
    }
    const double cross = std::pow(f_val, tp.b) * std::pow(g_val, tp.a);
    return std::pow(f_val, gp1) / tp.a + std::pow(g_val, gp1) / tp.b -
           gp1 / (tp.a * tp.b) * cross;
}

namespace {

double discrete_pair(const DiscreteTable& g, const DiscreteTable& f, const TuningParams& tp) {
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < g.points.size() || j < f.points.size()) {
        double gv = 0.0, fv = 0.0;
        long long pg = (i < g.points.size()) ? g.points[i] : 0;
        long long pf = (j < f.points.size()) ? f.points[j] : 0;
        if (i < g.points.size() && (j >= f.points.size() || pg < pf)) {
            gv = g.mass[i++];
        } else if (j < f.points.size() && (i >= g.points.size() || pf < pg)) {
            fv = f.mass[j++];
        } else {
            gv = g.mass[i++];
            fv = f.mass[j++];
        }
        acc += s_divergence_term(gv, fv, tp);
    }
    return acc;
}

double grid_pair(const GridFunction& g, const GridFunction& f, const TuningParams& tp) {
    const double tol = 1e-9 * (1.0 + std::fabs(g.lo) + std::fabs(g.hi));
    if (g.values.size() != f.values.size() || std::fabs(g.lo - f.lo) > tol ||
        std::fabs(g.hi - f.hi) > tol) {
        throw InvalidArgumentError("s_divergence: grid functions live on different grids");
    }
    const std::size_t n = g.values.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        acc += w * s_divergence_term(g.values[i], f.values[i], tp);
    }
    return acc * g.dx();
}

}  // namespace

double s_divergence(const DensityRep& g, const DensityRep& f, const TuningParams& tp) {
    if (std::holds_alternative<DiscreteTable>(g) && std::holds_alternative<DiscreteTable>(f)) {
        return discrete_pair(std::get<DiscreteTable>(g), std::get<DiscreteTable>(f), tp);
    }
    if (std::holds_alternative<GridFunction>(g) && std::holds_alternative<GridFunction>(f)) {
        return grid_pair(std::get<GridFunction>(g), std::get<GridFunction>(f), tp);
    }
    throw InvalidArgumentError("s_divergence: representations must be of the same kind");
}

double s_divergence_between_members_quadrature(const ParametricModel& model,
                                               const VectorXd& theta1,
                                               const VectorXd& theta2,
                                               const TuningParams& tp) {
    model.check_theta(theta1);
    model.check_theta(theta2);
    if (model.is_discrete()) {
        if (!model.support_limit) {
            throw UnsupportedError(model.name + ": discrete model lacks a support limit");
        }
        const long long limit =
            std::max(model.support_limit(theta1), model.support_limit(theta2));
        double acc = 0.0;
        for (long long k = 0; k <= limit; ++k) {
            const double x = static_cast<double>(k);
            acc += s_divergence_term(model.density(theta1, x), model.density(theta2, x), tp);
        }
        return acc;
    }
    const auto [c1, s1] = model.window_hint(theta1);
    const auto [c2, s2] = model.window_hint(theta2);
    const double lo = std::min(c1 - 10.0 * s1, c2 - 10.0 * s2);
    const double hi = std::max(c1 + 10.0 * s1, c2 + 10.0 * s2);
    auto integrand = [&](double x) {
        return s_divergence_term(model.density(theta1, x), model.density(theta2, x), tp);
    };
    return integrate_gl(integrand, lo, hi);
}

double s_divergence_between_members(const ParametricModel& model, const VectorXd& theta1,
                                    const VectorXd& theta2, const TuningParams& tp) {
    if (model.divergence_hook) {
        model.check_theta(theta1);
        model.check_theta(theta2);
        return model.divergence_hook(theta1, theta2, tp);
    }
    return s_divergence_between_members_quadrature(model, theta1, theta2, tp);
}

}  // namespace sdt
