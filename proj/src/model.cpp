#include "sdt/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdt/closed_form.hpp"
#include "sdt/errors.hpp"
#include "sdt/quadrature.hpp"
#include "sdt/sample.hpp"

namespace sdt {

void ParametricModel::check_theta(const VectorXd& theta) const {
    if (theta.size() != dim_p) {
        throw InvalidArgumentError(name + ": parameter has length " +
                                   std::to_string(theta.size()) + ", expected " +
                                   std::to_string(dim_p));
    }
    for (int i = 0; i < theta.size(); ++i) {
        if (!std::isfinite(theta[i])) {
            throw InvalidArgumentError(name + ": non-finite parameter");
        }
    }
    if (in_param_space && !in_param_space(theta)) {
        throw InvalidArgumentError(name + ": parameter outside the parameter space");
    }
}

namespace {

constexpr double kHalfLog2Pi = 0.9189385332046727;  // log(2*pi)/2

double positive_or(double value, double fallback) {
    return value > 0.0 ? value : fallback;
}

ModelMatrices normal_matrices(double sigma, double beta) {
    // J and K are diagonal for the normal family; xi has only a sigma
    // component.  kappa(b) = (2*pi)^(-b/2) (1+b)^(-1/2).
    const double kb = normal_power_integral_coeff(beta);
    const double k2b = normal_power_integral_coeff(2.0 * beta);
    const double sp = std::pow(sigma, 2.0 + beta);
    const double sp2 = std::pow(sigma, 2.0 + 2.0 * beta);
    ModelMatrices mm;
    mm.j = MatrixXd::Zero(2, 2);
    mm.j(0, 0) = kb / ((1.0 + beta) * sp);
    mm.j(1, 1) = kb * (2.0 + beta * beta) / ((1.0 + beta) * (1.0 + beta) * sp);
    mm.xi = VectorXd::Zero(2);
    mm.xi[1] = -kb * beta / ((1.0 + beta) * std::pow(sigma, 1.0 + beta));
    // K is the variance of f^beta u, so the centering term uses the order-beta xi.
    mm.k = MatrixXd::Zero(2, 2);
    mm.k(0, 0) = k2b / ((1.0 + 2.0 * beta) * sp2);
    mm.k(1, 1) = k2b * (2.0 + 4.0 * beta * beta) /
                     ((1.0 + 2.0 * beta) * (1.0 + 2.0 * beta) * sp2) -
                 mm.xi[1] * mm.xi[1];
    return mm;
}

ParametricModel normal_like(std::string name, bool fixed_sigma, double sigma0);

ParametricModel make_normal_star(double mu_free_sigma0, bool fixed_sigma, double h) {
    // Gaussian-kernel smoothing of a normal family is again normal with the
    // bandwidth folded into the scale; the family stays indexed by theta.
    if (fixed_sigma) {
        const double s_star = std::hypot(mu_free_sigma0, h);
        ParametricModel star = normal_like("normal-fixed-sigma*", true, s_star);
        return star;
    }
    ParametricModel star = normal_like("normal*", false, 0.0);
    star.log_density = [h](const VectorXd& th, double x) {
        const double s2 = th[1] * th[1] + h * h;
        const double d = x - th[0];
        return -kHalfLog2Pi - 0.5 * std::log(s2) - 0.5 * d * d / s2;
    };
    star.score = [h](const VectorXd& th, double x) {
        const double s2 = th[1] * th[1] + h * h;
        const double d = x - th[0];
        VectorXd u(2);
        u[0] = d / s2;
        u[1] = th[1] * (d * d - s2) / (s2 * s2);
        return u;
    };
    star.window_hint = [h](const VectorXd& th) {
        return std::pair<double, double>(th[0], std::hypot(th[1], h));
    };
    star.divergence_hook = [h](const VectorXd& t1, const VectorXd& t2, const TuningParams& tp) {
        return normal_member_divergence(t1[0], std::hypot(t1[1], h), t2[0],
                                        std::hypot(t2[1], h), tp);
    };
    star.power_integral_hook = [h](const VectorXd& th, double b) {
        return normal_power_integral_coeff(b) * std::pow(std::hypot(th[1], h), -b);
    };
    star.matrices_hook = nullptr;  // score is wrt theta, not the star scale
    star.smooth_hook = nullptr;
    return star;
}

ParametricModel normal_like(std::string name, bool fixed_sigma, double sigma0) {
    ParametricModel m;
    m.name = std::move(name);
    m.dim_p = fixed_sigma ? 1 : 2;
    m.param_names = fixed_sigma ? std::vector<std::string>{"mu"}
                                : std::vector<std::string>{"mu", "sigma"};
    m.support = ContinuousSupport{};

    auto scale_of = [fixed_sigma, sigma0](const VectorXd& th) {
        return fixed_sigma ? sigma0 : th[1];
    };

    m.log_density = [scale_of](const VectorXd& th, double x) {
        const double s = scale_of(th);
        const double z = (x - th[0]) / s;
        return -kHalfLog2Pi - std::log(s) - 0.5 * z * z;
    };
    if (fixed_sigma) {
        m.score = [sigma0](const VectorXd& th, double x) {
            VectorXd u(1);
            u[0] = (x - th[0]) / (sigma0 * sigma0);
            return u;
        };
        m.in_param_space = [](const VectorXd&) { return true; };
        m.to_internal = [](const VectorXd& th) { return th; };
        m.from_internal = [](const VectorXd& z) { return z; };
        m.internal_scale = [](const VectorXd&) { return VectorXd::Ones(1).eval(); };
    } else {
        m.score = [](const VectorXd& th, double x) {
            const double s = th[1];
            const double d = x - th[0];
            VectorXd u(2);
            u[0] = d / (s * s);
            u[1] = (d * d - s * s) / (s * s * s);
            return u;
        };
        m.in_param_space = [](const VectorXd& th) { return th[1] > 0.0; };
        m.to_internal = [](const VectorXd& th) {
            VectorXd z(2);
            z[0] = th[0];
            z[1] = std::log(th[1]);
            return z;
        };
        m.from_internal = [](const VectorXd& z) {
            VectorXd th(2);
            th[0] = z[0];
            th[1] = std::exp(z[1]);
            return th;
        };
        m.internal_scale = [](const VectorXd& z) {
            VectorXd s(2);
            s[0] = 1.0;
            s[1] = std::exp(z[1]);
            return s;
        };
    }
    m.window_hint = [scale_of](const VectorXd& th) {
        return std::pair<double, double>(th[0], scale_of(th));
    };
    m.default_starts = [fixed_sigma](const std::vector<double>& data) {
        const double mu = mean(data);
        const double med = quantile_type2(data, 0.5);
        double s = positive_or(sample_sd(data), 1e-3 * (1.0 + std::fabs(mu)));
        double si = positive_or(iqr(data) / 1.349, s);
        std::vector<VectorXd> starts;
        if (fixed_sigma) {
            for (double v : {mu, med, mu + 0.5 * s, mu - 0.5 * s, 0.5 * (mu + med)}) {
                VectorXd t(1);
                t[0] = v;
                starts.push_back(t);
            }
        } else {
            const double pairs[5][2] = {{mu, s},
                                        {med, si},
                                        {mu, s / 3.0},
                                        {med, s},
                                        {mu + 0.5 * s, 0.5 * s}};
            for (const auto& p : pairs) {
                VectorXd t(2);
                t[0] = p[0];
                t[1] = p[1];
                starts.push_back(t);
            }
        }
        return starts;
    };
    m.draw = [scale_of](const VectorXd& th, Rng& rng) {
        return rng.normal(th[0], scale_of(th));
    };
    if (fixed_sigma) {
        m.power_integral_hook = [sigma0](const VectorXd&, double b) {
            return normal_power_integral_coeff(b) * std::pow(sigma0, -b);
        };
        m.divergence_hook = [sigma0](const VectorXd& t1, const VectorXd& t2,
                                     const TuningParams& tp) {
            return normal_member_divergence(t1[0], sigma0, t2[0], sigma0, tp);
        };
        m.matrices_hook = [sigma0](const VectorXd&, double beta) {
            const ModelMatrices full = normal_matrices(sigma0, beta);
            ModelMatrices mm;
            mm.j = full.j.topLeftCorner(1, 1);
            mm.xi = VectorXd::Zero(1);
            mm.k = full.k.topLeftCorner(1, 1);
            return mm;
        };
        m.smooth_hook = [sigma0](double h) { return make_normal_star(sigma0, true, h); };
    } else {
        m.power_integral_hook = [](const VectorXd& th, double b) {
            return normal_power_integral_coeff(b) * std::pow(th[1], -b);
        };
        m.divergence_hook = [](const VectorXd& t1, const VectorXd& t2, const TuningParams& tp) {
            return normal_member_divergence(t1[0], t1[1], t2[0], t2[1], tp);
        };
        m.matrices_hook = [](const VectorXd& th, double beta) {
            return normal_matrices(th[1], beta);
        };
        m.smooth_hook = [](double h) { return make_normal_star(0.0, false, h); };
    }
    m.gaussian_transparent = true;
    return m;
}

}  // namespace

ParametricModel make_normal_model() { return normal_like("normal", false, 0.0); }

ParametricModel make_normal_fixed_sigma_model(double sigma0) {
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) {
        throw InvalidArgumentError("normal-fixed-sigma: sigma0 must be positive");
    }
    return normal_like("normal-fixed-sigma", true, sigma0);
}

ParametricModel make_poisson_model() {
    ParametricModel m;
    m.name = "poisson";
    m.dim_p = 1;
    m.param_names = {"lambda"};
    m.support = DiscreteSupport{};
    m.log_density = [](const VectorXd& th, double x) {
        const double k = std::round(x);
        if (k < 0.0 || std::fabs(x - k) > 1e-9) {
            return -std::numeric_limits<double>::infinity();
        }
        return k * std::log(th[0]) - th[0] - std::lgamma(k + 1.0);
    };
    m.score = [](const VectorXd& th, double x) {
        VectorXd u(1);
        u[0] = x / th[0] - 1.0;
        return u;
    };
    m.in_param_space = [](const VectorXd& th) { return th[0] > 0.0; };
    m.to_internal = [](const VectorXd& th) {
        VectorXd z(1);
        z[0] = std::log(th[0]);
        return z;
    };
    m.from_internal = [](const VectorXd& z) {
        VectorXd th(1);
        th[0] = std::exp(z[0]);
        return th;
    };
    m.internal_scale = [](const VectorXd& z) {
        VectorXd s(1);
        s[0] = std::exp(z[0]);
        return s;
    };
    m.default_starts = [](const std::vector<double>& data) {
        const double mu = positive_or(mean(data), 1e-3);
        const double med = positive_or(quantile_type2(data, 0.5), mu);
        std::vector<VectorXd> starts;
        for (double v : {mu, med, 1.5 * mu, mu / 1.5, mu + 1.0}) {
            VectorXd t(1);
            t[0] = v;
            starts.push_back(t);
        }
        return starts;
    };
    m.draw = [](const VectorXd& th, Rng& rng) {
        return static_cast<double>(rng.poisson(th[0]));
    };
    m.support_limit = [](const VectorXd& th) {
        const double rate = th[0];
        double p = std::exp(-rate);
        double cum = p;
        long long k = 0;
        while (1.0 - cum > 1e-12 && k < 1000000) {
            ++k;
            p *= rate / static_cast<double>(k);
            cum += p;
        }
        return k;
    };
    return m;
}

ConstraintSet make_affine_constraint(const MatrixXd& c, const VectorXd& target) {
    if (c.rows() == 0 || c.rows() > c.cols() || target.size() != c.rows()) {
        throw InvalidArgumentError("affine constraint: bad shape");
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(c);
    if (qr.rank() < c.rows()) {
        throw InvalidArgumentError("affine constraint: rows are not linearly independent");
    }
    ConstraintSet cs;
    cs.r = static_cast<int>(c.rows());
    cs.h = [c, target](const VectorXd& th) { return (c * th - target).eval(); };
    cs.jacobian = [ct = c.transpose().eval()](const VectorXd&) { return ct; };
    cs.affine = ConstraintSet::Affine{c, target};
    return cs;
}

ConstraintSet fix_components(int dim_p, const std::vector<std::pair<int, double>>& fixes) {
    if (fixes.empty()) throw InvalidArgumentError("fix_components: nothing to fix");
    MatrixXd c = MatrixXd::Zero(static_cast<int>(fixes.size()), dim_p);
    VectorXd target(static_cast<int>(fixes.size()));
    for (std::size_t k = 0; k < fixes.size(); ++k) {
        const auto& [idx, value] = fixes[k];
        if (idx < 0 || idx >= dim_p) throw InvalidArgumentError("fix_components: index out of range");
        c(static_cast<int>(k), idx) = 1.0;
        target[static_cast<int>(k)] = value;
    }
    return make_affine_constraint(c, target);
}

SmoothedModel smooth_model(const ParametricModel& model, double bandwidth, Kernel kernel) {
    if (model.is_discrete()) {
        throw UnsupportedError("smooth_model: smoothing is defined for continuous families only");
    }
    if (!(bandwidth > 0.0)) {
        throw InvalidArgumentError("smooth_model: bandwidth must be positive");
    }
    SmoothedModel sm;
    sm.base = model;
    sm.kernel = kernel;
    sm.bandwidth = bandwidth;
    sm.transparent = model.gaussian_transparent && kernel == Kernel::Gaussian;
    if (model.smooth_hook && kernel == Kernel::Gaussian) {
        sm.star = model.smooth_hook(bandwidth);
        return sm;
    }
    // Generic path: convolve numerically.  f*(x) = int phi(u) f(x - h u) du
    // over u in [-8, 8]; the theta-score of the star family is obtained by
    // central differences.
    ParametricModel star = model;
    star.name = model.name + "*";
    star.divergence_hook = nullptr;
    star.matrices_hook = nullptr;
    star.smooth_hook = nullptr;
    const double h = bandwidth;
    auto base_log_density = model.log_density;
    auto star_density = [base_log_density, h](const VectorXd& th, double x) {
        auto integrand = [&](double u) {
            const double phi = std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
            return phi * std::exp(base_log_density(th, x - h * u));
        };
        return integrate_gl(integrand, -8.0, 8.0, 8, 24);
    };
    star.log_density = [star_density](const VectorXd& th, double x) {
        return std::log(star_density(th, x));
    };
    star.score = [star_density, p = model.dim_p](const VectorXd& th, double x) {
        VectorXd u(p);
        for (int i = 0; i < p; ++i) {
            const double step = 1e-6 * (1.0 + std::fabs(th[i]));
            VectorXd tp = th, tm = th;
            tp[i] += step;
            tm[i] -= step;
            u[i] = (std::log(star_density(tp, x)) - std::log(star_density(tm, x))) /
                   (2.0 * step);
        }
        return u;
    };
    auto base_hint = model.window_hint;
    star.window_hint = [base_hint, h](const VectorXd& th) {
        auto [c, s] = base_hint(th);
        return std::pair<double, double>(c, std::hypot(s, h));
    };
    sm.star = std::move(star);
    return sm;
}

bool is_transparent(const SmoothedModel& sm) { return sm.transparent; }

}  // namespace sdt
