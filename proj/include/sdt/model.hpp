#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sdt/rng.hpp"
#include "sdt/tuning.hpp"

namespace sdt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Closed-form ingredients for the order-beta asymptotics of a family:
// j = integral of u u^T f^{1+beta}, xi = integral of u f^{1+beta},
// k = integral of u u^T f^{1+2beta} - xi_2b xi_2b^T  (see asymptotics.hpp).
struct ModelMatrices {
    MatrixXd j;
    VectorXd xi;
    MatrixXd k;
};

struct ContinuousSupport {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};
struct DiscreteSupport {};  // counting support {0, 1, 2, ...}

struct ParametricModel {
    std::string name;
    int dim_p = 0;
    std::vector<std::string> param_names;

    std::variant<ContinuousSupport, DiscreteSupport> support;

    std::function<double(const VectorXd&, double)> log_density;
    std::function<VectorXd(const VectorXd&, double)> score;
    std::function<bool(const VectorXd&)> in_param_space;

    // (center, scale) pair used to place quadrature windows (continuous only).
    std::function<std::pair<double, double>(const VectorXd&)> window_hint;

    // Coordinate-wise reparameterization used by the optimizer so that
    // positivity constraints vanish (e.g. sigma -> log sigma).
    std::function<VectorXd(const VectorXd&)> to_internal;
    std::function<VectorXd(const VectorXd&)> from_internal;
    // d theta_i / d z_i evaluated at internal point z (diagonal Jacobian).
    std::function<VectorXd(const VectorXd&)> internal_scale;

    // Deterministic starting points for multistart fitting, derived from data.
    std::function<std::vector<VectorXd>(const std::vector<double>&)> default_starts;

    std::function<double(const VectorXd&, Rng&)> draw;

    // Discrete families: largest support index that captures all but 1e-12 of
    // the mass at theta (summation cutoff).
    std::function<long long(const VectorXd&)> support_limit;

    // Optional closed forms; generic quadrature paths are used when absent.
    std::function<double(const VectorXd&, const VectorXd&, const TuningParams&)>
        divergence_hook;  // S(f_theta1, f_theta2)
    std::function<ModelMatrices(const VectorXd&, double)> matrices_hook;
    std::function<double(const VectorXd&, double)> power_integral_hook;  // int f^{1+b}
    std::function<ParametricModel(double)> smooth_hook;  // Gaussian-kernel smoothed family
    bool gaussian_transparent = false;

    double density(const VectorXd& theta, double x) const {
        return std::exp(log_density(theta, x));
    }
    bool is_discrete() const { return std::holds_alternative<DiscreteSupport>(support); }

    void check_theta(const VectorXd& theta) const;
};

ParametricModel make_normal_model();
// One-parameter location family N(mu, sigma0^2) with sigma0 known.
ParametricModel make_normal_fixed_sigma_model(double sigma0);
ParametricModel make_poisson_model();

// Equality constraints h(theta) = 0 with h: R^p -> R^r, full rank r <= p.
struct ConstraintSet {
    int r = 0;
    std::function<VectorXd(const VectorXd&)> h;
    std::function<MatrixXd(const VectorXd&)> jacobian;  // p x r, column k = grad h_k

    struct Affine {
        MatrixXd c;       // r x p
        VectorXd target;  // length r
    };
    std::optional<Affine> affine;
};

// h(theta) = C theta - target.  C must have full row rank.
ConstraintSet make_affine_constraint(const MatrixXd& c, const VectorXd& target);
// Convenience: fix theta[index] = value for each pair.
ConstraintSet fix_components(int dim_p, const std::vector<std::pair<int, double>>& fixes);

enum class Kernel { Gaussian };

// The model carrying the kernel-smoothed family f*_theta, still indexed by the
// original parameter.  `star` has the same dim_p/names as `base`.
struct SmoothedModel {
    ParametricModel base;
    Kernel kernel = Kernel::Gaussian;
    double bandwidth = 0.0;
    ParametricModel star;
    bool transparent = false;
};

SmoothedModel smooth_model(const ParametricModel& model, double bandwidth,
                           Kernel kernel = Kernel::Gaussian);
bool is_transparent(const SmoothedModel& sm);

}  // namespace sdt
