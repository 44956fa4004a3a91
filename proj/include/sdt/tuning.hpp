#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "sdt/errors.hpp"

namespace sdt {

// Threshold below which the exponents A or B are treated as zero and the
// analytic limiting forms are used instead of the generic power expressions.
inline constexpr double kExponentLimitEps = 1e-8;

// A = 1 + lambda*(1-gamma), B = gamma - lambda*(1-gamma).  A + B = 1 + gamma.
inline std::pair<double, double> derive_ab(double gamma, double lambda) {
    const double a = 1.0 + lambda * (1.0 - gamma);
    const double b = gamma - lambda * (1.0 - gamma);
    return {a, b};
}

struct TuningParams {
    double gamma = 0.0;
    double lambda = 0.0;
    double a = 1.0;  // derived exponent A
    double b = 0.0;  // derived exponent B

    TuningParams() = default;
    TuningParams(double gamma_, double lambda_) : gamma(gamma_), lambda(lambda_) {
        if (!(gamma >= 0.0 && gamma <= 1.0)) {
            throw InvalidArgumentError("tuning: gamma must lie in [0,1], got " +
                                       std::to_string(gamma));
        }
        if (!std::isfinite(lambda)) {
            throw InvalidArgumentError("tuning: lambda must be finite");
        }
        const auto [a_, b_] = derive_ab(gamma, lambda);
        a = a_;
        b = b_;
    }

    bool a_is_zero() const { return std::fabs(a) <= kExponentLimitEps; }
    bool b_is_zero() const { return std::fabs(b) <= kExponentLimitEps; }
};

// K(delta) = ((1+delta)^A - 1)/A, with the log(1+delta) limit at A = 0.
// Defined for delta >= -1 (delta is a Pearson-type residual, never below -1).
inline double k_transform(double delta, double a) {
    if (!(delta >= -1.0)) {
        throw InvalidArgumentError("k_transform: delta must be >= -1, got " +
                                   std::to_string(delta));
    }
    if (std::fabs(a) <= kExponentLimitEps) {
        return std::log1p(delta);
    }
    // Write (1+delta)^A via exp/log1p for accuracy near delta = 0.
    if (delta == -1.0) {
        if (a > 0.0) return -1.0 / a;
        // (1+delta)^A diverges: surface the -inf sentinel, callers test finiteness
        return -std::numeric_limits<double>::infinity();
    }
    return std::expm1(a * std::log1p(delta)) / a;
}

}  // namespace sdt
