#include "sdt/closed_form.hpp"

#include <cmath>

#include "sdt/errors.hpp"

namespace sdt {

double normal_power_integral_coeff(double g) {
    return std::pow(2.0 * M_PI, -0.5 * g) / std::sqrt(1.0 + g);
}

namespace {

// Limit of S as B -> 0 (A -> 1+gamma):
//   S = int g^{1+gamma} log(g/f) + (int f^{1+gamma} - int g^{1+gamma}) / (1+gamma).
// For normal members the first integral has the closed form below; the
// symmetric A -> 0 limit swaps the roles of the two members.
double log_branch(double mu_num, double s_num, double mu_den, double s_den, double gamma) {
    const double kap = normal_power_integral_coeff(gamma);
    const double r2 = (s_num * s_num) / (s_den * s_den);
    const double dm = mu_num - mu_den;
    const double main_term = 0.5 * kap * std::pow(s_num, -gamma) *
                             (std::log(1.0 / r2) + (r2 - 1.0) / (1.0 + gamma) +
                              dm * dm / (s_den * s_den));
    const double tail_term = kap *
                             (std::pow(s_den, -gamma) - std::pow(s_num, -gamma)) /
                             (1.0 + gamma);
    return main_term + tail_term;
}

}  // namespace

double normal_member_divergence(double mu_g, double s_g, double mu_f, double s_f,
                                const TuningParams& tp) {
    if (!(s_g > 0.0) || !(s_f > 0.0)) {
        throw InvalidArgumentError("normal divergence: scales must be positive");
    }
    const double g = tp.gamma;
    const double a = tp.a;
    const double b = tp.b;
    const double kap = normal_power_integral_coeff(g);

    if (tp.b_is_zero()) {
        // g-member carries the log term.
        return log_branch(mu_g, s_g, mu_f, s_f, g);
    }
    if (tp.a_is_zero()) {
        return log_branch(mu_f, s_f, mu_g, s_g, g);
    }

    // Generic branch.  The cross integral int f^B g^A exists iff the combined
    // precision B/s_f^2 + A/s_g^2 is positive.
    const double denom = b * s_g * s_g + a * s_f * s_f;
    if (!(denom > 0.0)) {
        throw EvaluationError("normal divergence: cross integral diverges for these scales");
    }
    const double dm = mu_g - mu_f;
    const double cross = std::pow(1.0 + g, 1.5) * std::pow(s_f, 1.0 - b) *
                         std::pow(s_g, 1.0 - a) / std::sqrt(denom) *
                         std::exp(-a * b * dm * dm / (2.0 * denom));
    const double val = (kap / (a * b)) *
                       (a * std::pow(s_g, -g) + b * std::pow(s_f, -g) - cross);
    if (!std::isfinite(val)) {
        throw EvaluationError("normal divergence: non-finite value");
    }
    return val;
}

double normal_sdt_closed_form(double mu_hat, double sigma_hat, double mu0,
                              double sigma_tilde, double gamma, double lambda, long long n) {
    if (n < 1) throw InvalidArgumentError("normal statistic: n must be >= 1");
    const TuningParams tp(gamma, lambda);
    return 2.0 * static_cast<double>(n) *
           normal_member_divergence(mu_hat, sigma_hat, mu0, sigma_tilde, tp);
}

}  // namespace sdt
