#pragma once

#include "sdt/tuning.hpp"

namespace sdt {

// (2*pi)^(-g/2) * (1+g)^(-1/2): the integral of a N(mu, s^2) density raised
// to the power 1+g equals kappa(g) * s^(-g).
double normal_power_integral_coeff(double g);

// S between two normal members, first argument in the data slot:
// S(N(mu_g, s_g^2), N(mu_f, s_f^2)) under tuning (gamma, lambda).  Exact
// limiting branches are used when either derived exponent vanishes.  Throws
// EvaluationError when the cross integral diverges (possible for lambda
// outside [0, gamma/(1-gamma)] when the scales are far apart).
double normal_member_divergence(double mu_g, double s_g, double mu_f, double s_f,
                                const TuningParams& tp);

// The test statistic 2n * S(N(mu_hat, sigma_hat^2), N(mu0, sigma_tilde^2)).
double normal_sdt_closed_form(double mu_hat, double sigma_hat, double mu0,
                              double sigma_tilde, double gamma, double lambda, long long n);

}  // namespace sdt
