#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sdt/asymptotics.hpp"
#include "sdt/closed_form.hpp"
#include "sdt/datasets.hpp"
#include "sdt/divergence.hpp"
#include "sdt/errors.hpp"
#include "sdt/mixture.hpp"
#include "sdt/model.hpp"
#include "sdt/testing.hpp"

namespace {

sdt::VectorXd theta2(double a, double b) {
    sdt::VectorXd t(2);
    t << a, b;
    return t;
}

sdt::TestSpec make_spec(const sdt::ParametricModel& model, const sdt::ConstraintSet& cs,
                        double beta, double gamma, double lambda = 0.0) {
    sdt::TestSpec spec;
    spec.model = model;
    spec.null_constraints = cs;
    spec.beta = beta;
    spec.gamma = gamma;
    spec.lambda = lambda;
    return spec;
}

double lrt_statistic(const std::vector<double>& x, double mu0) {
    const double m = sdt::mean(x);
    double s0 = 0.0, s1 = 0.0;
    for (double v : x) {
        s0 += (v - mu0) * (v - mu0);
        s1 += (v - m) * (v - m);
    }
    return static_cast<double>(x.size()) * std::log(s0 / s1);
}

}  // namespace

TEST_CASE("statistic basics") {
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::VectorXd t = theta2(1.0, 2.0);
    CHECK(sdt::sdt_statistic(m, t, t, sdt::TuningParams(0.5, 0.5), 50) == 0.0);

    const sdt::VectorXd t1 = theta2(0.7, 1.4);
    const sdt::VectorXd t2 = theta2(0.1, 1.1);
    const sdt::TuningParams tp(0.6, 0.3);
    const double via_members = sdt::sdt_statistic(m, t1, t2, tp, 37);
    const double via_quadrature =
        2.0 * 37.0 * sdt::s_divergence_between_members_quadrature(m, t1, t2, tp);
    CHECK(via_members == doctest::Approx(via_quadrature).epsilon(1e-8));
    CHECK(via_members >= 0.0);
}

TEST_CASE("closed form member statistic") {
    // coincident parameters vanish on every branch
    for (const auto& gl :
         {std::pair{0.5, 0.5}, std::pair{0.3, -1.0 / 0.7}, std::pair{0.3, 0.3 / 0.7},
          std::pair{0.0, 0.0}}) {
        CHECK(std::fabs(sdt::normal_sdt_closed_form(1.0, 2.0, 1.0, 2.0, gl.first, gl.second,
                                                    25)) < 1e-12);
    }

    // limit branch continuity: exponent exactly zero vs 1e-6 away
    const double gamma = 0.3;
    const double lam_a0 = -1.0 / (1.0 - gamma);
    const double lam_near = (1e-6 - 1.0) / (1.0 - gamma);
    const double at = sdt::normal_sdt_closed_form(0.5, 1.2, 0.0, 1.0, gamma, lam_a0, 10);
    const double near = sdt::normal_sdt_closed_form(0.5, 1.2, 0.0, 1.0, gamma, lam_near, 10);
    CHECK(at == doctest::Approx(near).epsilon(1e-4));

    const double lam_b0 = gamma / (1.0 - gamma);
    const double lam_bnear = (gamma - 1e-6) / (1.0 - gamma);
    const double atb = sdt::normal_sdt_closed_form(0.5, 1.2, 0.0, 1.0, gamma, lam_b0, 10);
    const double nearb = sdt::normal_sdt_closed_form(0.5, 1.2, 0.0, 1.0, gamma, lam_bnear, 10);
    CHECK(atb == doctest::Approx(nearb).epsilon(1e-4));
}

TEST_CASE("likelihood-ratio reduction on real data") {
    const sdt::Sample s = sdt::telephone_fault_data();
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::ConstraintSet cs = sdt::fix_components(2, {{0, 0.0}});
    const sdt::TestReport r = sdt::run_sdt(s, make_spec(m, cs, 0.0, 0.0, 0.0));
    CHECK(std::fabs(r.statistic - lrt_statistic(s.values, 0.0)) < 1e-8);
}

TEST_CASE("report is internally consistent") {
    const sdt::Sample s = sdt::telephone_fault_data();
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::ConstraintSet cs = sdt::fix_components(2, {{0, 115.0}});
    const sdt::TestReport r = sdt::run_sdt(s, make_spec(m, cs, 0.3, 0.3));
    CHECK(r.n == s.n());
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
    CHECK(r.reject == (r.statistic > r.critical_value));
    CHECK(r.reject == (r.p_value < r.alpha_level));
    // statistic really is 2 n S between the two fitted members
    const double direct = sdt::sdt_statistic(m, r.unrestricted.theta_hat,
                                             r.restricted.theta_hat,
                                             sdt::TuningParams(0.3, 0.0), s.n());
    CHECK(std::fabs(r.statistic - direct) < 1e-10);
    // p-value recomputable from the published law
    const double tail = sdt::mixture_tail(sdt::to_mixture(r.law), r.statistic);
    CHECK(std::fabs(r.p_value - tail) < 1e-10);
}

TEST_CASE("telephone data decisions, scale unknown") {
    const sdt::Sample s = sdt::telephone_fault_data();
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::ConstraintSet h0 = sdt::fix_components(2, {{0, 0.0}});
    const sdt::ConstraintSet h1 = sdt::fix_components(2, {{0, 115.0}});

    // robust tuning: far null rejected, near null retained
    const sdt::TestReport r_h0 = sdt::run_sdt(s, make_spec(m, h0, 0.5, 0.5));
    CHECK(std::fabs(r_h0.statistic - 0.3811) < 1e-3);
    CHECK(std::fabs(r_h0.critical_value - 0.1668) < 1e-3);
    CHECK(std::fabs(r_h0.p_value - 0.00305) < 2e-4);
    CHECK(r_h0.reject);

    const sdt::TestReport r_h1 = sdt::run_sdt(s, make_spec(m, h1, 0.5, 0.5));
    CHECK(std::fabs(r_h1.statistic - 0.0086) < 1e-3);
    CHECK(std::fabs(r_h1.p_value - 0.683) < 5e-3);
    CHECK_FALSE(r_h1.reject);

    // likelihood tuning: the outlier inflates sigma-hat and nothing rejects
    const sdt::TestReport c_h0 = sdt::run_sdt(s, make_spec(m, h0, 0.0, 0.0, 0.0));
    CHECK(std::fabs(c_h0.statistic - 0.2333) < 1e-3);
    CHECK_FALSE(c_h0.reject);
    const sdt::TestReport c_h1 = sdt::run_sdt(s, make_spec(m, h1, 0.0, 0.0, 0.0));
    CHECK(std::fabs(c_h1.statistic - 0.7825) < 1e-3);
    CHECK_FALSE(c_h1.reject);
}

TEST_CASE("telephone data decisions, scale pinned at the robust value") {
    const sdt::Sample s = sdt::telephone_fault_data();
    const sdt::ParametricModel m = sdt::make_normal_fixed_sigma_model(132.0);
    const sdt::ConstraintSet h0 = sdt::fix_components(1, {{0, 0.0}});
    const sdt::ConstraintSet h1 = sdt::fix_components(1, {{0, 115.0}});

    const sdt::TestReport c_h0 = sdt::run_sdt(s, make_spec(m, h0, 0.0, 0.0, 0.0));
    CHECK(std::fabs(c_h0.statistic - 1.3086) < 1e-3);
    CHECK_FALSE(c_h0.reject);
    const sdt::TestReport c_h1 = sdt::run_sdt(s, make_spec(m, h1, 0.0, 0.0, 0.0));
    CHECK(std::fabs(c_h1.statistic - 4.4767) < 1e-3);
    CHECK(std::fabs(c_h1.p_value - 0.0344) < 5e-4);
    CHECK(c_h1.reject);

    const sdt::TestReport r_h0 = sdt::run_sdt(s, make_spec(m, h0, 0.5, 0.5));
    CHECK(std::fabs(r_h0.unrestricted.theta_hat[0] - 132.9103) < 1e-2);
    CHECK(std::fabs(r_h0.statistic - 0.5862) < 1e-3);
    CHECK(std::fabs(r_h0.critical_value - 0.2058) < 1e-3);
    CHECK(r_h0.reject);
    const sdt::TestReport r_h1 = sdt::run_sdt(s, make_spec(m, h1, 0.5, 0.5));
    CHECK(std::fabs(r_h1.statistic - 0.0116) < 1e-3);
    CHECK_FALSE(r_h1.reject);
}

TEST_CASE("statistic invariances") {
    const sdt::Sample s = sdt::telephone_fault_data();
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::ConstraintSet cs = sdt::fix_components(2, {{0, 115.0}});
    const sdt::TestReport base = sdt::run_sdt(s, make_spec(m, cs, 0.4, 0.4));

    std::vector<double> shuffled = s.values;
    std::mt19937_64 eng(3);
    std::shuffle(shuffled.begin(), shuffled.end(), eng);
    const sdt::TestReport permuted =
        sdt::run_sdt(sdt::make_sample(shuffled), make_spec(m, cs, 0.4, 0.4));
    CHECK(std::fabs(base.statistic - permuted.statistic) < 1e-8);

    // shifting data and the null by the same constant changes nothing
    const double c = 37.5;
    std::vector<double> moved;
    for (double x : s.values) moved.push_back(x + c);
    const sdt::ConstraintSet cs_moved = sdt::fix_components(2, {{0, 115.0 + c}});
    const sdt::TestReport shifted =
        sdt::run_sdt(sdt::make_sample(moved), make_spec(m, cs_moved, 0.4, 0.4));
    CHECK(std::fabs(base.statistic - shifted.statistic) < 1e-6);
    CHECK(std::fabs(base.p_value - shifted.p_value) < 1e-6);
}

TEST_CASE("null-law plug-in stability diagnostic") {
    const sdt::Sample s = sdt::telephone_fault_data();
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::ConstraintSet cs = sdt::fix_components(2, {{0, 115.0}});
    for (double beta : {0.2, 0.5}) {
        const sdt::TestReport r = sdt::run_sdt(s, make_spec(m, cs, beta, beta));
        const sdt::NullLawSpec at_hat =
            sdt::null_law(m, r.unrestricted.theta_hat, beta, beta, cs);
        const double p_alt = sdt::mixture_tail(sdt::to_mixture(at_hat), r.statistic);
        CHECK(std::fabs(p_alt - r.p_value) < 0.02);
    }
}

TEST_CASE("spec validation") {
    const sdt::Sample s = sdt::telephone_fault_data();
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::ConstraintSet cs = sdt::fix_components(2, {{0, 0.0}});
    sdt::TestSpec bad_alpha = make_spec(m, cs, 0.0, 0.0);
    bad_alpha.alpha_level = 1.0;
    CHECK_THROWS_AS(sdt::run_sdt(s, bad_alpha), sdt::InvalidArgumentError);
    sdt::TestSpec bad_gamma = make_spec(m, cs, 0.0, 1.5);
    CHECK_THROWS_AS(sdt::run_sdt(s, bad_gamma), sdt::InvalidArgumentError);
}

TEST_CASE("population restricted minimizer") {
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::ConstraintSet cs = sdt::fix_components(2, {{0, 0.0}});
    const sdt::VectorXd star = theta2(0.5, 1.0);
    const sdt::VectorXd t0 = sdt::population_restricted_dpd(m, cs, 0.0, star);
    CHECK(t0[0] == doctest::Approx(0.0).epsilon(1e-9));
    // at beta = 0 the projection inflates the scale by the mean offset
    CHECK(t0[1] == doctest::Approx(std::sqrt(1.25)).epsilon(1e-6));

    sdt::ConstraintSet opaque;
    opaque.r = 1;
    opaque.h = [](const sdt::VectorXd& th) {
        sdt::VectorXd v(1);
        v << th[0];
        return v;
    };
    opaque.jacobian = [](const sdt::VectorXd&) {
        sdt::MatrixXd j(2, 1);
        j << 1.0, 0.0;
        return j;
    };
    CHECK_THROWS_AS(sdt::population_restricted_dpd(m, opaque, 0.0, star),
                    sdt::UnsupportedError);
}

TEST_CASE("power approximation") {
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::ConstraintSet cs = sdt::fix_components(2, {{0, 0.0}});
    const sdt::TestSpec spec = make_spec(m, cs, 0.0, 0.0);

    const double p200 = sdt::power_approximation(spec, theta2(0.5, 1.0), 200);
    CHECK(std::fabs(p200 - 0.99966) < 1e-3);

    // monotone in n, and consistent as n grows
    double prev = 0.0;
    for (long long n : {20, 50, 100, 400, 2000}) {
        const double p = sdt::power_approximation(spec, theta2(0.25, 1.0), n);
        CHECK(p >= prev - 1e-12);
        prev = p;
    }
    CHECK(prev > 0.999);

    // alternatives on the null manifold are rejected outright
    CHECK_THROWS_AS(sdt::power_approximation(spec, theta2(0.0, 1.0), 100),
                    sdt::InvalidArgumentError);
}
