#include <cmath>
#include <vector>

#include "doctest.h"
#include "sdt/errors.hpp"
#include "sdt/model.hpp"
#include "sdt/robustness.hpp"
#include "sdt/testing.hpp"

namespace {

sdt::VectorXd theta2(double a, double b) {
    sdt::VectorXd t(2);
    t << a, b;
    return t;
}

sdt::TestSpec location_spec(double beta, double gamma) {
    sdt::TestSpec spec;
    spec.model = sdt::make_normal_model();
    spec.null_constraints = sdt::fix_components(2, {{0, 0.0}});
    spec.beta = beta;
    spec.gamma = gamma;
    return spec;
}

}  // namespace

TEST_CASE("unrestricted influence function: closed forms") {
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::VectorXd t = theta2(0.0, 1.0);

    // beta = 0: the score premultiplied by the inverse information
    for (double y : {-3.0, 0.0, 1.0, 7.0}) {
        const sdt::VectorXd v = sdt::if_mdpde(m, t, 0.0, y);
        CHECK(v[0] == doctest::Approx(y).epsilon(1e-8));
        CHECK(v[1] == doctest::Approx((y * y - 1.0) / 2.0).epsilon(1e-8));
    }

    // beta = 1/2 location component: redescending curve
    for (double y : {-2.0, 0.0, 1.0, 3.0}) {
        const sdt::VectorXd v = sdt::if_mdpde(m, t, 0.5, y);
        const double expected = std::pow(1.5, 1.5) * y * std::exp(-0.25 * y * y);
        CHECK(v[0] == doctest::Approx(expected).epsilon(1e-8));
    }

    // the redescending curve is bounded: far tail is below the near peak
    const double near = std::fabs(sdt::if_mdpde(m, t, 0.5, std::sqrt(2.0))[0]);
    const double far = std::fabs(sdt::if_mdpde(m, t, 0.5, 50.0)[0]);
    CHECK(far < 1e-6);
    CHECK(near > 1.0);
}

TEST_CASE("restricted influence function is tangent to the null set") {
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::ConstraintSet cs = sdt::fix_components(2, {{0, 0.0}});
    const sdt::VectorXd t = theta2(0.0, 1.3);
    for (double beta : {0.0, 0.5}) {
        for (double y : {-3.0, 0.5, 4.0}) {
            const sdt::VectorXd u = sdt::if_mdpde(m, t, beta, y);
            const sdt::VectorXd r = sdt::if_restricted_mdpde(m, t, beta, cs, y);
            CHECK(std::fabs(r[0]) < 1e-12);  // no movement along the fixed direction
            // for this diagonal information the free component coincides
            CHECK(r[1] == doctest::Approx(u[1]).epsilon(1e-8));
        }
    }
}

TEST_CASE("second-order influence of the statistic") {
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::ConstraintSet cs = sdt::fix_components(2, {{0, 0.0}});
    const sdt::VectorXd t = theta2(0.0, 1.0);

    CHECK(std::fabs(sdt::if2_sdt(m, t, 0.5, 0.5, cs, 0.0)) < 1e-10);
    for (double y : {-4.0, -1.0, 2.0, 30.0}) CHECK(sdt::if2_sdt(m, t, 0.5, 0.5, cs, y) >= 0.0);

    // unbounded for the likelihood tuning, redescending for beta = 1/2
    const double lik_near = sdt::if2_sdt(m, t, 0.0, 0.0, cs, 10.0);
    const double lik_far = sdt::if2_sdt(m, t, 0.0, 0.0, cs, 50.0);
    CHECK(lik_far > lik_near);
    double rob_max = 0.0;
    for (double y = -50.0; y <= 50.0; y += 1.0)
        rob_max = std::max(rob_max, sdt::if2_sdt(m, t, 0.5, 0.5, cs, y));
    const double rob_edge = sdt::if2_sdt(m, t, 0.5, 0.5, cs, 50.0);
    CHECK(rob_edge < 1e-8);
    CHECK(rob_max > 1.0e-2);
}

TEST_CASE("contaminated rejection probability") {
    const sdt::TestSpec spec = location_spec(0.5, 0.5);
    const sdt::VectorXd t0 = theta2(0.0, 1.0);
    const sdt::VectorXd zero = sdt::VectorXd::Zero(2);

    // no shift, no contamination: exactly the nominal level
    CHECK(std::fabs(sdt::contaminated_power(spec, t0, zero, 0.0, 3.0) - 0.05) < 1e-6);

    // a genuine location shift raises the rejection probability
    sdt::VectorXd shift(2);
    shift << 2.0, 0.0;
    const double with_shift = sdt::contaminated_power(spec, t0, shift, 0.0, 0.0);
    CHECK(with_shift > 0.3);

    // robust tuning: contamination barely moves the level even at a far point
    const double drift_robust =
        std::fabs(sdt::contaminated_power(spec, t0, zero, 0.1, 50.0) - 0.05);
    CHECK(drift_robust < 0.01);
    // likelihood tuning: the same contamination wrecks the level
    const sdt::TestSpec lik = location_spec(0.0, 0.0);
    const double drift_lik =
        std::fabs(sdt::contaminated_power(lik, t0, zero, 0.1, 50.0) - 0.05);
    CHECK(drift_lik > 0.3);
    CHECK(drift_robust < drift_lik);
}

TEST_CASE("level influence vanishes, power influence does not") {
    const sdt::TestSpec spec = location_spec(0.5, 0.5);
    const sdt::VectorXd t0 = theta2(0.0, 1.0);
    for (double y : {0.0, 1.5, 5.0}) CHECK(std::fabs(sdt::level_influence(spec, t0, y)) < 1e-5);

    sdt::VectorXd delta(2);
    delta << 1.0, 0.0;
    const double pif = sdt::power_influence(spec, t0, delta, 1.5);
    CHECK(std::isfinite(pif));
    CHECK(std::fabs(pif) > 1e-6);  // genuinely first order under the alternative
}

TEST_CASE("monte carlo harness determinism") {
    sdt::TestSpec spec = location_spec(0.0, 0.0);
    spec.estimation.multistart = 1;
    const sdt::VectorXd t0 = theta2(0.0, 1.0);
    const sdt::ContaminationSpec none{};
    const sdt::SimulationSummary a = sdt::simulate_level_power(spec, t0, none, 40, 24, 777, 1);
    const sdt::SimulationSummary b = sdt::simulate_level_power(spec, t0, none, 40, 24, 777, 4);
    CHECK(a.rejects == b.rejects);
    CHECK(a.rate == b.rate);
    CHECK(a.failures == 0);
    CHECK(a.replicates == 24);
    CHECK(a.rate >= 0.0);
    CHECK(a.rate <= 1.0);
    CHECK(a.mc_se == doctest::Approx(std::sqrt(a.rate * (1.0 - a.rate) / 24.0)));

    CHECK_THROWS_AS(sdt::simulate_level_power(spec, t0, {2.0, 0.0}, 1, 5, 1, 1),
                    sdt::InvalidArgumentError);
    CHECK_THROWS_AS(sdt::simulate_level_power(spec, t0, none, 0, 5, 1, 1),
                    sdt::InvalidArgumentError);
}

TEST_CASE("contaminated draws shift the rejection rate under a far point") {
    sdt::TestSpec spec = location_spec(0.0, 0.0);
    spec.estimation.multistart = 1;
    const sdt::VectorXd t0 = theta2(0.0, 1.0);
    // heavy contamination at a distant point inflates the mle location
    const sdt::SimulationSummary clean =
        sdt::simulate_level_power(spec, t0, {0.0, 0.0}, 60, 40, 99, 2);
    const sdt::SimulationSummary dirty =
        sdt::simulate_level_power(spec, t0, {3.0, 12.0}, 60, 40, 99, 2);
    CHECK(dirty.rate >= clean.rate);
}
