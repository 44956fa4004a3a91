#include <cmath>
#include <vector>

#include "doctest.h"
#include "sdt/errors.hpp"
#include "sdt/model.hpp"
#include "sdt/rng.hpp"

namespace {

sdt::VectorXd theta2(double a, double b) {
    sdt::VectorXd t(2);
    t << a, b;
    return t;
}

sdt::VectorXd theta1(double a) {
    sdt::VectorXd t(1);
    t << a;
    return t;
}

void check_score_matches_gradient(const sdt::ParametricModel& m, const sdt::VectorXd& theta,
                                  double x) {
    const sdt::VectorXd s = m.score(theta, x);
    for (int i = 0; i < m.dim_p; ++i) {
        const double h = 1e-6 * (1.0 + std::fabs(theta[i]));
        sdt::VectorXd up = theta, dn = theta;
        up[i] += h;
        dn[i] -= h;
        const double num = (m.log_density(up, x) - m.log_density(dn, x)) / (2.0 * h);
        CHECK(s[i] == doctest::Approx(num).epsilon(1e-5));
    }
}

}  // namespace

TEST_CASE("normal model basics") {
    const sdt::ParametricModel m = sdt::make_normal_model();
    CHECK(m.dim_p == 2);
    CHECK(m.param_names[0] == "mu");
    CHECK(m.param_names[1] == "sigma");
    CHECK_FALSE(m.is_discrete());

    const sdt::VectorXd t = theta2(1.5, 2.0);
    const double ld = m.log_density(t, 2.5);
    CHECK(ld == doctest::Approx(-std::log(2.0 * std::sqrt(2.0 * M_PI)) - 0.125).epsilon(1e-12));
    check_score_matches_gradient(m, t, 2.5);
    check_score_matches_gradient(m, t, -0.7);

    CHECK(m.in_param_space(theta2(0.0, 1.0)));
    CHECK_FALSE(m.in_param_space(theta2(0.0, 0.0)));
    CHECK_FALSE(m.in_param_space(theta2(0.0, -1.0)));
    CHECK_THROWS_AS(m.check_theta(theta2(0.0, -1.0)), sdt::InvalidArgumentError);
    CHECK_THROWS_AS(m.check_theta(theta1(0.0)), sdt::InvalidArgumentError);

    auto [center, scale] = m.window_hint(t);
    CHECK(center == doctest::Approx(1.5));
    CHECK(scale == doctest::Approx(2.0));
}

TEST_CASE("internal coordinates round trip") {
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::VectorXd t = theta2(-3.0, 0.4);
    const sdt::VectorXd z = m.to_internal(t);
    const sdt::VectorXd back = m.from_internal(z);
    CHECK(back[0] == doctest::Approx(t[0]).epsilon(1e-14));
    CHECK(back[1] == doctest::Approx(t[1]).epsilon(1e-14));
    // diagonal Jacobian: d sigma / d log sigma = sigma
    const sdt::VectorXd scale = m.internal_scale(z);
    CHECK(scale[0] == doctest::Approx(1.0));
    CHECK(scale[1] == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("default starts are deterministic and in the parameter space") {
    const sdt::ParametricModel m = sdt::make_normal_model();
    const std::vector<double> data{-988, -135, -78, 3, 59, 83, 93, 110, 189, 197, 204, 229,
                                   289,  310};
    const auto s1 = m.default_starts(data);
    const auto s2 = m.default_starts(data);
    REQUIRE(s1.size() >= 1);
    REQUIRE(s1.size() == s2.size());
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(s1[i] == s2[i]);
        CHECK(m.in_param_space(s1[i]));
    }
}

TEST_CASE("seeded draws are reproducible with sane moments") {
    const sdt::ParametricModel m = sdt::make_normal_model();
    const sdt::VectorXd t = theta2(3.0, 2.0);
    sdt::Rng r1(42), r2(42);
    double sum = 0.0, sumsq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double a = m.draw(t, r1);
        const double b = m.draw(t, r2);
        CHECK(a == b);
        sum += a;
        sumsq += a * a;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(mean == doctest::Approx(3.0).epsilon(0.02));
    CHECK(std::sqrt(var) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("fixed-sigma model is one-dimensional") {
    const sdt::ParametricModel m = sdt::make_normal_fixed_sigma_model(132.0);
    CHECK(m.dim_p == 1);
    CHECK(m.param_names[0] == "mu");
    const sdt::VectorXd t = theta1(10.0);
    check_score_matches_gradient(m, t, 100.0);
    auto [center, scale] = m.window_hint(t);
    CHECK(center == doctest::Approx(10.0));
    CHECK(scale == doctest::Approx(132.0));
    CHECK_THROWS_AS(sdt::make_normal_fixed_sigma_model(0.0), sdt::InvalidArgumentError);
}

TEST_CASE("poisson model mass sums to one up to the tail cutoff") {
    const sdt::ParametricModel m = sdt::make_poisson_model();
    CHECK(m.is_discrete());
    const sdt::VectorXd t = theta1(4.2);
    const long long limit = m.support_limit(t);
    double total = 0.0;
    for (long long x = 0; x <= limit; ++x) total += std::exp(m.log_density(t, x));
    CHECK(total >= 1.0 - 1e-12);
    CHECK(total <= 1.0 + 1e-12);
    check_score_matches_gradient(m, t, 3.0);
    CHECK(m.log_density(t, -1.0) == -std::numeric_limits<double>::infinity());

    sdt::Rng rng(9);
    double sum = 0.0;
    for (int i = 0; i < 20000; ++i) sum += m.draw(t, rng);
    CHECK(sum / 20000.0 == doctest::Approx(4.2).epsilon(0.02));
}

TEST_CASE("affine constraints") {
    // mu + sigma = 3 as a 1x2 system
    sdt::MatrixXd c(1, 2);
    c << 1.0, 1.0;
    sdt::VectorXd target(1);
    target << 3.0;
    const sdt::ConstraintSet cs = sdt::make_affine_constraint(c, target);
    CHECK(cs.r == 1);
    const sdt::VectorXd on = theta2(1.0, 2.0);
    CHECK(cs.h(on).lpNorm<Eigen::Infinity>() == doctest::Approx(0.0).epsilon(1e-14));
    const sdt::VectorXd off = theta2(1.0, 2.5);
    CHECK(cs.h(off)[0] == doctest::Approx(0.5));
    const sdt::MatrixXd jac = cs.jacobian(on);
    REQUIRE(jac.rows() == 2);  // p x r layout
    REQUIRE(jac.cols() == 1);
    CHECK(jac(0, 0) == doctest::Approx(1.0));
    CHECK(jac(1, 0) == doctest::Approx(1.0));

    // duplicated rows are rank-deficient
    sdt::MatrixXd bad(2, 2);
    bad << 1.0, 1.0, 2.0, 2.0;
    sdt::VectorXd t2v(2);
    t2v << 0.0, 0.0;
    CHECK_THROWS_AS(sdt::make_affine_constraint(bad, t2v), sdt::InvalidArgumentError);
}

TEST_CASE("component fixing") {
    const sdt::ConstraintSet cs = sdt::fix_components(2, {{0, 115.0}});
    const sdt::VectorXd t = theta2(115.0, 50.0);
    CHECK(cs.h(t)[0] == doctest::Approx(0.0));
    CHECK(cs.jacobian(t)(0, 0) == doctest::Approx(1.0));
    CHECK(cs.jacobian(t)(1, 0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(sdt::fix_components(2, {{2, 0.0}}), sdt::InvalidArgumentError);
    CHECK_THROWS_AS(sdt::fix_components(2, {{0, 1.0}, {0, 2.0}}), sdt::InvalidArgumentError);
}

TEST_CASE("model smoothing") {
    const sdt::ParametricModel normal = sdt::make_normal_model();
    CHECK_THROWS_AS(sdt::smooth_model(normal, -0.5), sdt::InvalidArgumentError);
    CHECK_THROWS_AS(sdt::smooth_model(sdt::make_poisson_model(), 0.5), sdt::UnsupportedError);

    const double h = 0.8;
    const sdt::SmoothedModel sm = sdt::smooth_model(normal, h);
    CHECK(sdt::is_transparent(sm));

    // smoothed normal density is the normal with inflated scale
    const sdt::VectorXd t = theta2(0.3, 1.1);
    const double s_star = std::hypot(1.1, h);
    const double x = 1.7;
    const double expect =
        -0.5 * std::log(2.0 * M_PI) - std::log(s_star) - 0.5 * std::pow((x - 0.3) / s_star, 2);
    CHECK(sm.star.log_density(t, x) == doctest::Approx(expect).epsilon(1e-12));

    // the generic convolution path (no shortcut hook) lands on the same value
    sdt::ParametricModel plain = normal;
    plain.smooth_hook = nullptr;
    plain.gaussian_transparent = false;
    const sdt::SmoothedModel generic = sdt::smooth_model(plain, h);
    CHECK_FALSE(sdt::is_transparent(generic));
    CHECK(generic.star.log_density(t, x) == doctest::Approx(expect).epsilon(1e-6));
    const sdt::VectorXd gs = generic.star.score(t, x);
    const sdt::VectorXd hs = sm.star.score(t, x);
    CHECK(gs[0] == doctest::Approx(hs[0]).epsilon(1e-4));
    CHECK(gs[1] == doctest::Approx(hs[1]).epsilon(1e-4));
}
