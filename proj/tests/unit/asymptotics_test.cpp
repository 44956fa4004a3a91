#include <cmath>

#include "doctest.h"
#include "sdt/asymptotics.hpp"
#include "sdt/closed_form.hpp"
#include "sdt/errors.hpp"
#include "sdt/model.hpp"

namespace {

sdt::VectorXd theta2(double a, double b) {
    sdt::VectorXd t(2);
    t << a, b;
    return t;
}

}  // namespace

TEST_CASE("order-beta matrices: closed form against quadrature") {
    const sdt::ParametricModel normal = sdt::make_normal_model();
    sdt::ParametricModel generic = normal;
    generic.matrices_hook = nullptr;  // force the integration path
    const sdt::VectorXd t = theta2(0.7, 1.6);
    for (double beta : {0.0, 0.3, 0.5}) {
        const sdt::DpdMatrices a = sdt::dpd_matrices(normal, t, beta);
        const sdt::DpdMatrices b = sdt::dpd_matrices(generic, t, beta);
        CHECK((a.j - b.j).lpNorm<Eigen::Infinity>() < 1e-8);
        CHECK((a.xi - b.xi).lpNorm<Eigen::Infinity>() < 1e-8);
        CHECK((a.k - b.k).lpNorm<Eigen::Infinity>() < 1e-8);
        CHECK((a.v - a.k).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("order-beta matrices: reference values at unit scale") {
    const sdt::ParametricModel normal = sdt::make_normal_model();
    const sdt::DpdMatrices m = sdt::dpd_matrices(normal, theta2(0.0, 1.0), 0.3);
    CHECK(m.j(0, 0) == doctest::Approx(0.51210379).epsilon(1e-6));
    CHECK(m.j(1, 1) == doctest::Approx(0.82330533).epsilon(1e-6));
    CHECK(m.j(0, 1) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(m.xi[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.xi[1] == doctest::Approx(-0.15363114).epsilon(1e-6));
    CHECK(m.k(1, 1) == doctest::Approx(0.39630928).epsilon(1e-6));
}

TEST_CASE("beta = 0 matrices collapse to fisher information") {
    const sdt::ParametricModel normal = sdt::make_normal_model();
    const double sigma = 1.7;
    const sdt::DpdMatrices m = sdt::dpd_matrices(normal, theta2(-2.0, sigma), 0.0);
    CHECK(m.j(0, 0) == doctest::Approx(1.0 / (sigma * sigma)).epsilon(1e-9));
    CHECK(m.j(1, 1) == doctest::Approx(2.0 / (sigma * sigma)).epsilon(1e-9));
    CHECK(m.xi.lpNorm<Eigen::Infinity>() < 1e-10);
    CHECK((m.k - m.j).lpNorm<Eigen::Infinity>() < 1e-9);
}

TEST_CASE("restricted projection annihilates the constraint directions") {
    const sdt::ParametricModel normal = sdt::make_normal_model();
    const sdt::DpdMatrices m = sdt::dpd_matrices(normal, theta2(0.0, 1.3), 0.25);
    sdt::MatrixXd h(2, 1);
    h << 1.0, 0.0;
    const sdt::MatrixXd p = sdt::restricted_projection(m.j, h);
    CHECK((p - p.transpose()).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((p * h).lpNorm<Eigen::Infinity>() < 1e-12);
    // for a diagonal j the free block is just the inverse entry
    CHECK(p(1, 1) == doctest::Approx(1.0 / m.j(1, 1)).epsilon(1e-10));
    CHECK(p(0, 0) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(sdt::restricted_projection(m.j, sdt::MatrixXd::Zero(2, 1)),
                    sdt::InvalidArgumentError);
}

TEST_CASE("divergence curvature matrix") {
    const sdt::ParametricModel normal = sdt::make_normal_model();
    const sdt::VectorXd t = theta2(0.0, 1.0);
    // gamma = 0 curvature is the fisher information
    const sdt::MatrixXd a0 = sdt::a_gamma_matrix(normal, t, 0.0);
    CHECK(a0(0, 0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(a0(1, 1) == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(std::fabs(a0(0, 1)) < 1e-5);

    // the second tuning parameter does not move the curvature at equal arguments
    const sdt::MatrixXd base = sdt::a_gamma_matrix(normal, t, 0.4, 0.0);
    for (double lambda : {-0.5, 1.0}) {
        const sdt::MatrixXd other = sdt::a_gamma_matrix(normal, t, 0.4, lambda);
        CHECK((base - other).lpNorm<Eigen::Infinity>() < 1e-4);
    }
}

TEST_CASE("leading eigenvalue of the location test law") {
    const sdt::ParametricModel normal = sdt::make_normal_model();
    const double sigma = 1.3;
    const sdt::VectorXd t0 = theta2(0.0, sigma);
    const sdt::ConstraintSet cs = sdt::fix_components(2, {{0, 0.0}});
    for (double beta : {0.0, 0.3}) {
        for (double gamma : {0.0, 0.5, 1.0}) {
            const sdt::NullLawSpec law = sdt::null_law(normal, t0, beta, gamma, cs);
            REQUIRE(law.rank == 1);
            const double upsilon =
                std::pow(1.0 + beta, 3.0) * sigma * sigma / std::pow(1.0 + 2.0 * beta, 1.5);
            const double expected = sdt::normal_power_integral_coeff(gamma) * upsilon /
                                    std::pow(sigma, gamma + 2.0);
            CHECK(law.zetas[0] == doctest::Approx(expected).epsilon(1e-6));
        }
    }
}

TEST_CASE("null law to mixture and noncentral shifts") {
    const sdt::ParametricModel normal = sdt::make_normal_model();
    const sdt::VectorXd t0 = theta2(0.0, 1.0);
    const sdt::ConstraintSet cs = sdt::fix_components(2, {{0, 0.0}});
    const sdt::NullLawSpec law = sdt::null_law(normal, t0, 0.0, 0.0, cs);
    const sdt::ChiSquareMixture central = sdt::to_mixture(law);
    REQUIRE(central.weights.size() == 1);
    CHECK(central.weights[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(central.dofs[0] == doctest::Approx(1.0));
    CHECK(central.deltas[0] == 0.0);

    // a location shift lands in the law's range and produces delta = d^2 here
    sdt::VectorXd delta_star(2);
    delta_star << 0.8, 0.0;
    const sdt::ChiSquareMixture shifted = sdt::noncentral_shift(law, delta_star);
    CHECK(shifted.deltas[0] == doctest::Approx(0.64).epsilon(1e-6));

    // a scale-direction shift is outside the rank-one range
    sdt::VectorXd off(2);
    off << 0.0, 0.5;
    CHECK_THROWS_AS(sdt::noncentral_shift(law, off), sdt::InvalidArgumentError);
}

TEST_CASE("one-parameter family: the law is a plain chi-square at (0,0)") {
    const sdt::ParametricModel m = sdt::make_normal_fixed_sigma_model(2.0);
    sdt::VectorXd t0(1);
    t0 << 0.0;
    const sdt::ConstraintSet cs = sdt::fix_components(1, {{0, 0.0}});
    const sdt::NullLawSpec law = sdt::null_law(m, t0, 0.0, 0.0, cs);
    REQUIRE(law.rank == 1);
    CHECK(law.zetas[0] == doctest::Approx(1.0).epsilon(1e-6));
}
