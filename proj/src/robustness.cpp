#include "sdt/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "sdt/errors.hpp"
#include "sdt/rng.hpp"

namespace sdt {
namespace {

// f^beta(y) u(y) - xi_beta, the kernel shared by both influence functions.
VectorXd centered_weighted_score(const ParametricModel& model, const VectorXd& theta,
                                 double beta, double y) {
    const VectorXd xi = xi_vector(model, theta, beta);
    const double ld = model.log_density(theta, y);
    if (!std::isfinite(ld)) {
        if (beta > 0.0) return -xi;  // f^beta vanishes off the support
        throw EvaluationError("influence function undefined at a zero-density point for beta = 0");
    }
    const double fb = beta == 0.0 ? 1.0 : std::exp(beta * ld);
    return fb * model.score(theta, y) - xi;
}

}  // namespace

VectorXd if_mdpde(const ParametricModel& model, const VectorXd& theta, double beta, double y) {
    model.check_theta(theta);
    const DpdMatrices mats = dpd_matrices(model, theta, beta);
    const VectorXd rhs = centered_weighted_score(model, theta, beta, y);
    return mats.j.ldlt().solve(rhs);
}

VectorXd if_restricted_mdpde(const ParametricModel& model, const VectorXd& theta, double beta,
                             const ConstraintSet& constraints, double y) {
    model.check_theta(theta);
    const DpdMatrices mats = dpd_matrices(model, theta, beta);
    const MatrixXd h = constraints.jacobian(theta);
    const MatrixXd proj = restricted_projection(mats.j, h);
    return proj * centered_weighted_score(model, theta, beta, y);
}

double if2_sdt(const ParametricModel& model, const VectorXd& theta0, double beta,
               double gamma, const ConstraintSet& constraints, double y) {
    const VectorXd diff =
        if_mdpde(model, theta0, beta, y) - if_restricted_mdpde(model, theta0, beta, constraints, y);
    const MatrixXd a = a_gamma_matrix(model, theta0, gamma);
    return diff.dot(a * diff);
}

double contaminated_power(const TestSpec& spec, const VectorXd& theta0,
                          const VectorXd& delta, double eps, double y) {
    const NullLawSpec law =
        null_law(spec.model, theta0, spec.beta, spec.gamma, spec.null_constraints);
    const ChiSquareMixture central = to_mixture(law);
    const double crit = mixture_quantile(central, spec.alpha_level);

    VectorXd shift = delta;
    if (eps != 0.0) {
        const VectorXd diff = if_mdpde(spec.model, theta0, spec.beta, y) -
                              if_restricted_mdpde(spec.model, theta0, spec.beta,
                                                  spec.null_constraints, y);
        shift += eps * diff;
    }
    if (shift.lpNorm<Eigen::Infinity>() == 0.0) return mixture_tail(central, crit);
    return mixture_tail(noncentral_shift(law, shift), crit);
}

namespace {

double eps_derivative(const TestSpec& spec, const VectorXd& theta0, const VectorXd& delta,
                      double y) {
    const double h = 1e-4;
    const double up = contaminated_power(spec, theta0, delta, h, y);
    const double down = contaminated_power(spec, theta0, delta, -h, y);
    return (up - down) / (2.0 * h);
}

}  // namespace

double level_influence(const TestSpec& spec, const VectorXd& theta0, double y) {
    return eps_derivative(spec, theta0, VectorXd::Zero(theta0.size()), y);
}

double power_influence(const TestSpec& spec, const VectorXd& theta0, const VectorXd& delta,
                       double y) {
    return eps_derivative(spec, theta0, delta, y);
}

SimulationSummary simulate_level_power(const TestSpec& spec, const VectorXd& theta_true,
                                       const ContaminationSpec& contamination, long long n,
                                       int replicates, std::uint64_t seed, int jobs) {
    if (n <= 0) throw InvalidArgumentError("simulate_level_power: n must be positive");
    if (replicates <= 0)
        throw InvalidArgumentError("simulate_level_power: replicates must be positive");
    if (contamination.epsilon < 0.0)
        throw InvalidArgumentError("simulate_level_power: contamination epsilon must be >= 0");
    spec.model.check_theta(theta_true);

    const double eps_n = contamination.epsilon / std::sqrt(static_cast<double>(n));
    if (eps_n > 1.0)
        throw InvalidArgumentError("simulate_level_power: epsilon/sqrt(n) exceeds 1");

    const auto run_one = [&](int rep, int& rejects, int& failures) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
        std::vector<double> values(static_cast<std::size_t>(n));
        for (auto& v : values) {
            if (eps_n > 0.0 && rng.uniform() < eps_n) {
                v = contamination.point;
            } else {
                v = spec.model.draw(theta_true, rng);
            }
        }
        const TestReport report = run_sdt(make_sample(values), spec);
        if (!report.unrestricted.converged || !report.restricted.converged) ++failures;
        if (report.reject) ++rejects;
    };

    int rejects = 0;
    int failures = 0;
    const int workers = std::max(1, std::min(jobs, replicates));
    if (workers == 1) {
        for (int rep = 0; rep < replicates; ++rep) run_one(rep, rejects, failures);
    } else {
        std::vector<int> chunk_rejects(static_cast<std::size_t>(workers), 0);
        std::vector<int> chunk_failures(static_cast<std::size_t>(workers), 0);
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (int rep = w; rep < replicates; rep += workers)
                        run_one(rep, chunk_rejects[static_cast<std::size_t>(w)],
                                chunk_failures[static_cast<std::size_t>(w)]);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& err : errors)
            if (err) std::rethrow_exception(err);
        for (int w = 0; w < workers; ++w) {
            rejects += chunk_rejects[static_cast<std::size_t>(w)];
            failures += chunk_failures[static_cast<std::size_t>(w)];
        }
    }

    SimulationSummary summary;
    summary.replicates = replicates;
    summary.rejects = rejects;
    summary.failures = failures;
    summary.n = n;
    summary.seed = seed;
    summary.rate = static_cast<double>(rejects) / static_cast<double>(replicates);
    summary.mc_se = std::sqrt(std::max(0.0, summary.rate * (1.0 - summary.rate) /
                                                static_cast<double>(replicates)));
    return summary;
}

}  // namespace sdt
