// Command-line front end: fitting, testing, p-value curves, influence
// diagnostics, power approximations, and seeded Monte Carlo runs.
//
// Conventions worth knowing before reading on:
//   * `fit` defaults to the weighted-score estimating equation
//     (1/n) sum f_theta^beta(X_i) u_theta(X_i) = 0, which is how the classic
//     telephone-fault tables were produced.  Pass --estimator exact for the
//     genuine divergence minimizer; `test` and every downstream command always
//     use the exact minimizer.
//   * CSV outputs start with a "# sdt ..." metadata line (version, config
//     hash, seed, convention flags); JSON outputs carry the same fields in a
//     "meta" object.
//   * A --config JSON file supplies defaults for any long flag (keys are the
//     flag names without the leading dashes); explicit flags win.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sdt/asymptotics.hpp"
#include "sdt/datasets.hpp"
#include "sdt/errors.hpp"
#include "sdt/estimation.hpp"
#include "sdt/io.hpp"
#include "sdt/model.hpp"
#include "sdt/rng.hpp"
#include "sdt/robustness.hpp"
#include "sdt/sample.hpp"
#include "sdt/testing.hpp"

namespace {

using nlohmann::json;

struct CliOptions {
    std::string data = "builtin:telephone-fault";
    std::string drop;
    std::string model = "normal";
    std::string null_expr;
    std::string beta_list;
    std::string gamma_list;
    std::string lambda_list;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out;
    std::string config_path;
    std::string estimator = "weighted";
    double y_min = -50.0;
    double y_max = 50.0;
    int y_points = 101;
    std::string delta_list;
    std::string theta_star;
    std::string theta_true;
    std::string n_grid = "50,100,200,500";
    long long n = 100;
    int replicates = 500;
    double eps = 0.0;
    double contam_point = 0.0;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_one_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size() || !std::isfinite(v))
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw sdt::InvalidArgumentError("cannot parse " + what + ": \"" + text + "\"");
    }
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& piece : split(text, ',')) {
        const std::string t = trim(piece);
        if (t.empty()) continue;
        out.push_back(parse_one_double(t, what));
    }
    if (out.empty()) throw sdt::InvalidArgumentError(what + ": empty list");
    return out;
}

std::vector<long long> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<long long> out;
    for (const double v : parse_double_list(text, what)) {
        const long long k = static_cast<long long>(std::llround(v));
        if (static_cast<double>(k) != v)
            throw sdt::InvalidArgumentError(what + ": expected integers, got " +
                                            sdt::format_double(v));
        out.push_back(k);
    }
    return out;
}

sdt::ParametricModel make_model(const std::string& name) {
    if (name == "normal") return sdt::make_normal_model();
    if (name == "poisson") return sdt::make_poisson_model();
    const std::string prefix = "normal-fixed-sigma:";
    if (name.rfind(prefix, 0) == 0) {
        const double sigma = parse_one_double(name.substr(prefix.size()), "fixed sigma");
        return sdt::make_normal_fixed_sigma_model(sigma);
    }
    throw sdt::InvalidArgumentError(
        "unknown model \"" + name +
        "\" (expected normal, poisson, or normal-fixed-sigma:<value>)");
}

sdt::ConstraintSet parse_null(const sdt::ParametricModel& model, const std::string& expr) {
    if (expr.empty())
        throw sdt::InvalidArgumentError("--null is required (e.g. --null \"mu=0\")");
    std::vector<std::pair<int, double>> fixes;
    for (const auto& piece : split(expr, ',')) {
        const std::string term = trim(piece);
        if (term.empty()) continue;
        const auto eq = term.find('=');
        if (eq == std::string::npos)
            throw sdt::InvalidArgumentError("constraint term \"" + term +
                                            "\" is not of the form name=value");
        const std::string name = trim(term.substr(0, eq));
        const double value = parse_one_double(trim(term.substr(eq + 1)), "constraint value");
        int idx = -1;
        for (int i = 0; i < model.dim_p; ++i)
            if (model.param_names[static_cast<std::size_t>(i)] == name) idx = i;
        if (idx < 0)
            throw sdt::InvalidArgumentError("constraint names unknown parameter \"" + name +
                                            "\" for model " + model.name);
        for (const auto& f : fixes)
            if (f.first == idx)
                throw sdt::InvalidArgumentError("parameter \"" + name + "\" fixed twice");
        fixes.emplace_back(idx, value);
    }
    if (fixes.empty()) throw sdt::InvalidArgumentError("empty constraint expression");
    return sdt::fix_components(model.dim_p, fixes);
}

sdt::Sample load_sample(const std::string& ref, const std::string& drop) {
    const std::string prefix = "builtin:";
    sdt::Sample s = ref.rfind(prefix, 0) == 0 ? sdt::builtin_dataset(ref.substr(prefix.size()))
                                              : sdt::ingest_csv(ref);
    if (drop.empty()) return s;
    std::vector<long long> idx = parse_int_list(drop, "--drop");
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    for (const long long i : idx)
        if (i < 1 || i > static_cast<long long>(s.n()))
            throw sdt::InvalidArgumentError("--drop index " + std::to_string(i) +
                                            " out of range 1.." + std::to_string(s.n()));
    std::vector<double> kept;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const long long row = static_cast<long long>(i) + 1;
        if (!std::binary_search(idx.begin(), idx.end(), row)) kept.push_back(s.values[i]);
    }
    if (kept.empty()) throw sdt::InvalidArgumentError("--drop removed every observation");
    return sdt::make_sample(kept);
}

sdt::VectorXd parse_theta(const sdt::ParametricModel& model, const std::string& text,
                          const std::string& what) {
    const std::vector<double> v = parse_double_list(text, what);
    if (static_cast<int>(v.size()) != model.dim_p)
        throw sdt::InvalidArgumentError(what + ": expected " + std::to_string(model.dim_p) +
                                        " components for model " + model.name);
    sdt::VectorXd theta(model.dim_p);
    for (int i = 0; i < model.dim_p; ++i) theta[i] = v[static_cast<std::size_t>(i)];
    model.check_theta(theta);
    return theta;
}

// Runs body(i) for i in [0, count) on up to `jobs` threads; outputs are stored
// by index so results never depend on scheduling.  Returns one error string
// per index ("" when the point succeeded).
template <typename Body>
std::vector<std::string> run_points(std::size_t count, int jobs, Body&& body) {
    std::vector<std::string> errors(count);
    const int workers =
        std::max(1, std::min<int>(jobs, static_cast<int>(std::min<std::size_t>(
                                            count, std::numeric_limits<int>::max()))));
    auto run_one = [&](std::size_t i) {
        try {
            body(i);
        } catch (const std::exception& e) {
            errors[i] = e.what()[0] ? e.what() : "unknown error";
        } catch (...) {
            errors[i] = "unknown error";
        }
    };
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) run_one(i);
        return errors;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = static_cast<std::size_t>(w); i < count;
                 i += static_cast<std::size_t>(workers))
                run_one(i);
        });
    for (auto& t : pool) t.join();
    return errors;
}

void emit(const CliOptions& o, const std::string& text) {
    if (o.out.empty())
        std::cout << text;
    else
        sdt::write_text_file(o.out, text);
}

std::string fmt(double v) { return sdt::format_double(v); }

json fit_to_json(const sdt::FitResult& fit) {
    json j;
    j["theta"] = std::vector<double>(fit.theta_hat.data(),
                                     fit.theta_hat.data() + fit.theta_hat.size());
    j["objective"] = fit.objective;
    j["grad_norm"] = fit.grad_norm;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    if (fit.lagrange.size() > 0)
        j["lagrange"] =
            std::vector<double>(fit.lagrange.data(), fit.lagrange.data() + fit.lagrange.size());
    return j;
}

// ---------------------------------------------------------------------------

int cmd_fit(const CliOptions& o) {
    const sdt::ParametricModel model = make_model(o.model);
    const sdt::Sample sample = load_sample(o.data, o.drop);
    const std::vector<double> betas =
        o.beta_list.empty() ? std::vector<double>{0.0, 0.05, 0.1, 0.2, 0.5}
                            : parse_double_list(o.beta_list, "--beta");
    sdt::EstimationConfig cfg;
    if (o.estimator == "weighted")
        cfg.solver = sdt::DpdSolver::WeightedScore;
    else if (o.estimator == "exact")
        cfg.solver = sdt::DpdSolver::ExactMinimizer;
    else
        throw sdt::InvalidArgumentError("--estimator must be weighted or exact");

    json cfg_json = {{"command", "fit"},     {"data", o.data},   {"drop", o.drop},
                     {"model", o.model},     {"beta", betas},    {"estimator", o.estimator},
                     {"seed", o.seed}};
    std::vector<sdt::FitResult> fits(betas.size());
    const auto errors = run_points(betas.size(), o.jobs, [&](std::size_t i) {
        fits[i] = sdt::mdpde_fit(sample, model, betas[i], cfg);
    });

    sdt::CsvTable table;
    table.columns = {"beta"};
    for (const auto& name : model.param_names) table.columns.push_back(name + "_hat");
    table.columns.push_back("converged");
    table.columns.push_back("objective");
    bool any_fail = false;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        std::vector<std::string> row{fmt(betas[i])};
        const bool errored = !errors[i].empty();
        if (errored) {
            for (int k = 0; k < model.dim_p; ++k) row.push_back("nan");
            row.push_back("false");
            row.push_back("nan");
            std::cerr << "fit beta=" << fmt(betas[i]) << " failed: " << errors[i] << "\n";
        } else {
            for (int k = 0; k < model.dim_p; ++k) row.push_back(fmt(fits[i].theta_hat[k]));
            row.push_back(fits[i].converged ? "true" : "false");
            row.push_back(fmt(fits[i].objective));
        }
        if (errored || !fits[i].converged) any_fail = true;
        table.rows.push_back(std::move(row));
    }
    emit(o, sdt::render_csv(sdt::metadata_header(cfg_json.dump(), o.seed), table));
    return any_fail ? 1 : 0;
}

struct GridPoint {
    double beta;
    double gamma;
    double lambda;
};

// (beta, gamma, lambda) combinations: explicit lists are crossed; an omitted
// --beta ties beta = gamma (the usual reading of the published curves).
std::vector<GridPoint> tuning_grid(const CliOptions& o, const std::vector<double>& def_gamma,
                                   const std::vector<double>& def_lambda) {
    const std::vector<double> gammas = o.gamma_list.empty()
                                           ? def_gamma
                                           : parse_double_list(o.gamma_list, "--gamma");
    const std::vector<double> lambdas = o.lambda_list.empty()
                                            ? def_lambda
                                            : parse_double_list(o.lambda_list, "--lambda");
    std::vector<GridPoint> grid;
    if (o.beta_list.empty()) {
        for (const double g : gammas)
            for (const double l : lambdas) grid.push_back({g, g, l});
    } else {
        for (const double g : gammas)
            for (const double l : lambdas)
                for (const double b : parse_double_list(o.beta_list, "--beta"))
                    grid.push_back({b, g, l});
    }
    return grid;
}

int cmd_test(const CliOptions& o) {
    const sdt::ParametricModel model = make_model(o.model);
    const sdt::Sample sample = load_sample(o.data, o.drop);
    const sdt::ConstraintSet constraints = parse_null(model, o.null_expr);
    const std::vector<GridPoint> grid = tuning_grid(o, {0.0}, {0.0});

    json cfg_json = {{"command", "test"}, {"data", o.data},          {"drop", o.drop},
                     {"model", o.model},  {"null", o.null_expr},     {"alpha", o.alpha},
                     {"beta", o.beta_list}, {"gamma", o.gamma_list}, {"lambda", o.lambda_list},
                     {"seed", o.seed}};

    std::vector<sdt::TestReport> reports(grid.size());
    const auto errors = run_points(grid.size(), o.jobs, [&](std::size_t i) {
        sdt::TestSpec spec;
        spec.model = model;
        spec.null_constraints = constraints;
        spec.beta = grid[i].beta;
        spec.gamma = grid[i].gamma;
        spec.lambda = grid[i].lambda;
        spec.alpha_level = o.alpha;
        reports[i] = sdt::run_sdt(sample, spec);
    });

    json results = json::array();
    bool any_fail = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        json point = {{"beta", grid[i].beta},
                      {"gamma", grid[i].gamma},
                      {"lambda", grid[i].lambda},
                      {"alpha", o.alpha},
                      {"n", static_cast<long long>(sample.n())}};
        if (!errors[i].empty()) {
            point["error"] = errors[i];
            any_fail = true;
        } else {
            const sdt::TestReport& r = reports[i];
            point["statistic"] = r.statistic;
            point["critical_value"] = r.critical_value;
            point["p_value"] = r.p_value;
            point["reject"] = r.reject;
            point["zetas"] =
                std::vector<double>(r.law.zetas.data(), r.law.zetas.data() + r.law.zetas.size());
            point["unrestricted"] = fit_to_json(r.unrestricted);
            point["restricted"] = fit_to_json(r.restricted);
            if (!r.unrestricted.converged || !r.restricted.converged) any_fail = true;
        }
        results.push_back(std::move(point));
    }
    json doc;
    doc["meta"] = {{"tool", "sdt"},
                   {"version", sdt::kToolVersion},
                   {"config_hash", sdt::fnv1a_hash(cfg_json.dump())},
                   {"seed", o.seed},
                   {"conventions", sdt::convention_flags()}};
    doc["results"] = std::move(results);
    emit(o, doc.dump(2) + "\n");
    return any_fail ? 1 : 0;
}

int cmd_pvalue_curve(const CliOptions& o) {
    const sdt::ParametricModel model = make_model(o.model);
    const sdt::Sample sample = load_sample(o.data, o.drop);
    const sdt::ConstraintSet constraints = parse_null(model, o.null_expr);
    std::vector<double> def_gamma;
    for (int i = 0; i <= 10; ++i) def_gamma.push_back(0.1 * i);
    const std::vector<GridPoint> grid = tuning_grid(o, def_gamma, {-0.5, 0.0, 0.5, 1.0});

    json cfg_json = {{"command", "pvalue-curve"}, {"data", o.data},      {"drop", o.drop},
                     {"model", o.model},          {"null", o.null_expr}, {"alpha", o.alpha},
                     {"beta", o.beta_list},       {"gamma", o.gamma_list},
                     {"lambda", o.lambda_list},   {"seed", o.seed}};

    std::vector<double> pvalues(grid.size(), std::numeric_limits<double>::quiet_NaN());
    const auto errors = run_points(grid.size(), o.jobs, [&](std::size_t i) {
        sdt::TestSpec spec;
        spec.model = model;
        spec.null_constraints = constraints;
        spec.beta = grid[i].beta;
        spec.gamma = grid[i].gamma;
        spec.lambda = grid[i].lambda;
        spec.alpha_level = o.alpha;
        const sdt::TestReport r = sdt::run_sdt(sample, spec);
        if (!r.unrestricted.converged || !r.restricted.converged)
            throw sdt::ConvergenceError("fit did not converge");
        pvalues[i] = r.p_value;
    });

    sdt::CsvTable table;
    table.columns = {"gamma", "lambda", "beta", "p_value"};
    bool any_fail = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!errors[i].empty()) {
            any_fail = true;
            std::cerr << "pvalue-curve point gamma=" << fmt(grid[i].gamma)
                      << " lambda=" << fmt(grid[i].lambda) << " beta=" << fmt(grid[i].beta)
                      << " failed: " << errors[i] << "\n";
        }
        table.rows.push_back({fmt(grid[i].gamma), fmt(grid[i].lambda), fmt(grid[i].beta),
                              fmt(pvalues[i])});
    }
    emit(o, sdt::render_csv(sdt::metadata_header(cfg_json.dump(), o.seed), table));
    return any_fail ? 1 : 0;
}

int cmd_ifcurve(const CliOptions& o) {
    const sdt::ParametricModel model = make_model(o.model);
    const sdt::Sample sample = load_sample(o.data, o.drop);
    const sdt::ConstraintSet constraints = parse_null(model, o.null_expr);
    const std::vector<double> betas = o.beta_list.empty()
                                          ? std::vector<double>{0.0, 0.5}
                                          : parse_double_list(o.beta_list, "--beta");
    if (o.y_points < 2) throw sdt::InvalidArgumentError("--y-points must be at least 2");
    if (!(o.y_max > o.y_min)) throw sdt::InvalidArgumentError("--y-max must exceed --y-min");

    sdt::VectorXd delta = sdt::VectorXd::Zero(model.dim_p);
    if (o.delta_list.empty())
        delta[0] = 1.0;
    else
        delta = parse_theta(model, o.delta_list, "--delta");

    json cfg_json = {{"command", "ifcurve"}, {"data", o.data},      {"drop", o.drop},
                     {"model", o.model},     {"null", o.null_expr}, {"beta", o.beta_list},
                     {"gamma", o.gamma_list}, {"alpha", o.alpha},   {"y_min", o.y_min},
                     {"y_max", o.y_max},     {"y_points", o.y_points}, {"seed", o.seed}};

    struct Row {
        double beta, gamma, y, if2, lif, pif;
    };
    std::vector<Row> rows;
    bool any_fail = false;
    std::vector<std::string> failures;
    for (const double beta : betas) {
        const double gamma =
            o.gamma_list.empty() ? beta : parse_double_list(o.gamma_list, "--gamma").front();
        sdt::TestSpec spec;
        spec.model = model;
        spec.null_constraints = constraints;
        spec.beta = beta;
        spec.gamma = gamma;
        spec.alpha_level = o.alpha;
        const sdt::FitResult restricted =
            sdt::restricted_mdpde_fit(sample, model, beta, constraints);
        const sdt::VectorXd theta0 = restricted.theta_hat;

        std::vector<Row> block(static_cast<std::size_t>(o.y_points));
        const double step = (o.y_max - o.y_min) / (o.y_points - 1);
        const auto errors = run_points(block.size(), o.jobs, [&](std::size_t i) {
            const double y = o.y_min + step * static_cast<double>(i);
            Row r{beta, gamma, y, 0.0, 0.0, 0.0};
            r.if2 = sdt::if2_sdt(model, theta0, beta, gamma, constraints, y);
            r.lif = sdt::level_influence(spec, theta0, y);
            r.pif = sdt::power_influence(spec, theta0, delta, y);
            block[i] = r;
        });
        for (std::size_t i = 0; i < block.size(); ++i) {
            if (!errors[i].empty()) {
                any_fail = true;
                failures.push_back(errors[i]);
                block[i].beta = beta;
                block[i].gamma = gamma;
                block[i].y = o.y_min + step * static_cast<double>(i);
                block[i].if2 = block[i].lif = block[i].pif =
                    std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back(block[i]);
        }
    }
    for (const auto& f : failures) std::cerr << "ifcurve point failed: " << f << "\n";

    sdt::CsvTable table;
    table.columns = {"beta", "gamma", "y", "if2", "lif", "pif"};
    for (const Row& r : rows)
        table.rows.push_back(
            {fmt(r.beta), fmt(r.gamma), fmt(r.y), fmt(r.if2), fmt(r.lif), fmt(r.pif)});
    emit(o, sdt::render_csv(sdt::metadata_header(cfg_json.dump(), o.seed), table));
    return any_fail ? 1 : 0;
}

int cmd_power(const CliOptions& o) {
    const sdt::ParametricModel model = make_model(o.model);
    const sdt::ConstraintSet constraints = parse_null(model, o.null_expr);
    if (o.theta_star.empty())
        throw sdt::InvalidArgumentError("--theta-star is required for the power command");
    const sdt::VectorXd theta_star = parse_theta(model, o.theta_star, "--theta-star");
    const std::vector<long long> ns = parse_int_list(o.n_grid, "--n-grid");
    const std::vector<GridPoint> grid = tuning_grid(o, {0.0}, {0.0});

    json cfg_json = {{"command", "power"},   {"model", o.model},    {"null", o.null_expr},
                     {"theta_star", o.theta_star}, {"n_grid", o.n_grid}, {"alpha", o.alpha},
                     {"beta", o.beta_list},  {"gamma", o.gamma_list}, {"lambda", o.lambda_list},
                     {"seed", o.seed}};

    struct Cell {
        GridPoint tp;
        long long n;
    };
    std::vector<Cell> cells;
    for (const auto& g : grid)
        for (const long long n : ns) cells.push_back({g, n});

    std::vector<double> powers(cells.size(), std::numeric_limits<double>::quiet_NaN());
    const auto errors = run_points(cells.size(), o.jobs, [&](std::size_t i) {
        sdt::TestSpec spec;
        spec.model = model;
        spec.null_constraints = constraints;
        spec.beta = cells[i].tp.beta;
        spec.gamma = cells[i].tp.gamma;
        spec.lambda = cells[i].tp.lambda;
        spec.alpha_level = o.alpha;
        powers[i] = sdt::power_approximation(spec, theta_star, cells[i].n);
    });

    sdt::CsvTable table;
    table.columns = {"beta", "gamma", "lambda", "n", "power"};
    bool any_fail = false;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (!errors[i].empty()) {
            any_fail = true;
            std::cerr << "power point n=" << cells[i].n << " failed: " << errors[i] << "\n";
        }
        table.rows.push_back({fmt(cells[i].tp.beta), fmt(cells[i].tp.gamma),
                              fmt(cells[i].tp.lambda), std::to_string(cells[i].n),
                              fmt(powers[i])});
    }
    emit(o, sdt::render_csv(sdt::metadata_header(cfg_json.dump(), o.seed), table));
    return any_fail ? 1 : 0;
}

int cmd_simulate(const CliOptions& o) {
    const sdt::ParametricModel model = make_model(o.model);
    const sdt::ConstraintSet constraints = parse_null(model, o.null_expr);
    if (o.theta_true.empty())
        throw sdt::InvalidArgumentError("--theta-true is required for the simulate command");
    const sdt::VectorXd theta_true = parse_theta(model, o.theta_true, "--theta-true");
    const std::vector<GridPoint> grid = tuning_grid(o, {0.0}, {0.0});

    json cfg_json = {{"command", "simulate"}, {"model", o.model},     {"null", o.null_expr},
                     {"theta_true", o.theta_true}, {"n", o.n},        {"replicates", o.replicates},
                     {"eps", o.eps},          {"point", o.contam_point}, {"alpha", o.alpha},
                     {"beta", o.beta_list},   {"gamma", o.gamma_list}, {"lambda", o.lambda_list},
                     {"seed", o.seed}};

    sdt::CsvTable table;
    table.columns = {"beta", "gamma", "lambda", "n",       "replicates", "epsilon",
                     "point", "rate", "mc_se",  "rejects", "failures",   "seed"};
    bool any_fail = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        sdt::TestSpec spec;
        spec.model = model;
        spec.null_constraints = constraints;
        spec.beta = grid[i].beta;
        spec.gamma = grid[i].gamma;
        spec.lambda = grid[i].lambda;
        spec.alpha_level = o.alpha;
        const std::uint64_t point_seed = sdt::derive_seed(o.seed, i);
        try {
            const sdt::SimulationSummary s = sdt::simulate_level_power(
                spec, theta_true, {o.eps, o.contam_point}, o.n, o.replicates, point_seed, o.jobs);
            table.rows.push_back({fmt(grid[i].beta), fmt(grid[i].gamma), fmt(grid[i].lambda),
                                  std::to_string(s.n), std::to_string(s.replicates), fmt(o.eps),
                                  fmt(o.contam_point), fmt(s.rate), fmt(s.mc_se),
                                  std::to_string(s.rejects), std::to_string(s.failures),
                                  std::to_string(s.seed)});
        } catch (const std::exception& e) {
            any_fail = true;
            std::cerr << "simulate point beta=" << fmt(grid[i].beta) << " failed: " << e.what()
                      << "\n";
            table.rows.push_back({fmt(grid[i].beta), fmt(grid[i].gamma), fmt(grid[i].lambda),
                                  std::to_string(o.n), std::to_string(o.replicates), fmt(o.eps),
                                  fmt(o.contam_point), "nan", "nan", "0", "0",
                                  std::to_string(point_seed)});
        }
    }
    emit(o, sdt::render_csv(sdt::metadata_header(cfg_json.dump(), o.seed), table));
    return any_fail ? 1 : 0;
}

// --config JSON supplies defaults; values may be scalars or arrays (arrays are
// joined into the comma-list form the flags use).
void apply_config(CliOptions& o) {
    std::ifstream in(o.config_path);
    if (!in) throw sdt::IoError("cannot open config file: " + o.config_path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw sdt::IoError("config parse error in " + o.config_path + ": " + e.what());
    }
    if (!j.is_object()) throw sdt::IoError("config root must be a JSON object");

    auto as_string = [](const json& v) -> std::string {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_array()) {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) s += ',';
                s += v[i].is_string() ? v[i].get<std::string>()
                                      : sdt::format_double(v[i].get<double>());
            }
            return s;
        }
        if (v.is_number()) return sdt::format_double(v.get<double>());
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        throw sdt::IoError("unsupported config value type");
    };
    auto set_str = [&](const char* key, std::string& target) {
        if (j.contains(key)) target = as_string(j.at(key));
    };
    auto set_dbl = [&](const char* key, double& target) {
        if (j.contains(key)) target = parse_one_double(as_string(j.at(key)), key);
    };
    set_str("data", o.data);
    set_str("drop", o.drop);
    set_str("model", o.model);
    set_str("null", o.null_expr);
    set_str("beta", o.beta_list);
    set_str("gamma", o.gamma_list);
    set_str("lambda", o.lambda_list);
    set_dbl("alpha", o.alpha);
    if (j.contains("seed")) o.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("jobs")) o.jobs = j.at("jobs").get<int>();
    set_str("out", o.out);
    set_str("estimator", o.estimator);
    set_dbl("y-min", o.y_min);
    set_dbl("y-max", o.y_max);
    if (j.contains("y-points")) o.y_points = j.at("y-points").get<int>();
    set_str("delta", o.delta_list);
    set_str("theta-star", o.theta_star);
    set_str("theta-true", o.theta_true);
    set_str("n-grid", o.n_grid);
    if (j.contains("n")) o.n = j.at("n").get<long long>();
    if (j.contains("replicates")) o.replicates = j.at("replicates").get<int>();
    set_dbl("eps", o.eps);
    set_dbl("point", o.contam_point);
}

}  // namespace

int main(int argc, char** argv) {
    CliOptions o;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--config") == 0) o.config_path = argv[i + 1];
    try {
        if (!o.config_path.empty()) apply_config(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{"S-divergence based robust estimation and composite testing"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub, bool with_data) {
        if (with_data) {
            sub->add_option("--data", o.data, "data file or builtin:<name>");
            sub->add_option("--drop", o.drop, "1-based observation indices to drop");
        }
        sub->add_option("--model", o.model, "normal | poisson | normal-fixed-sigma:<v>");
        sub->add_option("--beta", o.beta_list, "estimation tuning values (comma list)");
        sub->add_option("--gamma", o.gamma_list, "divergence gamma values (comma list)");
        sub->add_option("--lambda", o.lambda_list, "divergence lambda values (comma list)");
        sub->add_option("--alpha", o.alpha, "test level");
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--jobs", o.jobs, "max concurrent grid points");
        sub->add_option("--out", o.out, "output path (default: stdout)");
        sub->add_option("--config", o.config_path, "JSON file of flag defaults; flags win");
    };

    CLI::App* fit = app.add_subcommand("fit", "fit the model over a beta grid");
    add_common(fit, true);
    fit->add_option("--estimator", o.estimator, "weighted (table convention) or exact");

    CLI::App* test = app.add_subcommand("test", "run the divergence test (JSON report)");
    add_common(test, true);
    test->add_option("--null", o.null_expr, "constraint, e.g. \"mu=0\"");

    CLI::App* curve = app.add_subcommand("pvalue-curve", "p-values over a tuning grid (CSV)");
    add_common(curve, true);
    curve->add_option("--null", o.null_expr, "constraint, e.g. \"mu=0\"");

    CLI::App* ifc = app.add_subcommand("ifcurve", "influence diagnostics over a y grid (CSV)");
    add_common(ifc, true);
    ifc->add_option("--null", o.null_expr, "constraint, e.g. \"mu=0\"");
    ifc->add_option("--y-min", o.y_min, "left end of the y grid");
    ifc->add_option("--y-max", o.y_max, "right end of the y grid");
    ifc->add_option("--y-points", o.y_points, "number of y grid points");
    ifc->add_option("--delta", o.delta_list, "shift direction for the power influence");

    CLI::App* power = app.add_subcommand("power", "asymptotic power approximation (CSV)");
    add_common(power, false);
    power->add_option("--null", o.null_expr, "constraint, e.g. \"mu=0\"");
    power->add_option("--theta-star", o.theta_star, "alternative parameter (comma list)");
    power->add_option("--n-grid", o.n_grid, "sample sizes (comma list)");

    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo rejection rates (CSV)");
    add_common(sim, false);
    sim->add_option("--null", o.null_expr, "constraint, e.g. \"mu=0\"");
    sim->add_option("--theta-true", o.theta_true, "data-generating parameter (comma list)");
    sim->add_option("--n", o.n, "sample size per replicate");
    sim->add_option("--replicates", o.replicates, "number of replicates");
    sim->add_option("--eps", o.eps, "contamination mass epsilon (scaled by 1/sqrt(n))");
    sim->add_option("--point", o.contam_point, "contamination point y");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) return cmd_fit(o);
        if (test->parsed()) return cmd_test(o);
        if (curve->parsed()) return cmd_pvalue_curve(o);
        if (ifc->parsed()) return cmd_ifcurve(o);
        if (power->parsed()) return cmd_power(o);
        if (sim->parsed()) return cmd_simulate(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
