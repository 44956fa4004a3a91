#include "sdt/density.hpp"

#include <cmath>
#include <string>

#include "sdt/errors.hpp"
#include "sdt/quadrature.hpp"

namespace sdt {

DiscreteTable make_discrete_table(std::vector<long long> points, std::vector<double> mass) {
    if (points.size() != mass.size() || points.empty()) {
        throw InvalidArgumentError("discrete table: points/mass size mismatch or empty");
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i] <= points[i - 1]) {
            throw InvalidArgumentError("discrete table: support must be strictly increasing");
        }
    }
    double sum = 0.0;
    for (double m : mass) {
        if (!(m >= 0.0)) throw InvalidArgumentError("discrete table: negative mass");
        sum += m;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw InvalidArgumentError("discrete table: masses sum to " + std::to_string(sum) +
                                   ", expected 1 within 1e-9");
    }
    return DiscreteTable{std::move(points), std::move(mass)};
}

GridFunction make_grid_function(double lo, double hi, std::vector<double> values) {
    if (!(hi > lo) || values.size() < 2) {
        throw InvalidArgumentError("grid function: need hi > lo and at least two nodes");
    }
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InvalidArgumentError("grid function: values must be finite and nonnegative");
        }
    }
    GridFunction g{lo, hi, std::move(values)};
    const double integral = trapezoid(g.values, g.dx());
    if (std::fabs(integral - 1.0) > 1e-6) {
        throw InvalidArgumentError("grid function: integrates to " + std::to_string(integral) +
                                   ", expected 1 within 1e-6");
    }
    return g;
}

}  // namespace sdt
