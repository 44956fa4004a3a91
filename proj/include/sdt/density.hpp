#pragma once

#include <variant>
#include <vector>

namespace sdt {

// Nonparametric density estimate over an integer support.  `points` is
// strictly increasing; `mass[i]` is the probability at points[i].
struct DiscreteTable {
    std::vector<long long> points;
    std::vector<double> mass;
};

// Density values on an equispaced grid over [lo, hi] (endpoints included).
struct GridFunction {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> values;

    double dx() const { return (hi - lo) / static_cast<double>(values.size() - 1); }
};

using DensityRep = std::variant<DiscreteTable, GridFunction>;

// Validating constructors.  Masses must be nonnegative and sum to 1 within
// 1e-9; grid values must be nonnegative with trapezoid integral 1 within 1e-6.
DiscreteTable make_discrete_table(std::vector<long long> points, std::vector<double> mass);
GridFunction make_grid_function(double lo, double hi, std::vector<double> values);

}  // namespace sdt
