#pragma once

#include <vector>

#include "sdt/density.hpp"

namespace sdt {

struct Sample {
    std::vector<double> values;
    int n() const { return static_cast<int>(values.size()); }
};

// Validates: nonempty, all values finite.
Sample make_sample(std::vector<double> values);

double mean(const std::vector<double>& v);
double sample_sd(const std::vector<double>& v);  // n-1 denominator; 0 when n < 2

// Quantile with averaging at discontinuities (R type 2): for two points
// {0, 1} this gives q(0.25) = 0 and q(0.75) = 1.
double quantile_type2(std::vector<double> v, double p);
double iqr(const std::vector<double>& v);

// Empirical mass function k/n over the observed integer support.  Values must
// be nonnegative integers (within 1e-9 of one).
DiscreteTable relative_frequency(const Sample& sample);

// Gaussian-kernel density estimate on an equispaced grid.
GridFunction kernel_density(const Sample& sample, double bandwidth, double lo, double hi,
                            int nodes = 1024);
// Window defaults to [min - 8h, max + 8h] so the grid carries all the mass.
GridFunction kernel_density(const Sample& sample, double bandwidth, int nodes = 1024);

// 1.06 * min(sd, IQR/1.349) * n^(-1/5); falls back to n^(-1/5) when the
// spread estimate degenerates to zero.
double default_bandwidth(const Sample& sample);

}  // namespace sdt
