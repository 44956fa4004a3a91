#include "sdt/sample.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sdt/errors.hpp"

namespace sdt {

Sample make_sample(std::vector<double> values) {
    if (values.empty()) throw InvalidArgumentError("sample: empty");
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidArgumentError("sample: non-finite value");
    }
    return Sample{std::move(values)};
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1));
}

double quantile_type2(std::vector<double> v, double p) {
    if (v.empty()) throw InvalidArgumentError("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgumentError("quantile: p outside [0,1]");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (p == 0.0) return v.front();
    if (p == 1.0) return v.back();
    const double np = static_cast<double>(n) * p;
    const double k = std::ceil(np);
    const std::size_t idx = static_cast<std::size_t>(k);  // 1-based rank
    if (std::fabs(np - std::round(np)) < 1e-12 && idx < n) {
        return 0.5 * (v[idx - 1] + v[idx]);
    }
    return v[std::min(idx, n) - 1];
}

double iqr(const std::vector<double>& v) {
    return quantile_type2(v, 0.75) - quantile_type2(v, 0.25);
}

DiscreteTable relative_frequency(const Sample& sample) {
    std::map<long long, long long> counts;
    for (double x : sample.values) {
        const double r = std::round(x);
        if (r < 0.0 || std::fabs(x - r) > 1e-9) {
            throw InvalidArgumentError("relative_frequency: value " + std::to_string(x) +
                                       " is not a nonnegative integer");
        }
        counts[static_cast<long long>(r)] += 1;
    }
    DiscreteTable table;
    const double n = static_cast<double>(sample.n());
    for (const auto& [point, count] : counts) {
        table.points.push_back(point);
        table.mass.push_back(static_cast<double>(count) / n);
    }
    return table;
}

GridFunction kernel_density(const Sample& sample, double bandwidth, double lo, double hi,
                            int nodes) {
    if (!(bandwidth > 0.0)) throw InvalidArgumentError("kernel_density: bandwidth must be > 0");
    if (nodes < 2 || !(hi > lo)) throw InvalidArgumentError("kernel_density: bad grid");
    GridFunction g;
    g.lo = lo;
    g.hi = hi;
    g.values.assign(nodes, 0.0);
    const double dx = (hi - lo) / (nodes - 1);
    const double norm = 1.0 / (sample.n() * bandwidth * std::sqrt(2.0 * M_PI));
    for (int i = 0; i < nodes; ++i) {
        const double x = lo + i * dx;
        double acc = 0.0;
        for (double xi : sample.values) {
            const double z = (x - xi) / bandwidth;
            acc += std::exp(-0.5 * z * z);
        }
        g.values[i] = norm * acc;
    }
    return g;
}

GridFunction kernel_density(const Sample& sample, double bandwidth, int nodes) {
    const auto [mn, mx] = std::minmax_element(sample.values.begin(), sample.values.end());
    return kernel_density(sample, bandwidth, *mn - 8.0 * bandwidth, *mx + 8.0 * bandwidth,
                          nodes);
}

double default_bandwidth(const Sample& sample) {
    const double n = static_cast<double>(sample.n());
    const double spread = std::min(sample_sd(sample.values), iqr(sample.values) / 1.349);
    const double factor = std::pow(n, -0.2);
    if (!(spread > 0.0)) return factor;
    return 1.06 * spread * factor;
}

}  // namespace sdt
