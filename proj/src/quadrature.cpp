#include "sdt/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "sdt/errors.hpp"

namespace sdt {

namespace {

GlRule build_rule(int n) {
    GlRule rule;
    rule.x.resize(n);
    rule.w.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess for the i-th root of P_n.
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-15) break;
        }
        rule.x[i] = -z;
        rule.x[n - 1 - i] = z;
        rule.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.w[n - 1 - i] = rule.w[i];
    }
    return rule;
}

}  // namespace

const GlRule& gl_rule(int order) {
    if (order < 1 || order > 256) {
        throw InvalidArgumentError("gl_rule: order out of range");
    }
    static std::map<int, GlRule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, build_rule(order)).first;
    }
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double lo, double hi,
                    int panels, int order) {
    if (!(hi > lo)) {
        throw InvalidArgumentError("integrate_gl: need hi > lo");
    }
    const GlRule& rule = gl_rule(order);
    const double width = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = lo + p * width;
        const double c = a + 0.5 * width;
        const double h = 0.5 * width;
        double acc = 0.0;
        for (int i = 0; i < order; ++i) {
            acc += rule.w[i] * f(c + h * rule.x[i]);
        }
        total += acc * h;
    }
    return total;
}

double trapezoid(const std::vector<double>& values, double dx) {
    if (values.size() < 2) {
        throw InvalidArgumentError("trapezoid: need at least two nodes");
    }
    double acc = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) acc += values[i];
    return acc * dx;
}

}  // namespace sdt
