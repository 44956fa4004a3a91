#pragma once

#include <functional>
#include <vector>

namespace sdt {

// Gauss-Legendre rule on (-1, 1).  Nodes/weights are computed once per order
// via Newton iteration on the Legendre recurrence and cached.
struct GlRule {
    std::vector<double> x;
    std::vector<double> w;
};

const GlRule& gl_rule(int order);

// Composite Gauss-Legendre integral of f over [lo, hi] using `panels` equal
// panels of the given order.  The default 16 x 32 layout gives 512 nodes,
// which resolves the smooth, light-tailed integrands used here to machine
// precision on a +-10-scale window.
double integrate_gl(const std::function<double(double)>& f, double lo, double hi,
                    int panels = 16, int order = 32);

// Trapezoid rule over an equispaced grid of `values` with spacing dx.
double trapezoid(const std::vector<double>& values, double dx);

}  // namespace sdt
