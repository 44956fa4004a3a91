#include "sdt/mixture.hpp"

#include <cmath>

#include "sdt/errors.hpp"
#include "sdt/quadrature.hpp"

namespace sdt {

ChiSquareMixture make_mixture(Eigen::VectorXd weights, Eigen::VectorXd dofs,
                              Eigen::VectorXd deltas) {
    const auto m = weights.size();
    if (m == 0 || dofs.size() != m || deltas.size() != m) {
        throw InvalidArgumentError("mixture: component vectors must be nonempty and aligned");
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(weights[i] > 0.0)) throw InvalidArgumentError("mixture: weights must be > 0");
        if (!(dofs[i] > 0.0)) throw InvalidArgumentError("mixture: dofs must be > 0");
        if (!(deltas[i] >= 0.0)) throw InvalidArgumentError("mixture: deltas must be >= 0");
    }
    return ChiSquareMixture{std::move(weights), std::move(dofs), std::move(deltas)};
}

namespace {

// Imhof's phase and log-amplitude:
//   theta(u) = 1/2 sum_i [h_i atan(w_i u) + d_i w_i u / (1 + w_i^2 u^2)] - x u / 2
//   log rho(u) = sum_i [h_i/4 log(1 + w_i^2 u^2) + d_i/2 * w_i^2 u^2 / (1 + w_i^2 u^2)]
// and P(Q > x) = 1/2 + (1/pi) int_0^inf sin(theta)/(u rho) du.
struct Imhof {
    const ChiSquareMixture& m;
    double x;

    double phase(double u) const {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < m.weights.size(); ++i) {
            const double wu = m.weights[i] * u;
            acc += m.dofs[i] * std::atan(wu) + m.deltas[i] * wu / (1.0 + wu * wu);
        }
        return 0.5 * acc - 0.5 * x * u;
    }
    double phase_slope(double u) const {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < m.weights.size(); ++i) {
            const double w = m.weights[i];
            const double q = 1.0 + w * w * u * u;
            acc += m.dofs[i] * w / q + m.deltas[i] * w * (1.0 - w * w * u * u) / (q * q);
        }
        return 0.5 * acc - 0.5 * x;
    }
    // Upper bound on |phase_slope| on [u, inf); used to size oscillation panels.
    double slope_bound(double u) const {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < m.weights.size(); ++i) {
            const double w = m.weights[i];
            const double q = 1.0 + w * w * u * u;
            acc += m.dofs[i] * w / q + m.deltas[i] * w / q;
        }
        return 0.5 * acc + 0.5 * x;
    }
    double log_rho(double u) const {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < m.weights.size(); ++i) {
            const double wu2 = m.weights[i] * m.weights[i] * u * u;
            acc += 0.25 * m.dofs[i] * std::log1p(wu2) +
                   0.5 * m.deltas[i] * wu2 / (1.0 + wu2);
        }
        return acc;
    }
    double envelope(double u) const {  // 1 / (u rho(u))
        return std::exp(-std::log(u) - log_rho(u));
    }
    double integrand(double u) const { return envelope(u) * std::sin(phase(u)); }
    // d/du of log envelope, used in the tail-error bound.
    double envelope_log_slope(double u) const {
        double acc = 1.0 / u;
        for (Eigen::Index i = 0; i < m.weights.size(); ++i) {
            const double w2u = m.weights[i] * m.weights[i] * u;
            const double q = 1.0 + w2u * u;
            acc += 0.5 * m.dofs[i] * w2u / q + m.deltas[i] * w2u / (q * q);
        }
        return acc;
    }
};

// Acklam's rational approximation to the standard normal quantile
// (relative error below 1.2e-9); only used to seed the root bracket.
double inv_normal_cdf(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double mixture_tail(const ChiSquareMixture& mixture, double x) {
    if (mixture.weights.size() == 0) throw InvalidArgumentError("mixture: empty");
    if (!(std::isfinite(x))) throw InvalidArgumentError("mixture_tail: x must be finite");
    // The law is supported on (0, inf); arguments at or below zero (and
    // positive arguments indistinguishable from zero at the 1e-6 accuracy
    // target) have tail probability one.
    if (x <= 1e-8) return 1.0;

    const Imhof im{mixture, x};
    const GlRule& rule = gl_rule(24);
    const double tol = 1e-8;

    double acc = 0.0;
    double u = 0.0;
    bool done = false;
    for (long panel = 0; panel < 2000000; ++panel) {
        // Phase advances by at most 4*pi per panel: two oscillations, which
        // the 24-node rule still integrates to well below the 1e-8 target.
        const double width = 4.0 * M_PI / im.slope_bound(u);
        const double c = u + 0.5 * width;
        const double h = 0.5 * width;
        double part = 0.0;
        for (int i = 0; i < 24; ++i) part += rule.w[i] * im.integrand(c + h * rule.x[i]);
        acc += part * h;
        u += width;

        // Truncation control.  Once the phase slope is decisively negative
        // (dominated by the -x/2 term), one integration by parts gives the
        // remainder as a boundary term f(U) cos(theta)/theta' plus a residual
        // of order f * s / theta'^2, where s is the envelope's log-slope.  Add
        // the boundary term and stop when the residual bound is small.
        const double slope = im.phase_slope(u);
        if (slope < -0.25 * x) {
            const double amp = im.envelope(u);
            const double s = im.envelope_log_slope(u);
            const double residual = amp * s / (slope * slope);
            if (3.0 * residual < tol) {
                acc += amp * std::cos(im.phase(u)) / slope;
                done = true;
                break;
            }
        }
    }
    if (!done) {
        throw ConvergenceError("mixture_tail: inversion integral did not converge");
    }
    double tail = 0.5 + acc / M_PI;
    // The inversion can stray a hair outside [0,1] at extreme arguments.
    if (tail < 0.0) tail = 0.0;
    if (tail > 1.0) tail = 1.0;
    return tail;
}

double mixture_quantile(const ChiSquareMixture& mixture, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidArgumentError("mixture_quantile: alpha must lie in (0,1)");
    }
    double mean = 0.0, var = 0.0;
    for (Eigen::Index i = 0; i < mixture.weights.size(); ++i) {
        const double w = mixture.weights[i];
        mean += w * (mixture.dofs[i] + mixture.deltas[i]);
        var += w * w * (2.0 * mixture.dofs[i] + 4.0 * mixture.deltas[i]);
    }
    // Seed with a Satterthwaite moment match (c chi2_nu) and the
    // Wilson-Hilferty quantile of that chi-square; the seed usually lands
    // within a few percent, so the bracket costs only a couple of tail calls.
    const double nu = 2.0 * mean * mean / var;
    const double scale = var / (2.0 * mean);
    const double z = -inv_normal_cdf(alpha);  // upper-alpha normal quantile
    const double wh = 1.0 - 2.0 / (9.0 * nu) + z * std::sqrt(2.0 / (9.0 * nu));
    double x0 = scale * nu * wh * wh * wh;
    if (!(x0 > 0.0) || !std::isfinite(x0)) x0 = mean;

    double lo = 0.0, flo = 1.0 - alpha;  // g(x) = tail(x) - alpha
    double hi, fhi;
    const double f0 = mixture_tail(mixture, x0) - alpha;
    if (std::fabs(f0) <= 1e-7) return x0;
    if (f0 > 0.0) {
        lo = x0;
        flo = f0;
        hi = 1.6 * x0;
        fhi = mixture_tail(mixture, hi) - alpha;
        int guard = 0;
        while (fhi > 0.0 && guard++ < 90) {
            lo = hi;
            flo = fhi;
            hi *= 1.6;
            fhi = mixture_tail(mixture, hi) - alpha;
        }
        if (fhi > 0.0) throw ConvergenceError("mixture_quantile: failed to bracket");
    } else {
        hi = x0;
        fhi = f0;
        double cand = x0 / 1.6;
        int guard = 0;
        while (guard++ < 90) {
            if (cand <= 1e-12) break;  // fall back to the lo = 0 bracket end
            const double fc = mixture_tail(mixture, cand) - alpha;
            if (fc > 0.0) {
                lo = cand;
                flo = fc;
                break;
            }
            hi = cand;
            fhi = fc;
            cand /= 1.6;
        }
    }

    // Illinois variant of regula falsi.
    double x = hi;
    for (int it = 0; it < 200; ++it) {
        x = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        const double fx = mixture_tail(mixture, x) - alpha;
        if (std::fabs(fx) <= 1e-7 || hi - lo <= 1e-10 * (1.0 + hi)) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
            fhi *= 0.5;
        } else {
            hi = x;
            fhi = fx;
            flo *= 0.5;
        }
    }
    throw ConvergenceError("mixture_quantile: root search did not converge");
}

}  // namespace sdt
