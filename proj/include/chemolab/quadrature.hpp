#pragma once

// Composite Gauss-Legendre quadrature with power substitution for integrable
// endpoint singularities of the form |x - endpoint|^{-beta}, beta < 1.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "chemolab/error.hpp"

namespace chemolab::quad {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule of order m via Newton iteration on P_m.
inline GaussRule gauss_legendre(std::size_t m) {
    GaussRule rule{std::vector<double>(m), std::vector<double>(m)};
    const double md = static_cast<double>(m);
    for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (md + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= m; ++k) {
                const double kd = static_cast<double>(k);
                const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
                p0 = p1;
                p1 = p2;
            }
            dp = md * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[m - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[m - 1 - i] = w;
    }
    return rule;
}

inline const GaussRule& default_rule() {
    static const GaussRule rule = gauss_legendre(16);
    return rule;
}

/// Composite rule with `panels` equal panels on [a, b].
template <class F>
double composite(F&& f, double a, double b, std::size_t panels) {
    const GaussRule& rule = default_rule();
    const double w = (b - a) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + w * static_cast<double>(p);
        const double mid = lo + 0.5 * w;
        double s = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(mid + 0.5 * w * rule.nodes[k]);
        total += 0.5 * w * s;
    }
    return total;
}

/// Integral of f over [a, b] where f may behave like (x - a)^{-beta} at a.
/// Substitutes x = a + sigma^q with q = 1 / (1 - beta), which makes the
/// transformed integrand bounded. beta <= 0 means no substitution.
template <class F>
double left_singular(F&& f, double a, double b, double beta, std::size_t panels) {
    if (beta >= 1.0) throw Error(ErrorKind::InvalidParameters, "singularity exponent must be < 1");
    if (b <= a) return 0.0;
    if (beta <= 0.0) return composite(f, a, b, panels);
    const double q = 1.0 / (1.0 - beta);
    const double top = std::pow(b - a, 1.0 / q);
    return composite([&](double s) { return f(a + std::pow(s, q)) * q * std::pow(s, q - 1.0); }, 0.0, top, panels);
}

/// Repeats `eval(panels)` with doubling panel counts until two successive
/// values agree to `rel_tol` (or an absolute floor). Returns the finer value.
template <class Eval>
double refine(Eval&& eval, double rel_tol = 1e-10, std::size_t start = 4, std::size_t max_panels = 1u << 16) {
    double prev = eval(start);
    for (std::size_t n = 2 * start; n <= max_panels; n *= 2) {
        const double cur = eval(n);
        if (std::abs(cur - prev) <= rel_tol * std::abs(cur) + 1e-300) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace chemolab::quad
