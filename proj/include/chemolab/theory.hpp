#pragma once

// Closed-form and quadrature evaluation of the explicit decay rates,
// intermediate constants A, B, C, D and envelope coefficients m1..m4.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "chemolab/error.hpp"
#include "chemolab/quadrature.hpp"
#include "chemolab/state.hpp"

namespace chemolab {

/// Guaranteed exponential decay rates of the sup-distances to equilibrium.
struct RateBounds {
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
    double z = 0.0;

    double operator[](std::size_t i) const { return std::array{u, v, w, z}[i]; }
};

/// How the printed z exponent "min{1, lambda_1,/2 ubar_0/6}" is read.
inline constexpr const char* z_rate_reading = "min{1, lambda1/2, ubar0/6}";

inline RateBounds theoretical_rates(double lambda1, double ubar0) {
    if (!(ubar0 > 0.0)) throw Error(ErrorKind::DegenerateData, "ubar0 must be > 0 (u0 >=, != 0)");
    if (!(lambda1 > 0.0)) throw Error(ErrorKind::InvalidParameters, "lambda1 must be > 0");
    const double m = std::min(lambda1, ubar0 / 3.0);
    return {0.5 * m, m, 0.5 * ubar0, std::min({1.0, 0.5 * lambda1, ubar0 / 6.0})};
}

namespace detail {

/// Golden-section maximization of a unimodal function on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, double tol = 1e-12) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return std::max({fc, fd, f(0.5 * (a + b))});
}

/// Sup of f over a log-spaced grid on [lo, hi], refined by golden section
/// inside the bracket around the best grid point.
template <class F>
double grid_then_refine_max(F&& f, double lo, double hi, std::size_t points = 2000) {
    std::vector<double> s(points);
    const double ratio = std::log(hi / lo) / static_cast<double>(points - 1);
    std::size_t best = 0;
    double best_val = -infinity;
    for (std::size_t i = 0; i < points; ++i) {
        s[i] = lo * std::exp(ratio * static_cast<double>(i));
        const double v = f(s[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double a = s[best == 0 ? 0 : best - 1];
    const double b = s[best + 1 == points ? best : best + 1];
    return std::max(best_val, golden_max(f, a, b));
}

}  // namespace detail

/// B = sup_{s>0} (s + 2 sqrt(s)) exp(-ubar0 s / 3).
inline double constant_B(double ubar0) {
    if (!(ubar0 > 0.0)) throw Error(ErrorKind::DegenerateData, "constant B diverges for ubar0 <= 0");
    const double a = ubar0 / 3.0;
    auto g = [a](double s) { return (s + 2.0 * std::sqrt(s)) * std::exp(-a * s); };
    return detail::grid_then_refine_max(g, 1e-10 / a, 200.0 / a);
}

/// Resolution knob for the quadrature-backed constants (Gauss panels per
/// integral; doubling it must not move the result).
struct QuadratureResolution {
    std::size_t panels = 64;
};

/// A = sup_{s>0} exp(-(ubar0/2 - lambda1/2) s) int_0^s (1 + tau^{-1/2}) exp(-(lambda1 - ubar0/2) tau) dtau,
/// defined on the branch lambda1 < ubar0/2. The tau^{-1/2} singularity is
/// removed with tau = sigma^2.
inline double constant_A(double ubar0, double lambda1, QuadratureResolution res = {}) {
    if (!(lambda1 > 0.0) || !(ubar0 > 0.0)) throw Error(ErrorKind::InvalidParameters, "A needs lambda1, ubar0 > 0");
    if (!(lambda1 < ubar0 / 2.0)) {
        throw Error(ErrorKind::WrongBranch, "A applies only when lambda1 < ubar0/2; use B");
    }
    const double c = lambda1 - ubar0 / 2.0;   // < 0
    const double b = ubar0 / 2.0 - lambda1 / 2.0;
    auto F = [&](double s) {
        // Exponents combined under the integral so nothing overflows.
        return quad::composite(
            [&](double sigma) { return 2.0 * (sigma + 1.0) * std::exp(-c * sigma * sigma - b * s); }, 0.0,
            std::sqrt(s), res.panels);
    };
    // F decays like exp(-lambda1 s / 2) for large s.
    return detail::grid_then_refine_max(F, 1e-8, 80.0 / lambda1, 400);
}

inline double rate_D_exponent(double ubar0, double lambda1) {
    return lambda1 - 0.5 * std::min(lambda1, ubar0 / 3.0);
}

/// Closed form of D: 1/mu + Gamma(1/3) mu^{-1/3}.
inline double constant_D_closed_form(double mu) { return 1.0 / mu + std::tgamma(1.0 / 3.0) * std::pow(mu, -1.0 / 3.0); }

/// D = sup_{s>0} int_0^s (1 + tau^{-2/3}) exp(-mu tau) dtau with
/// mu = lambda1 - min{lambda1, ubar0/3}/2. The integrand is positive, so the
/// sup is the integral over (0, inf), evaluated by quadrature.
inline double constant_D_for_mu(double mu, QuadratureResolution res = {}) {
    if (!(mu > 0.0)) throw Error(ErrorKind::InternalError, "D exponent must be positive");
    auto f = [mu](double tau) { return (1.0 + std::pow(tau, -2.0 / 3.0)) * std::exp(-mu * tau); };
    const double split = 1.0 / mu;
    const double head = quad::left_singular(f, 0.0, split, 2.0 / 3.0, res.panels);
    const double tail = quad::composite(f, split, 60.0 / mu, 4 * res.panels);
    return head + tail;
}

inline double constant_D(double ubar0, double lambda1, QuadratureResolution res = {}) {
    if (!(lambda1 > 0.0) || !(ubar0 > 0.0)) throw Error(ErrorKind::InvalidParameters, "D needs lambda1, ubar0 > 0");
    return constant_D_for_mu(rate_D_exponent(ubar0, lambda1), res);
}

struct ConstantCInputs {
    double k2 = 1.0;
    double k3 = 1.0;
    double grad_v_t0 = 0.0;   // ||grad v(., t0)||_{L^p}
    double ubar0 = 1.0;
    double w0_inf = 0.0;
    double measure = 1.0;
    double p = 3.0;
    double max_AB = 1.0;
};

/// C = 2 k3 ||grad v(t0)||_p + (3/2) k2 ubar0 ||w0||_inf |Omega|^{1/p} max{A, B}.
inline double constant_C(const ConstantCInputs& in) {
    if (!(in.p > 2.0) || std::isinf(in.p)) {
        throw Error(ErrorKind::InvalidExponent, "C needs 2 < p < inf, got p = " + std::to_string(in.p));
    }
    if (in.k2 < 0 || in.k3 < 0 || in.grad_v_t0 < 0 || in.ubar0 < 0 || in.w0_inf < 0 || !(in.measure > 0) ||
        in.max_AB < 0) {
        throw Error(ErrorKind::InvalidParameters, "C inputs must be nonnegative");
    }
    return 2.0 * in.k3 * in.grad_v_t0 + 1.5 * in.k2 * in.ubar0 * in.w0_inf * std::pow(in.measure, 1.0 / in.p) * in.max_AB;
}

enum class GradientBranch { A, B };

inline const char* to_string(GradientBranch b) { return b == GradientBranch::A ? "A" : "B"; }

/// B when lambda1 >= ubar0/2, A otherwise.
inline GradientBranch select_branch(double lambda1, double ubar0) {
    return lambda1 < ubar0 / 2.0 ? GradientBranch::A : GradientBranch::B;
}

struct EnvelopeInputs {
    std::array<double, 4> k{1.0, 1.0, 1.0, 1.0};
    double lambda1 = 1.0;
    double ubar0 = 1.0;
    double vbar0 = 0.0;
    double wbar0 = 0.0;
    double w0_inf = 0.0;
    double grad_v_t0 = 0.0;
    double measure = 1.0;
    double p = 3.0;
    double t0 = 0.0;
};

struct EnvelopeBounds {
    std::array<double, 4> m{};  // u, v, w, z
    double t0 = 0.0;
    std::array<double, 4> k{};
    GradientBranch branch = GradientBranch::B;
    double A = 0.0;  // zero unless branch A
    double B = 0.0;  // zero unless branch B
    double C = 0.0;
    double D = 0.0;
    double p = 3.0;
};

inline EnvelopeBounds envelope_coefficients(const EnvelopeInputs& in, QuadratureResolution res = {}) {
    if (!(in.lambda1 > 0.0)) throw Error(ErrorKind::InvalidParameters, "lambda1 must be > 0");
    if (!(in.ubar0 > 0.0)) throw Error(ErrorKind::DegenerateData, "ubar0 must be > 0");
    for (double k : in.k) {
        if (!(k > 0.0) || !std::isfinite(k)) throw Error(ErrorKind::InvalidParameters, "k_i must be positive");
    }
    const auto [k1, k2, k3, k4] = in.k;
    EnvelopeBounds env;
    env.k = in.k;
    env.t0 = in.t0;
    env.p = in.p;
    env.branch = select_branch(in.lambda1, in.ubar0);
    double ab = 0.0;
    if (env.branch == GradientBranch::A) {
        env.A = constant_A(in.ubar0, in.lambda1, res);
        ab = env.A;
    } else {
        env.B = constant_B(in.ubar0);
        ab = env.B;
    }
    env.C = constant_C({k2, k3, in.grad_v_t0, in.ubar0, in.w0_inf, in.measure, in.p, ab});
    env.D = constant_D(in.ubar0, in.lambda1, res);

    const double ubar = in.ubar0;
    const double kcd = k4 * env.C * env.D;
    env.m[0] = (5.0 * k1 + 1.5 * kcd) * ubar;
    env.m[1] = 6.0 * k1 * (in.vbar0 + in.wbar0) + (36.0 * k1 / std::numbers::e + 1.0) * in.w0_inf;
    env.m[2] = in.w0_inf;
    const double denom = 2.0 * (in.lambda1 + 1.0) - std::min(in.lambda1, ubar / 3.0);
    env.m[3] = ubar * (2.5 + 2.0 * k1 * (3.0 + (10.0 * k1 + 3.0 * kcd) / denom));
    return env;
}

struct SmallnessResult {
    double n_effective = 4.0;
    double eps = 0.0;
    double u_norm = 0.0;       // ||u0||_{L^{n/4}}
    double z_norm = 0.0;       // ||z0||_{L^{n/2}}
    double grad_v_norm = 0.0;  // ||grad v0||_{L^n}
    bool u_small = false;
    bool z_small = false;
    bool grad_v_small = false;

    bool all() const { return u_small && z_small && grad_v_small; }
};

/// Checks the three initial smallness inequalities with exponents taken from a
/// symbolic dimension n_effective >= 4 (norms evaluated on the actual grid).
inline SmallnessResult smallness_check(const GridField& u0, const GridField& z0, const GridField& v0,
                                       double n_effective, double eps) {
    if (n_effective < 4.0) {
        throw Error(ErrorKind::OutOfRegime,
                    "smallness conditions apply for n >= 4; n <= 3 is bounded without smallness");
    }
    if (!(eps > 0.0)) throw Error(ErrorKind::InvalidParameters, "eps must be > 0");
    SmallnessResult r;
    r.n_effective = n_effective;
    r.eps = eps;
    r.u_norm = lp_norm(u0, n_effective / 4.0);
    r.z_norm = lp_norm(z0, n_effective / 2.0);
    r.grad_v_norm = gradient_norm(v0, n_effective);
    r.u_small = r.u_norm <= eps;
    r.z_small = r.z_norm <= eps;
    r.grad_v_small = r.grad_v_norm <= eps;
    return r;
}

}  // namespace chemolab
