#pragma once

// Empirical decay rates from sampled diagnostics and their audit against the
// theoretical rate bounds and envelopes.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chemolab/error.hpp"
#include "chemolab/theory.hpp"

namespace chemolab {

struct TimeSeries {
    std::vector<double> times;
    std::array<std::vector<double>, 4> dist;  // u, v, w, z sup-distances
    std::vector<double> mass_u;
    std::vector<double> mass_vw;
    std::vector<double> min_all;
    std::vector<double> criterion_norm;
    std::optional<double> t0;

    std::size_t size() const { return times.size(); }
};

struct RateFit {
    double rate = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double t_start = 0.0;
    double t_end = 0.0;
    std::size_t points_used = 0;
};

struct FitOptions {
    /// Samples at or below the floor are excluded (linear-solve noise).
    double floor = 0.0;
    /// Fraction of usable samples, counted from the end, used in the fit.
    double window = 0.5;
};

/// Least-squares line through (t, log y) over the tail of the usable samples.
/// The usable range starts at the first sample above the floor and ends just
/// before the next sample at or below it.
inline RateFit fit_exponential_rate(std::span<const double> t, std::span<const double> y, FitOptions opt = {}) {
    if (t.size() != y.size()) throw Error(ErrorKind::InvalidParameters, "time and value series differ in length");
    if (!(opt.window > 0.0 && opt.window <= 1.0)) throw Error(ErrorKind::InvalidParameters, "window must be in (0, 1]");
    const double floor = std::max(opt.floor, 0.0);
    auto above = [&](std::size_t i) { return y[i] > floor && std::isfinite(y[i]); };
    std::size_t begin = 0;
    while (begin < y.size() && !above(begin)) ++begin;
    std::size_t usable = begin;
    while (usable < y.size() && above(usable)) ++usable;
    const std::size_t count = usable - begin;
    const auto take = static_cast<std::size_t>(std::ceil(opt.window * static_cast<double>(count)));
    const std::size_t n = std::min(count, std::max<std::size_t>(take, 3));
    if (n < 3) {
        throw Error(ErrorKind::InsufficientData, "need at least 3 samples above the floor, have " + std::to_string(count));
    }
    const std::size_t first = usable - n;

    double st = 0.0, sl = 0.0;
    for (std::size_t i = first; i < usable; ++i) {
        st += t[i];
        sl += std::log(y[i]);
    }
    const double nd = static_cast<double>(n);
    const double tm = st / nd, lm = sl / nd;
    double stt = 0.0, stl = 0.0, sll = 0.0;
    for (std::size_t i = first; i < usable; ++i) {
        const double dt = t[i] - tm, dl = std::log(y[i]) - lm;
        stt += dt * dt;
        stl += dt * dl;
        sll += dl * dl;
    }
    if (stt == 0.0) throw Error(ErrorKind::InsufficientData, "fit window has zero time extent");
    const double slope = stl / stt;
    RateFit fit;
    fit.rate = -slope;
    fit.intercept = lm - slope * tm;
    fit.r_squared = sll == 0.0 ? 1.0 : std::clamp(stl * stl / (stt * sll), 0.0, 1.0);
    fit.t_start = t[first];
    fit.t_end = t[usable - 1];
    fit.points_used = n;
    return fit;
}

struct RateVerdict {
    bool pass = false;
    double fitted = 0.0;
    double bound = 0.0;
    /// r^2 < 0.99: the tail is not a clean exponential (warning only).
    bool non_exponential_tail = false;
};

/// Per field: pass iff fitted >= (1 - slack) * bound.
inline std::array<RateVerdict, 4> compare_rates(const std::array<RateFit, 4>& fits, const RateBounds& bounds,
                                                double slack) {
    if (!(slack >= 0.0 && slack < 0.5)) throw Error(ErrorKind::InvalidParameters, "slack must be in [0, 0.5)");
    std::array<RateVerdict, 4> out;
    for (std::size_t i = 0; i < 4; ++i) {
        out[i].fitted = fits[i].rate;
        out[i].bound = bounds[i];
        out[i].pass = fits[i].rate >= (1.0 - slack) * bounds[i];
        out[i].non_exponential_tail = fits[i].r_squared < 0.99;
    }
    return out;
}

struct EnvelopeVerdict {
    bool applicable = false;
    std::array<bool, 4> pass{};
    /// min over samples t >= t0 of (bound - observed) / bound, per field.
    std::array<double, 4> worst_margin{};
    std::size_t samples_checked = 0;

    bool all_pass() const { return applicable && pass[0] && pass[1] && pass[2] && pass[3]; }
};

/// Checks dist_field(t) <= m_field exp(-rate_field (t - t0)) at every sample t >= t0.
inline EnvelopeVerdict envelope_check(const TimeSeries& ts, const EnvelopeBounds& env, const RateBounds& bounds) {
    EnvelopeVerdict v;
    if (!ts.t0) return v;
    v.applicable = true;
    const double t0 = *ts.t0;
    v.pass.fill(true);
    v.worst_margin.fill(infinity);
    for (std::size_t s = 0; s < ts.size(); ++s) {
        const double t = ts.times[s];
        if (t < t0) continue;
        ++v.samples_checked;
        for (std::size_t f = 0; f < 4; ++f) {
            const double bound = env.m[f] * std::exp(-bounds[f] * (t - t0));
            const double observed = ts.dist[f][s];
            if (!(observed <= bound)) v.pass[f] = false;
            const double margin = bound > 0.0 ? (bound - observed) / bound : (observed > 0.0 ? -infinity : 0.0);
            v.worst_margin[f] = std::min(v.worst_margin[f], margin);
        }
    }
    return v;
}

}  // namespace chemolab
