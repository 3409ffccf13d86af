#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chemolab/rates.hpp"
#include "chemolab/solver.hpp"

using namespace chemolab;

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return t;
}

TimeSeries constant_closed_form_series(double c, double vb, double wb, double t0) {
    TimeSeries ts;
    ts.t0 = t0;
    for (double t : linspace(0.0, 20.0, 201)) {
        ts.times.push_back(t);
        const double w = wb * std::exp(-c * t);
        ts.dist[0].push_back(0.0);
        ts.dist[1].push_back(w);
        ts.dist[2].push_back(w);
        ts.dist[3].push_back(0.0);
    }
    (void)vb;
    return ts;
}

EnvelopeBounds constant_envelope(double c, double vb, double wb) {
    EnvelopeInputs in;
    in.k = {1, 1, 1, 1};
    in.lambda1 = 1.0;
    in.ubar0 = c;
    in.vbar0 = vb;
    in.wbar0 = wb;
    in.w0_inf = wb;
    in.grad_v_t0 = 0.0;
    in.measure = std::numbers::pi;
    return envelope_coefficients(in);
}

}  // namespace

TEST(FitRate, ExactExponential) {
    const auto t = linspace(0.0, 5.0, 11);
    std::vector<double> y;
    for (double s : t) y.push_back(std::exp(-2.0 * s));
    const RateFit f = fit_exponential_rate(t, y);
    EXPECT_NEAR(f.rate, 2.0, 1e-10);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_EQ(f.points_used, 6u);
    EXPECT_EQ(f.t_end, 5.0);
}

TEST(FitRate, AmplitudeAndScaleInvariance) {
    const auto t = linspace(0.0, 8.0, 33);
    std::vector<double> y1, y2;
    for (double s : t) {
        y1.push_back(1e-6 * std::exp(-0.7 * s));
        y2.push_back(4e3 * std::exp(-0.7 * s));
    }
    const RateFit a = fit_exponential_rate(t, y1), b = fit_exponential_rate(t, y2);
    EXPECT_NEAR(a.rate, 0.7, 1e-9);
    EXPECT_NEAR(a.rate, b.rate, 1e-12);
    EXPECT_NEAR(b.intercept - a.intercept, std::log(4e9), 1e-9);
}

TEST(FitRate, FloorCutsSeries) {
    const auto t = linspace(0.0, 10.0, 21);
    std::vector<double> y;
    for (double s : t) y.push_back(s < 6.0 ? std::exp(-s) : 1e-16);
    FitOptions opt;
    opt.floor = 1e-12;
    const RateFit f = fit_exponential_rate(t, y, opt);
    EXPECT_NEAR(f.rate, 1.0, 1e-10);
    EXPECT_LT(f.t_end, 6.0);
    EXPECT_EQ(f.points_used, 6u);  // ceil(12 / 2)
}

TEST(FitRate, LeadingSamplesBelowFloorSkipped) {
    const auto t = linspace(0.0, 10.0, 21);
    std::vector<double> y;
    for (double s : t) y.push_back(s < 1.0 ? 0.0 : std::exp(-0.5 * s));
    FitOptions opt;
    opt.floor = 1e-12;
    const RateFit f = fit_exponential_rate(t, y, opt);
    EXPECT_NEAR(f.rate, 0.5, 1e-10);
    EXPECT_EQ(f.points_used, 10u);  // 19 usable from t = 1
}

TEST(FitRate, InsufficientData) {
    const std::vector<double> t = {0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y = {1.0, 0.5, 0.0, 0.0};
    try {
        fit_exponential_rate(t, y);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InsufficientData);
    }
    EXPECT_THROW(fit_exponential_rate(std::vector<double>{0, 1}, std::vector<double>{1, 2, 3}), Error);
}

TEST(CompareRates, ThresholdArithmetic) {
    const RateBounds b = theoretical_rates(1.0, 3.0);  // w bound 1.5
    std::array<RateFit, 4> fits{};
    for (int i = 0; i < 4; ++i) {
        fits[i].rate = 10.0;
        fits[i].r_squared = 1.0;
    }
    fits[2].rate = 3.0;
    EXPECT_TRUE(compare_rates(fits, b, 0.0)[2].pass);

    fits[0].rate = 0.9 * b.u;
    fits[0].r_squared = 0.5;
    const auto v = compare_rates(fits, b, 0.05);
    EXPECT_FALSE(v[0].pass);
    EXPECT_TRUE(v[0].non_exponential_tail);
    EXPECT_EQ(v[0].bound, b.u);
    EXPECT_THROW(compare_rates(fits, b, 0.5), Error);
}

TEST(CompareRates, MonotoneInSlack) {
    const RateBounds b = theoretical_rates(1.0, 1.0);
    std::array<RateFit, 4> fits{};
    for (int i = 0; i < 4; ++i) fits[i].rate = (0.6 + 0.1 * i) * b[i];
    for (int i = 0; i < 4; ++i) {
        bool seen_pass = false;
        for (double s = 0.0; s < 0.5; s += 0.01) {
            const bool p = compare_rates(fits, b, s)[i].pass;
            if (seen_pass) {
                EXPECT_TRUE(p);
            }
            seen_pass = seen_pass || p;
        }
    }
}

TEST(EnvelopeCheck, ClosedFormPassesZeroFailsMonotone) {
    const double c = 1.0, vb = 1.0, wb = 0.5;
    const TimeSeries ts = constant_closed_form_series(c, vb, wb, 0.0);
    const RateBounds b = theoretical_rates(1.0, c);
    const EnvelopeBounds env = constant_envelope(c, vb, wb);
    const EnvelopeVerdict v = envelope_check(ts, env, b);
    EXPECT_TRUE(v.all_pass());
    EXPECT_EQ(v.samples_checked, ts.size());

    EnvelopeBounds zero = env;
    for (double& m : zero.m) m = 0.0;
    const EnvelopeVerdict z = envelope_check(ts, zero, b);
    EXPECT_FALSE(z.pass[1]);
    EXPECT_FALSE(z.pass[2]);
    EXPECT_TRUE(z.pass[0]);  // distance is exactly 0

    // scaling m up never turns a pass into a fail
    for (double scale : {1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0}) {
        EnvelopeBounds lo = env, hi = env;
        for (int f = 0; f < 4; ++f) {
            lo.m[f] *= scale;
            hi.m[f] *= 2 * scale;
        }
        const auto vl = envelope_check(ts, lo, b), vh = envelope_check(ts, hi, b);
        for (int f = 0; f < 4; ++f) {
            if (vl.pass[f]) {
                EXPECT_TRUE(vh.pass[f]);
            }
            EXPECT_GE(vh.worst_margin[f], vl.worst_margin[f]);
        }
    }
}

TEST(EnvelopeCheck, NotApplicableWithoutT0) {
    TimeSeries ts = constant_closed_form_series(1.0, 1.0, 0.5, 0.0);
    ts.t0.reset();
    const EnvelopeVerdict v = envelope_check(ts, constant_envelope(1.0, 1.0, 0.5), theoretical_rates(1.0, 1.0));
    EXPECT_FALSE(v.applicable);
    EXPECT_FALSE(v.all_pass());
}

TEST(FitRate, ConstantDataRunRecoversUbar0) {
    const Domain d(std::numbers::pi, 16);
    const double ubar0 = 1.0;
    double prev = 1.0;
    for (double dt : {1e-2, 1e-3}) {
        SolverConfig cfg;
        cfg.t_end = 10.0;
        cfg.dt_max = dt;
        cfg.sample_every = 0.25;
        const RunResult r = run(FieldQuad::constant(d, ubar0, 1.0, 0.5, ubar0), cfg);
        FitOptions opt;
        opt.floor = 1e-10 * r.series.dist[2].front();
        const RateFit f = fit_exponential_rate(r.series.times, r.series.dist[2], opt);
        const double err = std::abs(f.rate - ubar0) / ubar0;
        EXPECT_LT(err, 0.02) << "dt=" << dt;
        EXPECT_LE(err, prev + 1e-9);
        prev = err;
    }
}
