#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chemolab/semigroup.hpp"

using namespace chemolab;
using std::numbers::pi;

namespace {

GridField random_field(const Domain& d, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    GridField f(d);
    for (double& v : f.values) v = dist(gen);
    return f;
}

}  // namespace

TEST(HeatPropagate, ConstantAndEigenmode) {
    for (const Domain& d : {Domain(pi, 64), Domain(pi, pi / 2, 16, 8)}) {
        const GridField c = heat_propagate(GridField(d, 2.0), 3.0);
        for (double v : c.values) EXPECT_NEAR(v, 2.0, 1e-13);
        const GridField mode = cosine_mode(d, 1);
        const GridField p = heat_propagate(mode, 1.0);
        const double decay = std::exp(-stencil_eigenvalue(1, d.cells(0), d.spacing(0)));
        for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(p[k], decay * mode[k], 1e-13);
    }
}

TEST(HeatPropagate, SemigroupContractionMean) {
    for (const Domain& d : {Domain(pi, 48), Domain(pi, pi / 2, 12, 10)}) {
        const GridField f = random_field(d, 9);
        const HeatPropagator heat(d);
        const GridField a = heat.propagate(heat.propagate(f, 0.3), 0.45);
        const GridField b = heat.propagate(f, 0.75);
        for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-10);
        EXPECT_LE(lp_norm(b, 2), lp_norm(f, 2));
        EXPECT_NEAR(mean(b), mean(f), 1e-15);
    }
}

TEST(HeatPropagate, MatchesBackwardEulerAsDtShrinks) {
    const Domain d(pi, 32);
    GridField f = random_field(d, 4);
    const double T = 0.2;
    const GridField exact = heat_propagate(f, T);
    double prev = 1.0;
    for (double dt : {1e-2, 1e-3, 1e-4}) {
        GridField x = f;
        const int steps = static_cast<int>(std::lround(T / dt));
        for (int s = 0; s < steps; ++s) x = solve_helmholtz(dt, x);
        double err = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) err = std::max(err, std::abs(x[k] - exact[k]));
        EXPECT_LT(err, prev);
        EXPECT_LT(err, 5.0 * dt);
        prev = err;
    }
}

TEST(SmoothingKind, ExponentRules) {
    EXPECT_NO_THROW((SmoothingEstimateKind{SmoothingKind::MeanZero, infinity, 1.0}.validate()));
    EXPECT_THROW((SmoothingEstimateKind{SmoothingKind::MeanZero, 1.0, 2.0}.validate()), Error);
    EXPECT_THROW((SmoothingEstimateKind{SmoothingKind::GradientFromGradient, 3.0, 1.0}.validate()), Error);
    EXPECT_THROW((SmoothingEstimateKind{SmoothingKind::GradientFromGradient, infinity, 2.0}.validate()), Error);
    EXPECT_THROW((SmoothingEstimateKind{SmoothingKind::Divergence, 2.0, 1.0}.validate()), Error);
    EXPECT_NEAR((SmoothingEstimateKind{SmoothingKind::Gradient, 4.0, 2.0}.power(2)), 0.5 + 0.25, 1e-15);
    EXPECT_NEAR((SmoothingEstimateKind{SmoothingKind::Divergence, infinity, 3.0}.power(1)), 0.5 + 1.0 / 6.0, 1e-15);
}

TEST(SmoothingRatio, FirstModeGivesHalf) {
    const Domain d(pi, 64);
    const HeatPropagator heat(d);
    SmoothingTestField f;
    f.scalar = cosine_mode(d, 1);
    for (double p : {2.0, 4.0, infinity}) {
        for (double t : {0.01, 1.0, 7.0}) {
            const double r = smoothing_ratio({SmoothingKind::MeanZero, p, p}, f, t, heat, lambda1_discrete(d));
            EXPECT_NEAR(r, 0.5, 1e-12);
        }
    }
}

TEST(SmoothingRatio, RejectsNonMeanZeroForKindI) {
    const Domain d(pi, 32);
    SmoothingTestField f;
    f.scalar = GridField(d, 1.0);
    EXPECT_THROW(smoothing_ratio({SmoothingKind::MeanZero, 2, 2}, f, 1.0, HeatPropagator(d), 1.0), Error);
}

TEST(EstimateK, FiniteAndSampleStable) {
    const std::vector<SmoothingEstimateKind> kinds = {
        {SmoothingKind::MeanZero, 2.0, 2.0},
        {SmoothingKind::Gradient, 3.0, 3.0},
        {SmoothingKind::GradientFromGradient, 3.0, 2.0},
        {SmoothingKind::Divergence, infinity, 3.0},
    };
    for (const Domain& d : {Domain(pi, 32), Domain(pi, pi / 2, 16, 8)}) {
        const auto tg = default_t_grid(lambda1_discrete(d));
        for (const auto& k : kinds) {
            const auto a = estimate_k(k, d, 100, tg, 42);
            const auto b = estimate_k(k, d, 200, tg, 42);
            EXPECT_TRUE(std::isfinite(a.estimated_constant));
            EXPECT_GT(a.estimated_constant, 0.0);
            EXPECT_LT(std::abs(b.estimated_constant - a.estimated_constant) / a.estimated_constant, 0.1)
                << to_string(k.kind);
            if (k.kind == SmoothingKind::MeanZero) {
                EXPECT_GE(a.estimated_constant, 0.5 - 1e-12);
            }
        }
    }
}

TEST(EstimateK, DeterministicForSeed) {
    const Domain d(pi, 16);
    const auto tg = default_t_grid(1.0, 10);
    const auto a = estimate_k({SmoothingKind::Divergence, 4.0, 2.0}, d, 50, tg, 7);
    const auto b = estimate_k({SmoothingKind::Divergence, 4.0, 2.0}, d, 50, tg, 7);
    EXPECT_EQ(a.estimated_constant, b.estimated_constant);
    EXPECT_EQ(a.worst_field, b.worst_field);
}

TEST(DefaultTGrid, Endpoints) {
    const auto t = default_t_grid(2.0);
    ASSERT_EQ(t.size(), 40u);
    EXPECT_NEAR(t.front(), 5e-4, 1e-18);
    EXPECT_NEAR(t.back(), 10.0, 1e-12);
}

TEST(ConvolutionBound, ClosedFormCase) {
    // integral = 4 (e^{-t} - e^{-2t}); ratio = 2 (1 - e^{-t}) -> 2
    EXPECT_NEAR(convolution_ratio_at(0, 0, 2, 1, 1.5), 2.0 * (1.0 - std::exp(-1.5)), 1e-12);
    const auto r = convolution_bound_ratio(0, 0, 2, 1);
    EXPECT_NEAR(r.sup_ratio, 2.0, 1e-4);
}

TEST(ConvolutionBound, SingularCaseFiniteAndStable) {
    ConvolutionOptions coarse, fine;
    coarse.panels = 32;
    fine.panels = 64;
    const auto a = convolution_bound_ratio(0.5, 0.5, 1.0, 0.3, coarse);
    const auto b = convolution_bound_ratio(0.5, 0.5, 1.0, 0.3, fine);
    EXPECT_TRUE(std::isfinite(a.sup_ratio));
    EXPECT_LT(std::abs(a.sup_ratio - b.sup_ratio) / b.sup_ratio, 0.01);
}

TEST(ConvolutionBound, HorizonInvariance) {
    ConvolutionOptions h1, h2;
    h1.horizon = 20.0 / 0.3;
    h2.horizon = 40.0 / 0.3;
    const auto a = convolution_bound_ratio(0.5, 0.5, 1.0, 0.3, h1);
    const auto b = convolution_bound_ratio(0.5, 0.5, 1.0, 0.3, h2);
    EXPECT_NEAR(a.sup_ratio, b.sup_ratio, 1e-6 * b.sup_ratio);
}

TEST(ConvolutionBound, Preconditions) {
    EXPECT_THROW(convolution_bound_ratio(0, 0, 1, 1), Error);
    EXPECT_THROW(convolution_bound_ratio(1.0, 0, 2, 1), Error);
    EXPECT_THROW(convolution_bound_ratio(0, 0, -1, 1), Error);
}
