#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "wavefront/oracles.hpp"

using namespace wavefront;
using wavefront::testing::c_star;
using wavefront::testing::ref;
using wavefront::testing::solved;

namespace {

/// Grid profile from a function, constant tails at the end values.
template <typename F>
WaveProfile sampled(F f, double t0, double t1, double dt) {
    WaveProfile phi;
    phi.t0 = t0;
    phi.dt = dt;
    const auto n = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
    for (std::size_t i = 0; i <= n; ++i) phi.values.push_back(f(t0 + static_cast<double>(i) * dt));
    phi.left.rate = 1.0;
    phi.left.a = phi.values.front();
    phi.left.anchor = t0;
    phi.right.base = phi.values.back();
    phi.right.anchor = phi.t_end();
    return phi;
}

}  // namespace

TEST(ShapeClassifier, CountSignChanges) {
    const std::vector<double> v{1.0, 0.0, -2.0, -1.0, 0.0, 3.0, 1e-20, -1.0};
    EXPECT_EQ(count_sign_changes(v), 3);
    EXPECT_EQ(count_sign_changes(v, 1e-12), 3);
    const std::vector<double> w{1.0, -1e-15, 1.0};
    EXPECT_EQ(count_sign_changes(w, 1e-12), 0);
    EXPECT_EQ(count_sign_changes(w), 2);
}

TEST(ShapeClassifier, TrivialSegments) {
    const auto ctx = make_context(ref(), 2.0, 0.73);
    const double k = ref().kappa();
    const auto above = sampled([&](double) { return k + 1.0; }, -10.0, 10.0, 0.01);
    EXPECT_EQ(sign_changes(ctx, above, 0.0), 0);
    const auto ramp = sampled([&](double t) { return k + 0.01 * t; }, -10.0, 10.0, 0.01);
    EXPECT_EQ(sign_changes(ctx, ramp, 0.5 * ctx.tau), 1);
}

TEST(ShapeClassifier, MatchesExhaustiveScan) {
    const auto ctx = make_context(ref(), 2.0, 0.8);
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 300; ++k) {
        const auto phi = oracle::random_profile(ctx, rng);
        std::uniform_real_distribution<double> pick(phi.t0, phi.t_end());
        const double t = pick(rng);
        const auto v = sc_samples(ctx, phi, t);
        double scale = 0.0;
        for (std::size_t i = 0; i + 1 < v.size(); ++i) scale = std::max(scale, std::abs(v[i]));
        EXPECT_EQ(sign_changes(ctx, phi, t), oracle::sign_changes_bruteforce(v, 1e-12 * scale));
    }
}

TEST(ShapeClassifier, BruteForceOracleOnSmallCases) {
    EXPECT_EQ(oracle::sign_changes_bruteforce({1.0, -1.0, 1.0, -1.0}, 0.0), 3);
    EXPECT_EQ(oracle::sign_changes_bruteforce({0.0, 0.0}, 0.0), 0);
    EXPECT_EQ(oracle::sign_changes_bruteforce({2.0, 0.0, 1.0, -3.0}, 0.5), 1);
}

TEST(ShapeClassifier, MinimalFrontEventuallyMonotone) {
    const auto& s = solved(c_star());
    const auto r = classify(s.ctx, s.phi);
    EXPECT_EQ(r.classification, Shape::eventually_monotone);
    EXPECT_EQ(r.local_maxima, 1);
    EXPECT_FALSE(r.crossings_unbounded);
    ASSERT_TRUE(r.tau1.has_value());
    EXPECT_NEAR(*r.tau1, 1.737, 2e-3);
}

TEST(ShapeClassifier, OscillatingFront) {
    const auto& s = solved(0.8);
    const auto r = classify(s.ctx, s.phi);
    EXPECT_EQ(r.classification, Shape::slowly_oscillating);
    EXPECT_TRUE(r.crossings_unbounded);
    ASSERT_GE(r.amplitude_after_crossing.size(), 10u);
    for (std::size_t i = 1; i < r.amplitude_after_crossing.size(); ++i) {
        EXPECT_LT(r.amplitude_after_crossing[i], r.amplitude_after_crossing[i - 1]);
    }
    for (const auto& sc : r.sc_sequence) {
        EXPECT_GE(sc.sc, 1);
        EXPECT_LE(sc.sc, 2);
    }
}

TEST(ShapeClassifier, MonotoneFront) {
    const auto g = PiecewiseLinearBirth::two_segment(2.0, 0.3, 0.5);
    const auto ctx = make_context(g, 1.0, 1.0);
    const auto phi = solve_profile(ctx);
    const auto r = classify(ctx, phi);
    EXPECT_EQ(r.classification, Shape::monotone);
    EXPECT_FALSE(r.tau1.has_value());
    const auto p2 = check_prop2(ctx, phi);
    EXPECT_TRUE(p2.holds);
    EXPECT_FALSE(p2.tau1.has_value());
}

TEST(ShapeClassifier, StableUnderRefinement) {
    const auto ctx = make_context(ref(), 2.0, 0.73);
    SolveOptions a, b;
    a.dt = 0.01;
    b.dt = 0.005;
    const auto ra = classify(ctx, solve_profile(ctx, a));
    const auto rb = classify(ctx, solve_profile(ctx, b));
    EXPECT_EQ(ra.classification, rb.classification);
    EXPECT_EQ(ra.local_maxima, rb.local_maxima);
    EXPECT_EQ(ra.local_minima, rb.local_minima);
}

TEST(ShapeClassifier, UnresolvedCrossingsAreInconclusive) {
    const auto ctx = make_context(ref(), 2.0, 0.73);
    const double k = ref().kappa();
    auto phi = sampled([&](double t) { return t < 0.0 ? k * std::exp(t) : k; }, -20.0, 20.0, 0.01);
    for (std::size_t i = 2100; i < 2110; ++i) phi.values[i] = k + (i % 2 ? 1e-3 : -1e-3);
    try {
        classify(ctx, phi);
        FAIL() << "expected Inconclusive";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::inconclusive);
    }
}

TEST(ShapeClassifier, LateEventIsInconclusive) {
    const auto ctx = make_context(ref(), 2.0, 0.73);
    const double k = ref().kappa();
    // overshoot with its peak at t = 9, one unit before the end of the grid
    auto phi = sampled(
        [&](double t) {
            const double base = k * (1.0 - std::exp(-(t + 20.0)));
            return t < 8.0 ? base : base + 0.05 * (t - 8.0) * std::exp(-(t - 8.0));
        },
        -20.0, 10.0, 0.01);
    EXPECT_THROW(classify(ctx, phi), Error);
}

TEST(ShapeClassifier, Prop2AtMinimalSpeed) {
    const auto& s = solved(c_star());
    const auto r = check_prop2(s.ctx, s.phi);
    EXPECT_TRUE(r.holds) << r.detail;
    EXPECT_NEAR(r.tau0, 0.0, 1e-9);
    ASSERT_TRUE(r.gap.has_value());
    EXPECT_GE(*r.gap, s.ctx.tau);
}

TEST(ShapeClassifier, Prop2GapViolation) {
    const auto ctx = make_context(ref(), 2.0, 0.73);
    const double th = ref().theta(), k = ref().kappa();
    // theta at 0, peak at 0.5 < ch, then down to kappa
    auto f = [&](double t) {
        if (t < 0.0) return th * std::exp(t);
        if (t < 0.5) return th + (0.9 - th) * t / 0.5;
        return k + (0.9 - k) * std::exp(-(t - 0.5));
    };
    const auto r = check_prop2(ctx, sampled(f, -20.0, 30.0, 0.01));
    EXPECT_FALSE(r.holds);
    EXPECT_FALSE(r.gap_at_least_delay);
    ASSERT_TRUE(r.gap.has_value());
    EXPECT_NEAR(*r.gap, 0.5, 0.02);
}
