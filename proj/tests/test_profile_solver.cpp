#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "wavefront/oracles.hpp"

using namespace wavefront;
using wavefront::testing::c_star;
using wavefront::testing::c_star2;
using wavefront::testing::ref;
using wavefront::testing::solved;

namespace {

WaveProfile constant_profile(double level) {
    WaveProfile phi;
    phi.t0 = -100.0;
    phi.dt = 0.1;
    phi.values.assign(1501, level);
    phi.left.rate = 1e-13;  // flat to within 1e-11 over the grid
    phi.left.a = level;
    phi.left.anchor = phi.t0;
    phi.right.base = level;
    phi.right.anchor = phi.t_end();
    return phi;
}

}  // namespace

TEST(ProfileSolver, EquilibriaAreFixed) {
    const auto ctx = make_context(ref(), 2.0, 0.73);
    // kappa is an equilibrium, but a constant kappa profile has no front and is rejected
    try {
        apply_operator(ctx, constant_profile(ref().kappa()));
        ADD_FAILURE() << "constant kappa accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::out_of_range);
    }
    const auto z = constant_profile(0.0);
    for (double v : apply_operator(ctx, z)) EXPECT_EQ(v, 0.0);
}

TEST(ProfileSolver, OperatorMatchesQuadrature) {
    std::mt19937_64 rng(99);
    for (double c : {c_star(), 0.73, 0.8}) {
        const auto ctx = make_context(ref(), 2.0, c);
        for (int k = 0; k < 10; ++k) {
            const auto phi = oracle::random_profile(ctx, rng);
            const auto a = apply_operator(ctx, phi);
            for (std::size_t i = 0; i < phi.size(); i += 3) {
                EXPECT_NEAR(a[i], oracle::operator_at(ctx, phi, phi.node(i)), 1e-10);
            }
        }
    }
}

TEST(ProfileSolver, OperatorRejectsGrowingTail) {
    const auto ctx = make_context(ref(), 2.0, 0.73);
    auto phi = constant_profile(0.1);
    phi.left.rate = -0.5;
    EXPECT_THROW(apply_operator(ctx, phi), Error);
}

TEST(ProfileSolver, MinimalFront) {
    const auto& s = solved(c_star());
    const auto& phi = s.phi;
    EXPECT_TRUE(phi.converged);
    EXPECT_LT(phi.residual, 1e-8 * ref().g_theta());
    EXPECT_NEAR(phi(0.0), ref().theta(), 1e-12);
    EXPECT_GT(phi(s.ctx.tau), ref().kappa());
    EXPECT_NEAR(phi(s.ctx.tau), 0.591835, 1e-5);
    EXPECT_TRUE(first_local_max(phi).has_value());
    // fixed point of A up to the O(dt^2) translation of the discrete operator
    EXPECT_LT(fixed_point_residual(s.ctx, phi), 1e-5);
    for (double v : phi.values) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, ref().g_theta());
    }
}

TEST(ProfileSolver, OscillatingFront) {
    const auto& s = solved(0.8);
    const auto& phi = s.phi;
    EXPECT_TRUE(phi.right.oscillatory());
    EXPECT_NEAR(phi.right.rate.real(), -1.415294, 1e-6);
    // decaying oscillation about kappa
    double prev = 1e300;
    for (int k = 1; k <= 4; ++k) {
        const double t = phi.t_end() + k * std::numbers::pi / std::abs(phi.right.rate.imag());
        const double dev = std::abs(phi.deviation(t, ref().kappa()));
        EXPECT_LT(dev, prev);
        prev = dev;
    }
}

TEST(ProfileSolver, MonotoneSanityCase) {
    const auto g = PiecewiseLinearBirth::two_segment(2.0, 0.3, 0.5);
    const auto ctx = make_context(g, 1.0, 1.0);
    const auto phi = solve_profile(ctx);
    for (std::size_t i = 1; i < phi.size(); ++i) {
        if (g.kappa() - phi.values[i] < 1e-12) break;  // resolution floor at kappa
        EXPECT_GT(phi.values[i], phi.values[i - 1]) << phi.node(i);
    }
}

TEST(ProfileSolver, RefusesOutsideRegion) {
    const auto ctx = make_context(ref(), 2.0, 0.5);
    try {
        solve_profile(ctx);
        FAIL() << "expected NotInDomain";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::not_in_domain);
    }
}

TEST(ProfileSolver, ReportsNoConvergence) {
    const auto ctx = make_context(ref(), 2.0, 0.73);
    SolveOptions opts;
    opts.max_iter = 3;
    try {
        solve_profile(ctx, opts);
        FAIL() << "expected NoConvergence";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::no_convergence);
    }
}

TEST(ProfileSolver, OdeResidual) {
    const auto ctx = make_context(ref(), 2.0, 0.73);
    EXPECT_LT(residual_ode(ctx, constant_profile(ref().kappa())), 1e-10);

    SolveOptions coarse, fine;
    coarse.dt = 0.01;
    fine.dt = 0.005;
    const auto a = solve_profile(ctx, coarse);
    const auto b = solve_profile(ctx, fine);
    const double ra = residual_ode(ctx, a), rb = residual_ode(ctx, b);
    EXPECT_LT(rb, 1e-4 * ref().g_theta());
    EXPECT_GT(ra / rb, 2.8);  // second order
    EXPECT_GT(a.raw_residual / b.raw_residual, 2.8);

    std::mt19937_64 rng(5);
    EXPECT_GT(residual_ode(ctx, oracle::random_profile(ctx, rng)), 1e-2);
}

TEST(ProfileSolver, TailCoefficientsAtMinimalSpeed) {
    const auto& s = solved(c_star());
    const auto q = estimate_tail_coeffs(s.ctx, s.phi);
    EXPECT_TRUE(q.double_root);
    EXPECT_NEAR(q.value, 0.12, 0.02);
    EXPECT_GT(q.value, 0.0);
    EXPECT_LE(q.value, 0.135);
    EXPECT_TRUE(q.within_bounds);
    EXPECT_THROW(estimate_tail_coeffs(s.ctx, s.phi, TailFit::distinct), Error);
}

TEST(ProfileSolver, TailCoefficientsDistinctRoots) {
    const auto& s = solved(0.73);
    const auto p = estimate_tail_coeffs(s.ctx, s.phi);
    EXPECT_FALSE(p.double_root);
    EXPECT_GT(p.value, ref().theta());
    EXPECT_TRUE(p.within_bounds);
    EXPECT_THROW(estimate_tail_coeffs(s.ctx, s.phi, TailFit::double_root), Error);
}

TEST(ProfileSolver, TailFitRoundTrip) {
    const auto ctx = make_context(ref(), 2.0, 0.73);
    const double mu1 = *ctx.mu1, mu2 = *ctx.mu2, theta = ref().theta(), p = 0.4567;
    WaveProfile phi;
    phi.t0 = -30.0;
    phi.dt = 0.01;
    for (int i = 0; i <= 4000; ++i) {
        const double t = phi.t0 + i * phi.dt;
        phi.values.push_back(t <= 0.0 ? p * std::exp(mu2 * t) + (theta - p) * std::exp(mu1 * t) : theta);
    }
    EXPECT_NEAR(estimate_tail_coeffs(ctx, phi).value, p, 1e-8);
}

TEST(ProfileSolver, FrontInequalities) {
    for (double c : {c_star(), 0.73, c_star2()}) {
        const auto& s = solved(c);
        const auto r = check_front_inequalities(s.ctx, s.phi);
        EXPECT_TRUE(r.all_hold) << c;
        EXPECT_TRUE(r.phi_at_ch_above_kappa) << c;
        EXPECT_GT(r.gamma, ref().kappa());
    }
    const auto ctx = make_context(ref(), 2.0, 0.73);
    EXPECT_TRUE(check_front_inequalities(ctx, constant_profile(ref().kappa())).derivative_ok);
}
