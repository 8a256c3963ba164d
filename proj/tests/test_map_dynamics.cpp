#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace wavefront;
using wavefront::testing::ref;

namespace {

template <typename F>
double bisect(F f, double a, double b) {
    double fa = f(a);
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + b), fm = f(m);
        if ((fa <= 0.0) == (fm <= 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST(MapDynamics, RestrictedG) {
    const auto m = restrict_g(ref());
    EXPECT_NEAR(m.lo(), 0.4125, 1e-15);
    EXPECT_NEAR(m.hi(), 1.0, 1e-15);
    EXPECT_TRUE(m.maps_into_itself());
    EXPECT_NEAR(m(0.4125), 0.7625, 1e-15);
    EXPECT_NEAR(m(1.0), 0.4125, 1e-15);
    EXPECT_EQ(m.fixed_point(), 0.53);
    EXPECT_NO_THROW(restrict_map(IntervalMap::identity(0.0, 1.0), 0.2, 0.8));
    EXPECT_THROW(restrict_map(IntervalMap({{0.0, 1.0, -1.0, 1.0}}), 0.0, 0.3), Error);
}

TEST(MapDynamics, GlobalAttractivityProved) {
    const auto r = check_ga(restrict_g(ref()));
    EXPECT_EQ(r.verdict, GaVerdict::proved);
    ASSERT_TRUE(r.max_slope_second_iterate.has_value());
    EXPECT_NEAR(*r.max_slope_second_iterate, 0.75, 1e-12);
}

TEST(MapDynamics, ReflectionHasTwoCycles) {
    IntervalMap m({{0.0, 1.0, -1.0, 1.0}}, 0.5);
    const auto r = check_ga(m);
    EXPECT_EQ(r.verdict, GaVerdict::failed);
    ASSERT_TRUE(r.witness_period.has_value());
    EXPECT_EQ(*r.witness_period, 2);
}

TEST(MapDynamics, SteepTentSampledOnly) {
    // steep rise then a gentle fall through the fixed point 13/30
    IntervalMap m({{0.0, 0.1, 3.0, 0.3}, {0.1, 1.0, -0.5, 0.65}}, 0.65 / 1.5);
    EXPECT_GT(compose(m, m).max_abs_slope(), 1.0);
    const auto r = check_ga(m);
    EXPECT_EQ(r.verdict, GaVerdict::sampled_only);
    // orbit oracle
    for (double x0 = 0.0; x0 <= 1.0; x0 += 0.01) {
        const auto orbit = iterate_orbit(m, x0, 200);
        EXPECT_NEAR(orbit.back(), 0.65 / 1.5, 1e-9);
    }
}

TEST(MapDynamics, Orbits) {
    const auto m = restrict_g(ref());
    const auto fixed = iterate_orbit(m, 0.53, 10);
    ASSERT_EQ(fixed.size(), 11u);
    for (double x : fixed) EXPECT_NEAR(x, 0.53, 1e-15);
    const auto orbit = iterate_orbit(m, 1.0, 100);
    EXPECT_NEAR(orbit.back(), 0.53, 1e-9);
    for (double x : orbit) EXPECT_TRUE(m.contains(x, 1e-12));
}

TEST(MapDynamics, SigmaMatchesScalarRootBracketing) {
    const auto& g = ref();
    const auto s = build_sigma(g, 2.0, 0.73);
    EXPECT_NEAR(s.xi, xi(2.0, 0.73), 1e-15);
    EXPECT_NEAR(s.psi(g.kappa()), g.kappa(), 1e-12);
    auto psi = [&](double y) { return bisect([&](double x) { return y - g(x); }, g.theta(), g.g_theta()); };
    auto zeta = [&](double x) { return x - psi(x); };
    const double a = g.g2_theta(), b = g.g_theta();
    for (int i = 0; i < 100; ++i) {
        const double x = a + (b - a) * (i + 0.5) / 100.0;
        const double target = (1.0 - s.xi) * g(x);
        const double expected = bisect([&](double y) { return zeta(y) - target; }, a, b);
        EXPECT_NEAR(s.sigma(x), expected, 1e-10) << x;
        EXPECT_NEAR(s.psi(x), psi(x), 1e-12);
    }
    for (double x : s.sigma.breakpoints()) EXPECT_TRUE(s.sigma.contains(x));
}

TEST(MapDynamics, SigmaWithoutDelayIsConstant) {
    const auto s = build_sigma(ref(), 0.0, 0.73);
    EXPECT_NEAR(s.xi, 1.0, 1e-15);
    for (double x = 0.4125; x <= 1.0; x += 0.05) EXPECT_NEAR(s.sigma(x), ref().kappa(), 1e-12);
}
