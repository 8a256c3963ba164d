#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wavefront/interval_map.hpp"

using namespace wavefront;

namespace {

IntervalMap zigzag() {
    // 0 -> 0.2 -> 1 -> 0.4 on [0, 1], breakpoints 0.3 and 0.6.
    return IntervalMap({{0.0, 0.3, 0.2 / 0.3, 0.0}, {0.3, 0.6, 0.8 / 0.3, 0.2 - 0.8}, {0.6, 1.0, -1.5, 1.9}});
}

}  // namespace

TEST(IntervalMap, EvaluatesPiecesAndBreakpoints) {
    const auto m = zigzag();
    EXPECT_NEAR(m(0.0), 0.0, 1e-15);
    EXPECT_NEAR(m(0.3), 0.2, 1e-15);
    EXPECT_NEAR(m(0.6), 1.0, 1e-15);
    EXPECT_NEAR(m(1.0), 0.4, 1e-15);
    EXPECT_EQ(m.breakpoints().size(), 4u);
    EXPECT_THROW(m(1.5), Error);
}

TEST(IntervalMap, RejectsDiscontinuousPieces) {
    EXPECT_THROW(IntervalMap({{0.0, 0.5, 1.0, 0.0}, {0.5, 1.0, 1.0, 0.1}}), Error);
    EXPECT_THROW(IntervalMap({{0.0, 0.5, 1.0, 0.0}, {0.6, 1.0, 1.0, 0.0}}), Error);
    EXPECT_THROW(IntervalMap(std::vector<AffinePiece>{}), Error);
}

TEST(IntervalMap, ImageAndInvariance) {
    const auto m = zigzag();
    const auto [lo, hi] = m.image();
    EXPECT_DOUBLE_EQ(lo, 0.0);
    EXPECT_DOUBLE_EQ(hi, 1.0);
    EXPECT_TRUE(m.maps_into_itself());
    EXPECT_NEAR(m.max_abs_slope(), 0.8 / 0.3, 1e-14);
}

TEST(IntervalMap, ComposeIdentityIsIdentity) {
    const auto id = IntervalMap::identity(0.0, 1.0);
    const auto c = compose(id, id);
    for (double x = 0.0; x <= 1.0; x += 0.05) EXPECT_NEAR(c(x), x, 1e-15);
    EXPECT_EQ(c.pieces().size(), 1u);
}

TEST(IntervalMap, ComposeMatchesPointwise) {
    const auto m = zigzag();
    const auto mm = compose(m, m);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng);
        EXPECT_NEAR(mm(x), m(m(x)), 1e-13);
    }
}

TEST(IntervalMap, ComposeThrowsWhenImageEscapes) {
    const auto outer = IntervalMap::identity(0.0, 0.5);
    EXPECT_THROW(compose(outer, zigzag()), Error);
}

TEST(IntervalMap, InverseOfMonotoneMap) {
    const IntervalMap m({{0.0, 1.0, 2.0, 0.0}, {1.0, 2.0, 0.5, 1.5}});
    const auto inv = m.inverse();
    for (double x = 0.0; x <= 2.0; x += 0.1) EXPECT_NEAR(inv(m(x)), x, 1e-14);
    const IntervalMap dec({{0.0, 1.0, -1.0, 3.0}, {1.0, 2.0, -2.0, 4.0}});
    const auto dinv = dec.inverse();
    for (double x = 0.0; x <= 2.0; x += 0.1) EXPECT_NEAR(dinv(dec(x)), x, 1e-14);
    EXPECT_THROW(zigzag().inverse(), Error);
}

TEST(IntervalMap, FixedPoints) {
    const auto fps = zigzag().fixed_points();
    // 0 on the first piece, 0.6/(5/3) = 0.36 on the middle one, 1.9/2.5 = 0.76 on the last.
    ASSERT_EQ(fps.size(), 3u);
    EXPECT_NEAR(fps[0], 0.0, 1e-15);
    EXPECT_NEAR(fps[1], 0.36, 1e-14);
    EXPECT_NEAR(fps[2], 0.76, 1e-14);
}

TEST(IntervalMap, LinearCombinationAndScaling) {
    const auto m = zigzag();
    const auto id = IntervalMap::identity(0.0, 1.0);
    const auto d = linear_combination(id, 1.0, m, -1.0);
    const auto s = scaled(m, 0.5);
    for (double x = 0.0; x <= 1.0; x += 0.01) {
        EXPECT_NEAR(d(x), x - m(x), 1e-14);
        EXPECT_NEAR(s(x), 0.5 * m(x), 1e-15);
    }
}

TEST(IntervalMap, RestrictedKeepsValues) {
    const auto m = zigzag();
    const auto r = m.restricted(0.25, 0.7);
    EXPECT_DOUBLE_EQ(r.lo(), 0.25);
    EXPECT_DOUBLE_EQ(r.hi(), 0.7);
    for (double x = 0.25; x <= 0.7; x += 0.01) EXPECT_NEAR(r(x), m(x), 1e-15);
    EXPECT_THROW(m.restricted(-0.1, 0.5), Error);
}
