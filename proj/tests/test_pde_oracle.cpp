#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace wavefront;
using wavefront::testing::c_star;
using wavefront::testing::ref;
using wavefront::testing::solved;

TEST(PdeOracle, EquilibriaStay) {
    for (double level : {0.0, 0.53}) {
        SimConfig cfg;
        cfg.length = 20.0;
        cfg.t_end = 20.0;
        cfg.history = [level](double, double) { return level; };
        const auto rec = simulate(ref(), 2.0, cfg);
        for (double v : rec.final_state) EXPECT_NEAR(v, level, 1e-12);
        EXPECT_THROW(measure_front_speed(rec), Error);
    }
}

TEST(PdeOracle, ValidatesConfig) {
    SimConfig cfg;
    cfg.history = step_history(0.53, 10.0);
    cfg.dt = 0.006;  // above dx^2/2
    EXPECT_THROW(simulate(ref(), 2.0, cfg), Error);
    cfg.dt = 0.003;  // does not divide h = 2
    EXPECT_THROW(simulate(ref(), 2.0, cfg), Error);
    cfg.dt = 0.004;
    cfg.history = nullptr;
    EXPECT_THROW(simulate(ref(), 2.0, cfg), Error);
    try {
        cfg.dt = 0.006;
        cfg.history = step_history(0.53, 10.0);
        simulate(ref(), 2.0, cfg);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::invalid_config);
    }
}

TEST(PdeOracle, DetectsBlowUp) {
    SimConfig cfg;
    cfg.length = 10.0;
    cfg.t_end = 5.0;
    cfg.history = [](double, double) { return 5.0; };  // far outside [0, g(theta)]
    EXPECT_THROW(simulate(ref(), 2.0, cfg), Error);
}

TEST(PdeOracle, StepDataSpreadsNearMinimalSpeed) {
    SimConfig cfg;
    cfg.keep_snapshots = false;
    cfg.history = step_history(ref().kappa(), 50.0);
    const auto rec = simulate(ref(), 2.0, cfg);
    const double speed = measure_front_speed(rec);
    EXPECT_NEAR(speed / c_star(), 1.0, 0.05);
    // the front moves right
    EXPECT_GT(*rec.front.back(), *rec.front[rec.front.size() / 2]);
}

TEST(PdeOracle, RefinementChangesSpeedLittle) {
    SimConfig a;
    a.length = 200.0;
    a.t_end = 150.0;
    a.keep_snapshots = false;
    a.history = step_history(ref().kappa(), 30.0);
    SimConfig b = a;
    b.dx = 0.05;
    b.dt = 0.001;
    const double sa = measure_front_speed(simulate(ref(), 2.0, a));
    const double sb = measure_front_speed(simulate(ref(), 2.0, b));
    EXPECT_LT(std::abs(sa / sb - 1.0), 0.01);
}

TEST(PdeOracle, ProfileSeededRunKeepsShape) {
    const double c = c_star();
    const auto& s = solved(c);
    const double x0 = 100.0;
    SimConfig cfg;
    cfg.t_end = 100.0;
    cfg.history = [&](double t, double x) { return s.phi(c * t - (x - x0)); };
    const auto rec = simulate(ref(), 2.0, cfg);
    EXPECT_NEAR(measure_front_speed(rec) / c, 1.0, 0.02);
    const double xf = rec.front.back().value();
    EXPECT_NEAR(xf, x0 + c * cfg.t_end, 0.02 * c * cfg.t_end);
    double err = 0.0;
    for (std::size_t i = 0; i < rec.x.size(); ++i) err = std::max(err, std::abs(rec.final_state[i] - s.phi(xf - rec.x[i])));
    EXPECT_LT(err, 0.02 * ref().g_theta());
}

TEST(PdeOracle, FrontPosition) {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> u{0.5, 0.4, 0.2, 0.0};
    EXPECT_NEAR(*front_position(u, x, 0.3), 1.5, 1e-15);
    EXPECT_FALSE(front_position(u, x, 0.9).has_value());
}
