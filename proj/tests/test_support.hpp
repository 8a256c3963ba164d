#pragma once

#include <map>

#include "wavefront/wavefront.hpp"

namespace wavefront::testing {

inline const PiecewiseLinearBirth& ref() {
    static const PiecewiseLinearBirth g = reference_birth();
    return g;
}

inline double c_star() {
    static const double c = critical_speed(3.0, 2.0, Branch::positive_double_root).c;
    return c;
}

inline double c_star2() {
    static const double c = critical_speed(-0.25, 2.0, Branch::negative_double_root).c;
    return c;
}

struct Solved {
    WaveContext ctx;
    WaveProfile phi;
};

/// Profiles of the reference model at h = 2, solved once per test binary.
inline const Solved& solved(double c) {
    static std::map<double, Solved> cache;
    auto it = cache.find(c);
    if (it == cache.end()) {
        auto ctx = make_context(ref(), 2.0, c);
        auto phi = solve_profile(ctx);
        it = cache.emplace(c, Solved{std::move(ctx), std::move(phi)}).first;
    }
    return it->second;
}

}  // namespace wavefront::testing
