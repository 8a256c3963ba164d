#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wavefront/birth_model.hpp"
#include "wavefront/char_spectrum.hpp"
#include "wavefront/error.hpp"
#include "wavefront/interval_map.hpp"

namespace wavefront {

/// map restricted to [a, b]; invariance checked on breakpoint images.
inline IntervalMap restrict_map(const IntervalMap& m, double a, double b) {
    IntervalMap r = m.restricted(a, b);
    const double tol = 1e-12 * std::max(1.0, std::abs(b));
    for (const auto& p : r.pieces()) {
        for (double x : {p.lo, p.hi}) {
            const double y = p(x);
            if (y < a - tol || y > b + tol) {
                std::ostringstream os;
                os << "map(" << x << ") = " << y << " leaves [" << a << ", " << b << "]";
                throw Error(ErrorCode::not_invariant, os.str());
            }
        }
    }
    return r;
}

/// g on [g^2(theta), g(theta)] with fixed point kappa.
inline IntervalMap restrict_g(const PiecewiseLinearBirth& g) {
    if (!(g.g2_theta() <= g.kappa() && g.kappa() <= g.g_theta())) {
        throw Error(ErrorCode::not_invariant, "kappa outside [g^2(theta), g(theta)]");
    }
    IntervalMap m = restrict_map(g.as_map(g.g2_theta(), g.g_theta()), g.g2_theta(), g.g_theta());
    m.set_fixed_point(g.kappa());
    return m;
}

struct SigmaMap {
    IntervalMap sigma;  // on [g^2(theta), g(theta)]
    IntervalMap psi;    // inverse of the decreasing branch, [g^2(theta), g(theta)] -> [theta, g(theta)]
    IntervalMap zeta;   // x - psi(x)
    double xi = 1.0;
    std::vector<double> fixed_points;
};

/// sigma(x) = zeta^{-1}((1 - xi) g(x)), zeta(x) = x - psi(x). Every step is an
/// exact affine composition, so sigma stays piecewise linear.
inline SigmaMap build_sigma(const PiecewiseLinearBirth& g, double h, double c) {
    const double a = g.g2_theta();
    const double b = g.g_theta();
    SigmaMap out{IntervalMap::identity(a, b), IntervalMap::identity(a, b), IntervalMap::identity(a, b), 1.0, {}};
    out.xi = xi(h, c);

    // g is decreasing on [theta, g(theta)] and maps it onto [g^2(theta), g(theta)].
    out.psi = g.as_map(g.theta(), g.g_theta()).inverse();
    out.zeta = linear_combination(IntervalMap::identity(a, b), 1.0, out.psi, -1.0);
    const IntervalMap zeta_inv = out.zeta.inverse();

    const IntervalMap scaled_g = scaled(g.as_map(a, b), 1.0 - out.xi);
    const double zlo = zeta_inv.lo(), zhi = zeta_inv.hi();
    const double tol = 1e-12 * std::max(1.0, std::abs(zhi - zlo));
    for (double x : scaled_g.breakpoints()) {
        const double y = scaled_g(x);
        if (y < zlo - tol || y > zhi + tol) {
            std::ostringstream os;
            os << "(1 - xi) g(" << x << ") = " << y << " outside the range [" << zlo << ", " << zhi << "] of zeta";
            throw Error(ErrorCode::out_of_range, os.str());
        }
    }
    out.sigma = compose(zeta_inv, scaled_g);
    out.fixed_points = out.sigma.fixed_points();
    return out;
}

/// x0 followed by n forward iterates (n + 1 values).
inline std::vector<double> iterate_orbit(const IntervalMap& m, double x0, std::size_t n) {
    std::vector<double> orbit;
    orbit.reserve(n + 1);
    orbit.push_back(x0);
    double x = x0;
    for (std::size_t i = 0; i < n; ++i) {
        x = m(x);
        orbit.push_back(x);
    }
    return orbit;
}

enum class GaVerdict { proved, sampled_only, failed };

constexpr std::string_view to_string(GaVerdict v) noexcept {
    switch (v) {
        case GaVerdict::proved: return "PROVED";
        case GaVerdict::sampled_only: return "SAMPLED-ONLY";
        case GaVerdict::failed: return "FAILED";
    }
    return "UNKNOWN";
}

struct GaReport {
    GaVerdict verdict = GaVerdict::failed;
    std::optional<double> fixed_point;
    std::optional<double> max_slope_second_iterate;
    bool invariant = false;
    std::optional<double> witness_start;
    std::vector<double> witness_orbit;  // short excerpt ending the failing orbit
    std::optional<int> witness_period;
    std::string detail;
};

struct GaOptions {
    std::size_t orbits = 10000;
    std::size_t orbit_length = 1000;
    double epsilon = 1e-9;
};

/// Global attractivity of the fixed point. PROVED when the map is invariant
/// and its exact second iterate is a contraction; otherwise falls back to a
/// deterministic grid of sampled orbits.
inline GaReport check_ga(const IntervalMap& m, const GaOptions& opts = {}) {
    GaReport rep;
    rep.fixed_point = m.fixed_point();
    if (!rep.fixed_point) {
        const auto fps = m.fixed_points();
        if (fps.size() == 1) rep.fixed_point = fps.front();
    }
    if (!rep.fixed_point) {
        rep.detail = "no unique fixed point";
        return rep;
    }
    const double kappa = *rep.fixed_point;

    rep.invariant = m.maps_into_itself();
    if (!rep.invariant) {
        for (double x : m.breakpoints()) {
            const double y = m(x);
            if (!m.contains(y, 1e-12)) {
                rep.witness_start = x;
                rep.witness_orbit = {x, y};
                break;
            }
        }
        rep.detail = "map does not send its domain into itself";
        return rep;
    }

    const IntervalMap second = compose(m, m);
    rep.max_slope_second_iterate = second.max_abs_slope();
    if (*rep.max_slope_second_iterate < 1.0) {
        rep.verdict = GaVerdict::proved;
        rep.detail = "second iterate is a contraction";
        return rep;
    }

    const double a = m.lo(), b = m.hi();
    for (std::size_t i = 0; i < opts.orbits; ++i) {
        const double x0 = a + (static_cast<double>(i) + 0.5) / static_cast<double>(opts.orbits) * (b - a);
        double x = x0;
        for (std::size_t n = 0; n < opts.orbit_length; ++n) x = m(x);
        if (std::abs(x - kappa) <= opts.epsilon) continue;

        rep.witness_start = x0;
        rep.witness_orbit = iterate_orbit(m, x, 4);
        for (int period = 1; period <= 8; ++period) {
            double y = x;
            for (int j = 0; j < period; ++j) y = m(y);
            if (std::abs(y - x) <= opts.epsilon) {
                rep.witness_period = period;
                break;
            }
        }
        std::ostringstream os;
        os << "orbit from " << x0 << " ends at " << x << ", distance " << std::abs(x - kappa) << " from " << kappa;
        if (rep.witness_period) os << " on a cycle of period " << *rep.witness_period;
        rep.detail = os.str();
        return rep;
    }
    rep.verdict = GaVerdict::sampled_only;
    rep.detail = "slope test inconclusive; all sampled orbits converge";
    return rep;
}

}  // namespace wavefront
