#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wavefront/char_spectrum.hpp"
#include "wavefront/error.hpp"
#include "wavefront/profile_solver.hpp"

namespace wavefront {

/// Number of sign alternations in a sequence; entries with |v| <= zero_tol are skipped.
inline int count_sign_changes(std::span<const double> v, double zero_tol = 0.0) {
    int changes = 0;
    int last = 0;
    for (double x : v) {
        if (!(std::abs(x) > zero_tol)) continue;
        const int s = x > 0.0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

/// Samples of phi(t + s) - kappa on s in [-ch, 0] (step close to the grid
/// step), followed by phi'(t).
inline std::vector<double> sc_samples(const WaveContext& ctx, const WaveProfile& phi, double t) {
    if (!std::isfinite(t)) throw Error(ErrorCode::out_of_range, "sc needs a finite t");
    const double kappa = ctx.g.kappa();
    const auto n = static_cast<std::size_t>(std::max(1.0, std::round(ctx.tau / phi.dt)));
    std::vector<double> v;
    v.reserve(n + 2);
    for (std::size_t j = 0; j <= n; ++j) {
        const double s = t - ctx.tau + ctx.tau * static_cast<double>(j) / static_cast<double>(n);
        v.push_back(phi.deviation(s, kappa));
    }
    v.push_back(phi.derivative(t));
    return v;
}

/// sc of the segment phi(t + .) - kappa on [-ch, 0] with phi'(t) appended.
/// Zeros are judged relative to the segment's own scale, so decayed tails
/// keep their sign structure.
inline int sign_changes(const WaveContext& ctx, const WaveProfile& phi, double t) {
    const auto v = sc_samples(ctx, phi, t);
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) scale = std::max(scale, std::abs(v[i]));
    if (scale == 0.0) return 0;
    return count_sign_changes(v, 1e-12 * scale);
}

enum class Shape { monotone, eventually_monotone, slowly_oscillating, rapidly_oscillating };

constexpr std::string_view to_string(Shape s) noexcept {
    switch (s) {
        case Shape::monotone: return "monotone";
        case Shape::eventually_monotone: return "eventually-monotone";
        case Shape::slowly_oscillating: return "slowly-oscillating";
        case Shape::rapidly_oscillating: return "rapidly-oscillating";
    }
    return "unknown";
}

struct Extremum {
    double t;
    double value;
    bool maximum;
};

struct ScSample {
    double t;
    int sc;
};

struct ShapeReport {
    double tau0 = 0.0;
    std::optional<double> tau1;  // empty: +infinity
    std::vector<Extremum> extrema;
    std::vector<double> kappa_crossings;
    std::vector<double> amplitude_after_crossing;  // max |phi - kappa| up to the next crossing
    std::vector<ScSample> sc_sequence;
    Shape classification = Shape::monotone;
    bool crossings_unbounded = false;
    int local_maxima = 0;
    int local_minima = 0;
};

struct ClassifyOptions {
    double derivative_tol = 1e-9;
    int crossings_to_follow = 12;  // through the oscillatory tail
    int sc_samples_per_delay = 8;
};

namespace detail {

/// Zeros of Re[A e^{lambda u}] for u > 0: u_k = (pi/2 - arg A + k pi)/omega.
inline std::vector<double> tail_crossings(const RightTail& rt, int count) {
    std::vector<double> out;
    const double w = rt.rate.imag();
    if (w == 0.0 || rt.amplitude == std::complex<double>(0.0, 0.0)) return out;
    const double phase = std::arg(rt.amplitude);
    double u0 = (0.5 * std::numbers::pi - phase) / w;
    const double half = std::numbers::pi / std::abs(w);
    while (u0 <= 0.0) u0 += half;
    while (u0 - half > 0.0) u0 -= half;
    for (int k = 0; k < count; ++k) out.push_back(rt.anchor + u0 + k * half);
    return out;
}

/// Extrema of the tail: zeros of Re[lambda A e^{lambda u}].
inline std::vector<double> tail_extrema(const RightTail& rt, int count) {
    RightTail d = rt;
    d.amplitude = rt.rate * rt.amplitude;
    return tail_crossings(d, count);
}

}  // namespace detail

/// Shape of a converged profile.
inline ShapeReport classify(const WaveContext& ctx, const WaveProfile& phi, const ClassifyOptions& opts = {}) {
    ShapeReport rep;
    const double kappa = ctx.g.kappa();
    const double theta = ctx.g.theta();
    const double tau = ctx.tau;

    for (std::size_t i = 1; i < phi.size(); ++i) {
        if (phi.values[i - 1] < theta && phi.values[i] >= theta) {
            rep.tau0 = phi.node(i - 1) + (theta - phi.values[i - 1]) / (phi.values[i] - phi.values[i - 1]) * phi.dt;
            break;
        }
    }
    rep.tau1 = first_local_max(phi);

    // Grid extrema from sign changes of the central-difference derivative.
    bool monotone = true;
    for (std::size_t i = 1; i + 1 < phi.size(); ++i) {
        const double a = phi.node_derivative(i), b = phi.node_derivative(i + 1);
        if (a < -opts.derivative_tol) monotone = false;
        if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)) {
            const double t = phi.node(i) + a / (a - b) * phi.dt;
            rep.extrema.push_back({t, phi(t), a > 0.0});
        }
    }
    // Grid crossings of kappa.
    const double zero_tol = 1e-12 * kappa;
    double prev_t = phi.node(0);
    double prev_v = phi.values[0] - kappa;
    for (std::size_t i = 1; i < phi.size(); ++i) {
        const double v = phi.values[i] - kappa;
        if (std::abs(v) <= zero_tol) continue;
        if (prev_v * v < 0.0) {
            const double t = prev_t + (0.0 - prev_v) / (v - prev_v) * (phi.node(i) - prev_t);
            if (!rep.kappa_crossings.empty() && t - rep.kappa_crossings.back() < 2.0 * phi.dt) {
                std::ostringstream os;
                os << "kappa crossings at " << rep.kappa_crossings.back() << " and " << t << " closer than 2 dt";
                throw Error(ErrorCode::inconclusive, os.str());
            }
            rep.kappa_crossings.push_back(t);
        }
        prev_t = phi.node(i);
        prev_v = v;
    }

    const bool oscillating_tail = phi.right.oscillatory();
    if (oscillating_tail) {
        rep.crossings_unbounded = true;
        monotone = false;
        const int need = std::max(0, opts.crossings_to_follow - static_cast<int>(rep.kappa_crossings.size()));
        for (double t : detail::tail_crossings(phi.right, need + 1)) rep.kappa_crossings.push_back(t);
        for (double t : detail::tail_extrema(phi.right, need + 1)) {
            const double d = phi.right.derivative(t + 1e-9) - phi.right.derivative(t - 1e-9);
            rep.extrema.push_back({t, phi(t), d < 0.0});
        }
    } else if (phi.right.amplitude.real() > 0.0 && phi.right.rate.real() < 0.0) {
        monotone = false;  // approaches kappa from above
    }
    for (const auto& e : rep.extrema) (e.maximum ? rep.local_maxima : rep.local_minima) += 1;

    for (std::size_t k = 0; k + 1 < rep.kappa_crossings.size(); ++k) {
        const double a = rep.kappa_crossings[k], b = rep.kappa_crossings[k + 1];
        double amp = 0.0;
        for (int j = 1; j < 64; ++j) amp = std::max(amp, std::abs(phi.deviation(a + (b - a) * j / 64.0, kappa)));
        rep.amplitude_after_crossing.push_back(amp);
    }

    // sc samples from tau0 until past the last followed crossing, or the grid end.
    const double t_stop = oscillating_tail && !rep.kappa_crossings.empty()
                              ? rep.kappa_crossings[std::min<std::size_t>(rep.kappa_crossings.size() - 1,
                                                                          static_cast<std::size_t>(opts.crossings_to_follow - 1))]
                              : phi.t_end();
    const double step = tau / opts.sc_samples_per_delay;
    for (double t = rep.tau0; t <= t_stop + 1e-12; t += step) rep.sc_sequence.push_back({t, sign_changes(ctx, phi, t)});

    if (monotone) {
        rep.classification = Shape::monotone;
        return rep;
    }
    if (oscillating_tail) {
        const double first = rep.kappa_crossings.front();
        bool slow = true;
        for (const auto& s : rep.sc_sequence)
            if (s.t >= first && (s.sc < 1 || s.sc > 2)) slow = false;
        rep.classification = slow ? Shape::slowly_oscillating : Shape::rapidly_oscillating;
        return rep;
    }
    double last_event = rep.tau0;
    for (const auto& e : rep.extrema) last_event = std::max(last_event, e.t);
    for (double t : rep.kappa_crossings) last_event = std::max(last_event, t);
    if (phi.t_end() - last_event < 3.0 * tau) {
        std::ostringstream os;
        os << "last extremum or crossing at " << last_event << " is within 3 ch of the grid end " << phi.t_end();
        throw Error(ErrorCode::inconclusive, os.str());
    }
    rep.classification = Shape::eventually_monotone;
    return rep;
}

struct Prop2Report {
    double tau0 = 0.0;
    std::optional<double> tau1;
    std::optional<double> gap;  // tau1 - tau0
    bool increasing_before_tau1 = false;
    bool tau1_finite_iff_above_kappa = false;
    bool gap_at_least_delay = false;
    bool holds = false;
    std::string detail;
};

/// Structure of the leading edge: phi' > 0 before the first critical point
/// tau1, tau1 finite exactly when phi(tau1) > kappa, and tau1 - tau0 >= ch.
inline Prop2Report check_prop2(const WaveContext& ctx, const WaveProfile& phi) {
    Prop2Report r;
    const double theta = ctx.g.theta(), kappa = ctx.g.kappa();
    for (std::size_t i = 1; i < phi.size(); ++i) {
        if (phi.values[i - 1] < theta && phi.values[i] >= theta) {
            r.tau0 = phi.node(i - 1) + (theta - phi.values[i - 1]) / (phi.values[i] - phi.values[i - 1]) * phi.dt;
            break;
        }
    }
    r.tau1 = first_local_max(phi);
    r.increasing_before_tau1 = true;
    const double stop = r.tau1 ? *r.tau1 - phi.dt : phi.t_end();
    for (std::size_t i = 0; i < phi.size() && phi.node(i) < stop; ++i) {
        if (!(phi.node_derivative(i) > 0.0)) {
            r.increasing_before_tau1 = false;
            break;
        }
    }
    std::ostringstream os;
    if (r.tau1) {
        r.gap = *r.tau1 - r.tau0;
        r.tau1_finite_iff_above_kappa = phi(*r.tau1) > kappa;
        r.gap_at_least_delay = *r.gap >= ctx.tau;
        os << "tau0=" << r.tau0 << " tau1=" << *r.tau1 << " gap=" << *r.gap << " ch=" << ctx.tau;
    } else {
        const double mx = *std::max_element(phi.values.begin(), phi.values.end());
        r.tau1_finite_iff_above_kappa = mx <= kappa * (1.0 + 1e-9);
        r.gap_at_least_delay = true;
        os << "tau0=" << r.tau0 << " tau1=+inf max=" << mx;
    }
    r.holds = r.increasing_before_tau1 && r.tau1_finite_iff_above_kappa && r.gap_at_least_delay;
    r.detail = os.str();
    return r;
}

}  // namespace wavefront
