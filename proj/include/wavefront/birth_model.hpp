#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wavefront/error.hpp"
#include "wavefront/interval_map.hpp"

namespace wavefront {

/// Three-segment unimodal birth function
///
///   g(x) = k1 x           on [0, theta]
///          k2 x + q2      on [theta, theta1]
///          k3 x + q3      on [theta1, g(theta)]
///
/// with g(0) = 0 and the positive fixed point kappa on the third segment.
/// Past g(theta) the third segment is continued, clamped at zero.
class PiecewiseLinearBirth {
public:
    /// Solves q2, q3 and theta1 from continuity and g(kappa) = kappa.
    /// k2 == k3 is accepted only when the data describe a two-segment map
    /// (then theta1 == theta).
    static PiecewiseLinearBirth construct(double k1, double k2, double k3, double theta, double kappa) {
        for (double v : {k1, k2, k3, theta, kappa}) {
            if (!std::isfinite(v)) throw Error(ErrorCode::invalid_geometry, "non-finite parameter");
        }
        if (!(k1 > 1.0)) throw Error(ErrorCode::invalid_geometry, "k1 must exceed 1");
        if (!(k2 <= k3 && k3 < 0.0)) throw Error(ErrorCode::invalid_geometry, "need k2 <= k3 < 0");
        if (!(theta > 0.0 && theta < kappa)) throw Error(ErrorCode::invalid_geometry, "need 0 < theta < kappa");

        auto g = unchecked(k1, k2, k3, theta, kappa);
        if (k2 == k3) {
            if (std::abs(g.q2_ - g.q3_) > 1e-12 * std::max(1.0, std::abs(g.q3_))) {
                throw Error(ErrorCode::invalid_geometry, "k2 == k3 but the two lines do not coincide");
            }
            g.theta1_ = theta;
        } else if (!(g.theta1_ > theta && g.theta1_ < kappa)) {
            std::ostringstream os;
            os << "solved theta1=" << g.theta1_ << " not in (theta, kappa) = (" << theta << ", " << kappa << ")";
            throw Error(ErrorCode::invalid_geometry, os.str());
        }
        if (!(kappa < g.g_theta_)) throw Error(ErrorCode::invalid_geometry, "kappa must lie below g(theta)");
        g.check_continuity();
        return g;
    }

    /// Two-segment map through (theta, k1 theta) and (kappa, kappa).
    static PiecewiseLinearBirth two_segment(double k1, double theta, double kappa) {
        if (!(theta > 0.0 && theta < kappa)) throw Error(ErrorCode::invalid_geometry, "need 0 < theta < kappa");
        const double slope = (kappa - k1 * theta) / (kappa - theta);
        if (!(slope < 0.0)) throw Error(ErrorCode::invalid_geometry, "decreasing branch must have negative slope");
        auto g = unchecked(k1, slope, slope, theta, kappa);
        g.q2_ = g.q3_;
        g.theta1_ = theta;
        g.check_continuity();
        return g;
    }

    /// Same derived constants as construct() but no geometric validation.
    /// Meant for negative controls of the hypothesis checks.
    static PiecewiseLinearBirth unchecked(double k1, double k2, double k3, double theta, double kappa) {
        PiecewiseLinearBirth g;
        g.k1_ = k1;
        g.k2_ = k2;
        g.k3_ = k3;
        g.theta_ = theta;
        g.kappa_ = kappa;
        g.q2_ = (k1 - k2) * theta;
        g.q3_ = kappa * (1.0 - k3);
        g.theta1_ = (k2 != k3) ? (g.q3_ - g.q2_) / (k2 - k3) : theta;
        g.g_theta_ = k1 * theta;
        g.g2_theta_ = g.eval_unchecked(g.g_theta_);
        return g;
    }

    double k1() const noexcept { return k1_; }
    double k2() const noexcept { return k2_; }
    double k3() const noexcept { return k3_; }
    double theta() const noexcept { return theta_; }
    double theta1() const noexcept { return theta1_; }
    double kappa() const noexcept { return kappa_; }
    double q2() const noexcept { return q2_; }
    double q3() const noexcept { return q3_; }
    double g_theta() const noexcept { return g_theta_; }
    double g2_theta() const noexcept { return g2_theta_; }
    bool is_two_segment() const noexcept { return theta1_ == theta_; }

    /// Where the continued third segment reaches zero; g vanishes beyond it.
    double zero_point() const noexcept {
        return k3_ < 0.0 ? -q3_ / k3_ : std::numeric_limits<double>::infinity();
    }

    /// Interior breakpoints of g on [0, inf): theta, theta1 (if distinct), zero point.
    std::vector<double> breakpoints() const {
        std::vector<double> out{theta_};
        if (theta1_ > theta_) out.push_back(theta1_);
        const double z = zero_point();
        if (std::isfinite(z) && z > theta1_) out.push_back(z);
        return out;
    }

    double operator()(double x) const {
        if (x < 0.0) {
            std::ostringstream os;
            os << "g evaluated at x=" << x;
            throw Error(ErrorCode::negative_input, os.str());
        }
        return eval_unchecked(x);
    }

    double eval_unchecked(double x) const noexcept {
        if (x <= theta_) return k1_ * x;
        if (x <= theta1_) return k2_ * x + q2_;
        return std::max(0.0, k3_ * x + q3_);
    }

    /// Slope of the segment active to the right of x.
    double slope_right(double x) const noexcept {
        if (x < theta_) return k1_;
        if (x < theta1_) return k2_;
        return x < zero_point() ? k3_ : 0.0;
    }

    /// Slope of the segment active to the left of x.
    double slope_left(double x) const noexcept {
        if (x <= theta_) return k1_;
        if (x <= theta1_) return k2_;
        return x <= zero_point() ? k3_ : 0.0;
    }

    /// g restricted to [a, b] as an exact piecewise-affine map.
    IntervalMap as_map(double a, double b) const {
        if (a < 0.0 || b < a) throw Error(ErrorCode::out_of_range, "as_map needs 0 <= a <= b");
        std::vector<double> cuts{a, b};
        for (double x : breakpoints())
            if (x > a && x < b) cuts.push_back(x);
        std::sort(cuts.begin(), cuts.end());
        std::vector<AffinePiece> pieces;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double m = 0.5 * (cuts[i] + cuts[i + 1]);
            const double s = slope_right(m);
            pieces.push_back({cuts[i], cuts[i + 1], s, eval_unchecked(m) - s * m});
        }
        if (pieces.empty()) {
            const double s = slope_right(a);
            pieces.push_back({a, b, s, eval_unchecked(a) - s * a});
        }
        return IntervalMap(std::move(pieces), kappa_);
    }

private:
    PiecewiseLinearBirth() = default;

    void check_continuity() const {
        auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
        if (!close(k1_ * theta_, k2_ * theta_ + q2_) || !close(k2_ * theta1_ + q2_, k3_ * theta1_ + q3_) ||
            !close(k3_ * kappa_ + q3_, kappa_)) {
            throw Error(ErrorCode::invalid_geometry, "segments are not continuous");
        }
    }

    double k1_ = 0, k2_ = 0, k3_ = 0;
    double theta_ = 0, theta1_ = 0, kappa_ = 0;
    double q2_ = 0, q3_ = 0;
    double g_theta_ = 0, g2_theta_ = 0;
};

/// Birth function used throughout the examples and the replication harness.
inline PiecewiseLinearBirth reference_birth() {
    return PiecewiseLinearBirth::construct(3.0, -3.0, -0.25, 1.0 / 3.0, 0.53);
}

struct ConditionResult {
    std::string name;
    bool holds = true;
    std::optional<double> witness;
    std::string detail;
};

struct HypothesisReport {
    bool holds = true;
    std::optional<double> witness;                  // first failing point, if any
    std::optional<std::pair<double, double>> interval;  // interval the check ran on
    std::vector<ConditionResult> details;

    void add(ConditionResult c) {
        if (!c.holds && holds) {
            holds = false;
            witness = c.witness;
        }
        details.push_back(std::move(c));
    }
};

namespace detail {

inline std::string fmt_point(const char* what, double x, double value) {
    std::ostringstream os;
    os.precision(12);
    os << what << " at x=" << x << " (value " << value << ")";
    return os.str();
}

}  // namespace detail

/// Unimodality and monostability. Piecewise linearity makes breakpoint and
/// one-sided slope checks exact.
inline HypothesisReport check_um(const PiecewiseLinearBirth& g) {
    HypothesisReport r;
    const double k = g.kappa();
    const double th = g.theta();

    r.add({"g'(0) > 1", g.k1() > 1.0, 0.0, detail::fmt_point("slope", 0.0, g.k1())});
    const double slope_kappa = g.slope_left(k);
    r.add({"g'(kappa) < 1", slope_kappa < 1.0 && g.slope_right(k) < 1.0, k,
           detail::fmt_point("slope", k, slope_kappa)});
    r.add({"kappa < g(theta)", k < g.g_theta(), k, detail::fmt_point("fixed point vs maximum", k, g.g_theta())});

    // Single maximum at theta: strictly increasing, then strictly decreasing
    // up to g(theta).
    {
        ConditionResult c{"single maximum at theta", true, std::nullopt, "ok"};
        if (!(g.k1() > 0.0)) {
            c = {"single maximum at theta", false, 0.0, detail::fmt_point("non-increasing first segment", 0.0, g.k1())};
        } else if (g.theta1() > th && !(g.k2() < 0.0)) {
            c = {"single maximum at theta", false, th, detail::fmt_point("non-decreasing second segment", th, g.k2())};
        } else if (!(g.k3() < 0.0)) {
            c = {"single maximum at theta", false, g.theta1(),
                 detail::fmt_point("non-decreasing third segment", g.theta1(), g.k3())};
        } else if (g.zero_point() < g.g_theta()) {
            c = {"single maximum at theta", false, g.zero_point(),
                 detail::fmt_point("g vanishes before g(theta)", g.zero_point(), 0.0)};
        }
        r.add(c);
    }

    // g(x) > x on (0, kappa): d = g - x vanishes at both ends, so it is
    // positive inside iff it leaves 0 upwards, enters kappa from above and is
    // positive at every interior breakpoint.
    {
        ConditionResult c{"g(x) > x on (0, kappa)", true, std::nullopt, "ok"};
        if (!(g.k1() > 1.0)) {
            c = {c.name, false, 0.0, "g(x) - x does not increase from 0"};
        } else if (!(g.slope_left(k) < 1.0)) {
            c = {c.name, false, k, "g(x) - x does not decrease into kappa"};
        } else {
            for (double x : g.breakpoints()) {
                if (x > 0.0 && x < k && !(g.eval_unchecked(x) > x)) {
                    c = {c.name, false, x, detail::fmt_point("g(x) <= x", x, g.eval_unchecked(x))};
                    break;
                }
            }
        }
        r.add(c);
    }

    // g(x) < x on (kappa, g(theta)].
    {
        ConditionResult c{"g(x) < x on (kappa, g(theta)]", true, std::nullopt, "ok"};
        if (!(g.slope_right(k) < 1.0)) {
            c = {c.name, false, k, "g(x) - x does not decrease out of kappa"};
        } else {
            std::vector<double> pts = g.breakpoints();
            pts.push_back(g.g_theta());
            for (double x : pts) {
                if (x > k && x <= g.g_theta() && !(g.eval_unchecked(x) < x)) {
                    c = {c.name, false, x, detail::fmt_point("g(x) >= x", x, g.eval_unchecked(x))};
                    break;
                }
            }
        }
        r.add(c);
    }
    return r;
}

/// Positive-feedback condition (m(x) - kappa)(x - kappa) < 0, x != kappa, for
/// a piecewise-affine map. Checked on breakpoints plus the one-sided slopes
/// at kappa.
inline HypothesisReport check_fc(const IntervalMap& m, double kappa) {
    HypothesisReport r;
    r.interval = std::make_pair(m.lo(), m.hi());
    const double tol = 1e-14;
    ConditionResult c{"(g(x)-kappa)(x-kappa) < 0", true, std::nullopt, "ok"};
    auto fail = [&](double x, const std::string& why) {
        c.holds = false;
        c.witness = x;
        c.detail = why;
    };
    for (double x : m.breakpoints()) {
        if (std::abs(x - kappa) <= tol) continue;
        if (!((m(x) - kappa) * (x - kappa) < 0.0)) {
            fail(x, detail::fmt_point("no strict feedback", x, m(x)));
            break;
        }
    }
    if (c.holds && m.contains(kappa)) {
        if (std::abs(m(kappa) - kappa) > 1e-12) {
            fail(kappa, detail::fmt_point("kappa is not fixed", kappa, m(kappa)));
        } else {
            // Near kappa the sign is governed by the local slopes.
            auto left = m.piece_at(std::max(m.lo(), kappa - 1e-12));
            auto right = m.piece_at(kappa);
            if (kappa > m.lo() && !(left.slope < 0.0)) fail(kappa, "non-negative slope just left of kappa");
            else if (kappa < m.hi() && !(right.slope < 0.0)) fail(kappa, "non-negative slope just right of kappa");
        }
    }
    r.add(c);
    return r;
}

inline HypothesisReport check_fc(const PiecewiseLinearBirth& g) {
    return check_fc(g.as_map(g.g2_theta(), g.g_theta()), g.kappa());
}

/// Sub-tangency at kappa: g(x) <= kappa + g'(kappa)(x - kappa) on [0, kappa].
/// The witness is the breakpoint with the largest excess over the tangent.
inline HypothesisReport check_subtangency(const PiecewiseLinearBirth& g) {
    HypothesisReport r;
    const double k = g.kappa();
    const double slope = g.slope_left(k);
    r.interval = std::make_pair(0.0, k);
    std::vector<double> pts{0.0, k};
    for (double x : g.breakpoints())
        if (x > 0.0 && x < k) pts.push_back(x);
    double worst = 0.0;
    std::optional<double> arg;
    for (double x : pts) {
        const double excess = g.eval_unchecked(x) - (k + slope * (x - k));
        if (excess > 1e-12 && excess > worst) {
            worst = excess;
            arg = x;
        }
    }
    ConditionResult c{"g below tangent at kappa on [0, kappa]", !arg.has_value(), arg, "ok"};
    if (arg) {
        std::ostringstream os;
        os.precision(12);
        os << "g(" << *arg << ")=" << g.eval_unchecked(*arg) << " > tangent " << (k + slope * (*arg - k));
        c.detail = os.str();
    }
    r.add(c);
    return r;
}

struct SecantSlope {
    double value;
    double argmin;  // point (or limit point) where the infimum is attained
};

/// inf over x in (0, kappa) of (g(x) - g(kappa))/(x - kappa). On an affine
/// piece the secant slope is monotone in x, so the infimum sits at a piece
/// endpoint or at one of the limits x -> 0, x -> kappa.
inline SecantSlope critical_secant_slope(const PiecewiseLinearBirth& g) {
    const double k = g.kappa();
    auto secant = [&](double x) { return (g.eval_unchecked(x) - k) / (x - k); };
    SecantSlope best{secant(0.0), 0.0};
    for (double x : g.breakpoints()) {
        if (x > 0.0 && x < k && secant(x) < best.value) best = {secant(x), x};
    }
    if (g.slope_left(k) < best.value) best = {g.slope_left(k), k};
    return best;
}

/// g o g on [a, b] as an exact piecewise-affine map. The interval must be
/// mapped into itself.
inline IntervalMap compose(const PiecewiseLinearBirth& g, std::pair<double, double> interval) {
    const auto [a, b] = interval;
    const IntervalMap inner = g.as_map(a, b);
    if (!inner.maps_into_itself()) {
        auto [mn, mx] = inner.image();
        std::ostringstream os;
        os << "g([" << a << ", " << b << "]) = [" << mn << ", " << mx << "]";
        throw Error(ErrorCode::not_invariant, os.str());
    }
    return compose(inner, inner);
}

inline double lipschitz_constant(const IntervalMap& m) { return m.max_abs_slope(); }

/// Largest |slope| among segments that overlap [a, b] in more than a point.
inline double lipschitz_constant(const PiecewiseLinearBirth& g, std::pair<double, double> interval) {
    return lipschitz_constant(g.as_map(interval.first, interval.second));
}

}  // namespace wavefront
