#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wavefront/birth_model.hpp"
#include "wavefront/char_spectrum.hpp"
#include "wavefront/error.hpp"
#include "wavefront/numerics.hpp"

namespace wavefront {

/// e^{rate v} (alpha + beta v)
struct ExpTerm {
    double rate;
    double alpha;
    double beta;
};

/// Leading edge for t < anchor, u = t - anchor:
///   phi = a e^{r u} + b E(u),  E(u) = (e^{r2 u} - e^{r u})/(r2 - r), or u e^{r u} when r2 == r.
/// r is the slow rate; b = 0 (or no second rate) leaves the pure slow mode.
struct LeftTail {
    double rate = 1.0;
    std::optional<double> fast_rate;
    double a = 0.0;
    double b = 0.0;
    double anchor = 0.0;

    bool double_mode() const { return fast_rate && *fast_rate - rate < 1e-6; }

    /// E(u) e^{-r u}, smooth across the double-root limit.
    double basis(double u) const {
        if (!fast_rate) return 0.0;
        const double d = *fast_rate - rate;
        return double_mode() ? u : u * numerics::phi1(d * u);
    }

    double value(double t) const {
        const double u = t - anchor;
        return std::exp(rate * u) * (a + b * basis(u));
    }

    double derivative(double t) const {
        const double u = t - anchor;
        double d_basis = 0.0;
        if (fast_rate) d_basis = double_mode() ? 1.0 : std::exp((*fast_rate - rate) * u);
        return std::exp(rate * u) * (rate * (a + b * basis(u)) + b * d_basis);
    }

    /// Exponential-polynomial terms in u; at most two.
    std::vector<ExpTerm> terms() const {
        if (!fast_rate || b == 0.0) return {{rate, a, 0.0}};
        if (double_mode()) return {{rate, a, b}};
        const double d = *fast_rate - rate;
        return {{rate, a - b / d, 0.0}, {*fast_rate, b / d, 0.0}};
    }
};

/// phi(t) = base + Re[amplitude * e^{rate (t - anchor)}] for t > anchor.
/// A real rate is the monotone approach to kappa; a complex rate is the
/// leading decaying oscillation; amplitude 0 is the constant model.
struct RightTail {
    double base = 0.0;
    std::complex<double> rate{-1.0, 0.0};
    std::complex<double> amplitude{0.0, 0.0};
    double anchor = 0.0;

    bool oscillatory() const { return rate.imag() != 0.0 && amplitude != std::complex<double>(0.0, 0.0); }
    double value(double t) const { return base + std::real(amplitude * std::exp(rate * (t - anchor))); }
    double derivative(double t) const { return std::real(rate * amplitude * std::exp(rate * (t - anchor))); }
};

/// Piecewise-linear profile on a uniform grid with analytic tails.
struct WaveProfile {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> values;
    LeftTail left;
    RightTail right;
    // sup |S(A(phi)) - phi| where S re-translates the theta-crossing to 0.
    double residual = std::numeric_limits<double>::infinity();
    // sup |A(phi) - phi| without re-translation; O(dt^2) translation drift.
    double raw_residual = std::numeric_limits<double>::infinity();
    double drift = 0.0;  // translation removed by S in the last sweep
    int iterations = 0;
    bool converged = false;

    std::size_t size() const noexcept { return values.size(); }
    double node(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
    double t_end() const noexcept { return node(values.size() - 1); }

    double operator()(double t) const {
        if (t <= t0) return t == t0 ? values.front() : left.value(t);
        if (t >= t_end()) return t == t_end() ? values.back() : right.value(t);
        const double x = (t - t0) / dt;
        const auto i = std::min(static_cast<std::size_t>(x), values.size() - 2);
        const double f = x - static_cast<double>(i);
        return values[i] + f * (values[i + 1] - values[i]);
    }

    /// phi(t) - level without cancellation on the right tail, where
    /// phi - kappa can be far below the resolution of phi itself.
    double deviation(double t, double level) const {
        if (t > t_end()) return (right.base - level) + std::real(right.amplitude * std::exp(right.rate * (t - right.anchor)));
        return (*this)(t) - level;
    }

    /// Central difference at node i; one-sided tail derivative at the ends.
    double node_derivative(std::size_t i) const {
        if (i == 0) return left.derivative(t0);
        if (i + 1 == values.size()) return (values[i] - values[i - 1]) / dt;
        return (values[i + 1] - values[i - 1]) / (2.0 * dt);
    }

    double derivative(double t) const {
        if (t < t0) return left.derivative(t);
        if (t > t_end()) return right.derivative(t);
        const double x = (t - t0) / dt;
        const auto i = std::min(static_cast<std::size_t>(x), values.size() - 2);
        const double f = x - static_cast<double>(i);
        return (1.0 - f) * node_derivative(i) + f * node_derivative(i + 1);
    }

    std::size_t index_of(double t) const {
        const double x = std::round((t - t0) / dt);
        return static_cast<std::size_t>(std::clamp(x, 0.0, static_cast<double>(values.size() - 1)));
    }
};

namespace detail {

struct CutPoint {
    double x;
    long node;  // grid index if x is a grid node, else -1
};

/// One piece of G(s) = g(phi(s - tau)): affine (G = g0 + slope (s - lo)), or
/// on the left tail, where G = k1 phi(s - tau) is a sum of exponential terms.
struct IntegrandPiece {
    double lo;
    double hi;
    double g0;
    double slope;
    bool exponential;
    long node_at_hi;
};

/// int_0^w e^{k v} (alpha + beta v) dv
inline double exp_poly_integral(double k, double alpha, double beta, double w) {
    const double p1 = numerics::phi1(k * w);
    return alpha * w * p1 + beta * w * w * (p1 - numerics::phi2(k * w));
}

inline std::vector<CutPoint> operator_cuts(const WaveProfile& phi, double tau) {
    const std::size_t n = phi.size();
    const double dt = phi.dt;
    const double tol = 1e-9 * dt;
    std::vector<CutPoint> cuts;
    cuts.reserve(2 * n + 1);
    // Merge grid nodes t_i with shifted nodes t_j + tau.
    std::size_t i = 0, j = 0;
    const double shift_idx = tau / dt;
    while (i < n || j < n) {
        const double xi = i < n ? phi.node(i) : std::numeric_limits<double>::infinity();
        const double xj = j < n ? phi.t0 + (static_cast<double>(j) + shift_idx) * dt
                                : std::numeric_limits<double>::infinity();
        if (std::abs(xi - xj) <= tol) {
            cuts.push_back({xi, static_cast<long>(i)});
            ++i;
            ++j;
        } else if (xi < xj) {
            cuts.push_back({xi, static_cast<long>(i)});
            ++i;
        } else {
            cuts.push_back({xj, -1});
            ++j;
        }
    }
    return cuts;
}

inline std::vector<IntegrandPiece> integrand_pieces(const PiecewiseLinearBirth& g, const WaveProfile& phi,
                                                    double tau) {
    const auto cuts = operator_cuts(phi, tau);
    const auto gbreaks = g.breakpoints();
    const double tail_edge = phi.t0 + tau;
    std::vector<IntegrandPiece> out;
    out.reserve(cuts.size() + cuts.size() / 4);
    auto shifted = [&](double s) { return phi(std::max(s - tau, phi.t0)); };
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double p = cuts[k].x, q = cuts[k + 1].x;
        if (q <= p) continue;
        if (q <= tail_edge + 1e-9 * phi.dt) {
            // phi(s - tau) is on the left tail, which sits below theta.
            out.push_back({p, q, 0.0, 0.0, true, cuts[k + 1].node});
            continue;
        }
        const double vp = shifted(p), vq = shifted(q);
        double a = p, va = vp;
        // Visit breakpoints in the order the segment meets them.
        std::vector<double> order = gbreaks;
        if (vq < vp) std::reverse(order.begin(), order.end());
        for (double b : order) {
            if ((vp - b) * (vq - b) < 0.0) {
                const double sb = p + (b - vp) / (vq - vp) * (q - p);
                if (sb > a && sb < q) {
                    const double ga = g.eval_unchecked(va), gb = g.eval_unchecked(b);
                    out.push_back({a, sb, ga, (gb - ga) / (sb - a), false, -1});
                    a = sb;
                    va = b;
                }
            }
        }
        const double ga = g.eval_unchecked(va), gq = g.eval_unchecked(vq);
        out.push_back({a, q, ga, (gq - ga) / (q - a), false, cuts[k + 1].node});
    }
    return out;
}

}  // namespace detail

/// A(phi)(t) = [int_{-inf}^t e^{z1(t-s)} G(s) ds + int_t^inf e^{z2(t-s)} G(s) ds]/(z2 - z1),
/// G(s) = g(phi(s - c h)), evaluated at every grid node. G is piecewise affine
/// between the grid, the shifted grid and the level crossings of g's
/// breakpoints, so every piece is integrated in closed form; the tails are
/// integrated analytically from their models.
inline std::vector<double> apply_operator(const WaveContext& ctx, const WaveProfile& phi) {
    if (phi.size() < 2 || !(phi.dt > 0.0)) throw Error(ErrorCode::out_of_range, "profile needs at least two nodes");
    if (!(phi.left.rate > 0.0)) {
        std::ostringstream os;
        os << "left tail rate " << phi.left.rate << " <= 0";
        throw Error(ErrorCode::tail_divergence, os.str());
    }
    if (phi.left.value(phi.left.anchor) > ctx.g.theta() * (1.0 + 1e-12)) {
        throw Error(ErrorCode::out_of_range, "left tail starts above theta");
    }
    const double z1 = ctx.z1, z2 = ctx.z2, tau = ctx.tau;
    const auto& g = ctx.g;
    const std::size_t n = phi.size();

    const auto pieces = detail::integrand_pieces(g, phi, tau);

    std::vector<double> i1(n, 0.0), i2(n, 0.0);

    // Left-tail terms of G as seen from the start s = lo of a piece.
    const auto tail_terms = phi.left.terms();
    const double k1 = g.k1();
    auto tail_local = [&](const detail::IntegrandPiece& pc, double z) {
        const double u0 = pc.lo - tau - phi.left.anchor;
        double sum = 0.0;
        for (const auto& term : tail_terms) {
            const double e = k1 * std::exp(term.rate * u0);
            sum += detail::exp_poly_integral(term.rate - z, e * (term.alpha + term.beta * u0), e * term.beta,
                                             pc.hi - pc.lo);
        }
        return sum;
    };

    // Forward sweep.
    {
        // s < t0: G(s) = k1 phi(s - tau) on the tail, integrated in closed form.
        double val = 0.0;
        for (const auto& term : tail_terms) {
            const double kk = term.rate - z1;
            val += k1 * std::exp(-term.rate * tau) * ((term.alpha - term.beta * tau) / kk - term.beta / (kk * kk));
        }
        i1[0] = val;
        for (const auto& pc : pieces) {
            const double w = pc.hi - pc.lo;
            const double decay = std::exp(z1 * w);
            double local;
            if (pc.exponential) {
                local = decay * tail_local(pc, z1);
            } else {
                const auto m = numerics::exp_moments(z1, w);
                local = decay * (pc.g0 * m.m0 + pc.slope * m.m1);
            }
            val = decay * val + local;
            if (pc.node_at_hi >= 0) i1[static_cast<std::size_t>(pc.node_at_hi)] = val;
        }
    }

    // Backward sweep.
    {
        const double kappa = phi.right.base;
        const double slope = g.slope_left(kappa);
        const double g_base = g.eval_unchecked(kappa);
        // Beyond R + tau the argument follows the right tail model.
        double val = g_base / z2 + slope * std::real(phi.right.amplitude / (z2 - phi.right.rate));
        for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
            const auto& pc = *it;
            if (pc.node_at_hi >= 0) i2[static_cast<std::size_t>(pc.node_at_hi)] = val;
            const double w = pc.hi - pc.lo;
            double local;
            if (pc.exponential) {
                local = tail_local(pc, z2);
            } else {
                const auto m = numerics::exp_moments(z2, w);
                local = pc.g0 * m.m0 + pc.slope * m.m1;
            }
            val = std::exp(-z2 * w) * val + local;
        }
        i2[0] = val;
    }

    std::vector<double> out(n);
    const double inv = 1.0 / (z2 - z1);
    for (std::size_t i = 0; i < n; ++i) out[i] = (i1[i] + i2[i]) * inv;
    return out;
}

namespace detail {

/// Left tail: value matched at the first node, second-mode coefficient by
/// least squares on the left half of the leading edge. Right tail: a real
/// mode is rescaled to the last node; other models are kept.
inline void refit_tails(WaveProfile& phi) {
    auto& lt = phi.left;
    lt.anchor = phi.t0;
    lt.a = phi.values.front();
    lt.b = 0.0;
    if (lt.fast_rate) {
        const std::size_t m = std::min(phi.size() - 1, static_cast<std::size_t>(-phi.t0 / (2.0 * phi.dt)));
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 1; i <= m; ++i) {
            const double u = phi.node(i) - phi.t0;
            const double x = lt.basis(u);
            const double y = phi.values[i] * std::exp(-lt.rate * u) - lt.a;
            sxy += x * y;
            sxx += x * x;
        }
        if (sxx > 0.0) lt.b = sxy / sxx;
    }
    auto& rt = phi.right;
    rt.anchor = phi.t_end();
    if (rt.rate.imag() == 0.0) rt.amplitude = rt.rate.real() < 0.0 ? phi.values.back() - rt.base : 0.0;
}

}  // namespace detail

/// A(phi) as a profile on the same grid, tails matched to the new end values.
inline WaveProfile integral_operator(const WaveContext& ctx, const WaveProfile& phi) {
    WaveProfile out = phi;
    out.values = apply_operator(ctx, phi);
    detail::refit_tails(out);
    return out;
}

struct SolveOptions {
    std::optional<double> L;
    std::optional<double> R;
    std::optional<double> dt;  // target step; aligned so that c h is a whole number of steps
    std::optional<double> tol;
    int max_iter = 5000;
    double initial_shift = 0.0;
    bool forced = false;  // skip the admissibility check
    bool two_mode_left_tail = true;  // false: slow mode only
};

namespace detail {

/// Leftmost upward crossing of level by the node values, linearly interpolated.
inline std::optional<double> leftmost_crossing(const WaveProfile& phi, double level) {
    for (std::size_t i = 1; i < phi.size(); ++i) {
        if (phi.values[i - 1] < level && phi.values[i] >= level) {
            const double f = (level - phi.values[i - 1]) / (phi.values[i] - phi.values[i - 1]);
            return phi.node(i - 1) + f * phi.dt;
        }
    }
    return std::nullopt;
}

/// Translate so that the leftmost theta-crossing lands on t = 0.
inline double renormalize(WaveProfile& phi, double theta) {
    const auto s = leftmost_crossing(phi, theta);
    if (!s) throw Error(ErrorCode::no_convergence, "iterate never reaches theta");
    std::vector<double> shifted(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) shifted[i] = phi(phi.node(i) + *s);
    phi.values = std::move(shifted);
    return *s;
}


}  // namespace detail

struct ProfileSetup {
    double L;
    double R;
    double dt;
    double tol;
    double left_rate;
    std::optional<double> left_fast_rate;
    std::optional<double> right_rate;
};

inline ProfileSetup profile_setup(const WaveContext& ctx, const SolveOptions& opts) {
    ProfileSetup s{};
    s.left_rate = ctx.mu2 ? *ctx.mu2 : 0.5 * ctx.c;
    if (ctx.mu1 && opts.two_mode_left_tail) s.left_fast_rate = *ctx.mu1;
    if (ctx.regime == Regime::front) s.right_rate = *ctx.lambda1;
    s.L = opts.L.value_or(40.0 / s.left_rate);
    s.R = opts.R.value_or(s.right_rate ? 40.0 / std::abs(*s.right_rate) : 60.0);
    const double target = opts.dt.value_or(std::min(0.005, ctx.tau > 0.0 ? ctx.tau / 200.0 : 0.005));
    if (!(target > 0.0) || !(s.L > 0.0) || !(s.R > 0.0)) throw Error(ErrorCode::invalid_config, "L, R, dt must be > 0");
    s.dt = ctx.tau > 0.0 ? ctx.tau / std::ceil(ctx.tau / target - 1e-9) : target;
    s.tol = opts.tol.value_or(1e-8 * ctx.g.g_theta());
    return s;
}

/// Logistic ramp from 0 to kappa with phi(0) = theta.
inline WaveProfile initial_profile(const WaveContext& ctx, const ProfileSetup& s, double shift) {
    WaveProfile phi;
    const auto nl = static_cast<long>(std::ceil(s.L / s.dt - 1e-9));
    const auto nr = static_cast<long>(std::ceil(s.R / s.dt - 1e-9));
    phi.dt = s.dt;
    phi.t0 = -static_cast<double>(nl) * s.dt;
    phi.values.resize(static_cast<std::size_t>(nl + nr + 1));
    const double kappa = ctx.g.kappa(), theta = ctx.g.theta();
    const double ts = std::log(kappa / theta - 1.0) / s.left_rate + shift;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        phi.values[i] = kappa / (1.0 + std::exp(-s.left_rate * (phi.node(i) - ts)));
    }
    phi.left.rate = s.left_rate;
    phi.left.fast_rate = s.left_fast_rate;
    phi.right.base = kappa;
    if (s.right_rate) phi.right.rate = *s.right_rate;
    else phi.right.rate = {0.0, 0.0};
    detail::refit_tails(phi);
    return phi;
}

namespace detail {

/// Drops the trailing nodes that sit at kappa to round-off, then fits the
/// right tail to what is left: the real mode in the front regime, the leading
/// complex mode when the approach to kappa oscillates.
inline void finalize_tail(const WaveContext& ctx, WaveProfile& phi) {
    const double kappa = ctx.g.kappa();
    std::size_t last = phi.size() - 1;
    while (last > 0 && std::abs(phi.values[last] - kappa) < 1e-11 * kappa) --last;
    const std::size_t min_keep = static_cast<std::size_t>(std::ceil((-phi.t0 + 2.0 * ctx.tau) / phi.dt)) + 2;
    last = std::max(last, std::min(min_keep, phi.size() - 1));
    phi.values.resize(last + 1);
    phi.right.anchor = phi.t_end();
    phi.right.base = kappa;

    if (ctx.regime == Regime::oscillatory && ctx.oscillatory_mode) {
        const auto lam = *ctx.oscillatory_mode;
        const double omega = lam.imag();
        const double window = std::min(0.5 * std::numbers::pi / omega, 2.0 * std::max(ctx.tau, phi.dt * 8));
        const auto m = std::min<std::size_t>(phi.size() - 1, static_cast<std::size_t>(window / phi.dt));
        // y(u) e^{-Re(lam) u} = ar cos(w u) - ai sin(w u), u <= 0.
        double scc = 0, scs = 0, sss = 0, syc = 0, sys = 0;
        for (std::size_t k = 0; k <= m; ++k) {
            const std::size_t i = phi.size() - 1 - k;
            const double u = -static_cast<double>(k) * phi.dt;
            const double y = (phi.values[i] - kappa) * std::exp(-lam.real() * u);
            const double cw = std::cos(omega * u), sw = -std::sin(omega * u);
            scc += cw * cw;
            scs += cw * sw;
            sss += sw * sw;
            syc += y * cw;
            sys += y * sw;
        }
        const double det = scc * sss - scs * scs;
        if (det > 0.0) {
            phi.right.rate = lam;
            phi.right.amplitude = {(syc * sss - sys * scs) / det, (sys * scc - syc * scs) / det};
        } else {
            phi.right.rate = lam;
            phi.right.amplitude = phi.values.back() - kappa;
        }
    } else if (ctx.lambda1) {
        phi.right.rate = *ctx.lambda1;
        phi.right.amplitude = phi.values.back() - kappa;
    } else {
        phi.right.rate = {0.0, 0.0};
        phi.right.amplitude = 0.0;
    }
    const double jump = std::abs(phi.right.value(phi.t_end()) - phi.values.back());
    if (jump > 1e-6 * kappa) {
        std::ostringstream os;
        os << "right tail model misses the last node by " << jump;
        throw Error(ErrorCode::no_convergence, os.str());
    }
}

}  // namespace detail

/// Fixed-point iteration phi <- A(phi) with translation renormalization.
/// Returns the last iterate whether or not it converged; see solve_profile.
inline WaveProfile iterate_profile(const WaveContext& ctx, const SolveOptions& opts = {}) {
    if (!opts.forced) {
        if (ctx.regime == Regime::no_front) {
            std::ostringstream os;
            os << "no front for c = " << ctx.c << ", h = " << ctx.h;
            throw Error(ErrorCode::not_in_domain, os.str());
        }
    }
    const auto setup = profile_setup(ctx, opts);
    WaveProfile phi = initial_profile(ctx, setup, opts.initial_shift);
    const double theta = ctx.g.theta();

    for (int it = 1; it <= opts.max_iter; ++it) {
        WaveProfile next = phi;
        next.values = apply_operator(ctx, phi);
        const double mn = *std::min_element(next.values.begin(), next.values.end());
        if (mn < -setup.tol) {
            std::ostringstream os;
            os << "iterate " << it << " reaches " << mn;
            throw Error(ErrorCode::loss_of_positivity, os.str());
        }
        for (double& v : next.values) v = std::max(v, 0.0);
        detail::refit_tails(next);
        next.drift = detail::renormalize(next, theta);
        detail::refit_tails(next);

        double diff = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) diff = std::max(diff, std::abs(next.values[i] - phi.values[i]));
        next.iterations = it;
        next.residual = diff;
        phi = std::move(next);
        if (diff < setup.tol) {
            phi.converged = true;
            break;
        }
    }
    if (phi.converged) {
        // Residuals of the returned iterate itself, not of its predecessor.
        WaveProfile check = phi;
        check.values = apply_operator(ctx, phi);
        double raw = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) raw = std::max(raw, std::abs(check.values[i] - phi.values[i]));
        detail::refit_tails(check);
        phi.drift = detail::renormalize(check, theta);
        double res = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) res = std::max(res, std::abs(check.values[i] - phi.values[i]));
        phi.residual = res;
        phi.raw_residual = raw;
        detail::finalize_tail(ctx, phi);
    }
    return phi;
}

/// Profile of the front (or oscillating semi-front) for the context's speed.
inline WaveProfile solve_profile(const WaveContext& ctx, const SolveOptions& opts = {}) {
    WaveProfile phi = iterate_profile(ctx, opts);
    if (!phi.converged) {
        std::ostringstream os;
        os << "no convergence after " << phi.iterations << " sweeps, last change " << phi.residual;
        throw Error(ErrorCode::no_convergence, os.str());
    }
    return phi;
}

/// sup |A(phi) - phi| over the grid, without renormalization.
inline double fixed_point_residual(const WaveContext& ctx, const WaveProfile& phi) {
    const auto a = apply_operator(ctx, phi);
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - phi.values[i]));
    return r;
}

/// sup over interior nodes of |phi'' - c phi' - phi + g(phi(t - c h))| by
/// central differences. Stencils whose delayed argument crosses a breakpoint
/// of g are skipped: phi''' jumps there and the stencil loses its order.
inline double residual_ode(const WaveContext& ctx, const WaveProfile& phi) {
    const auto& g = ctx.g;
    const auto breaks = g.breakpoints();
    const double dt = phi.dt;
    double r = 0.0;
    for (std::size_t i = 1; i + 1 < phi.size(); ++i) {
        const double t = phi.node(i);
        const double d0 = phi(t - ctx.tau - dt), d1 = phi(t - ctx.tau), d2 = phi(t - ctx.tau + dt);
        const double lo = std::min({d0, d1, d2}), hi = std::max({d0, d1, d2});
        if (std::any_of(breaks.begin(), breaks.end(), [&](double b) { return b > lo && b < hi; })) continue;
        const double p2 = (phi.values[i + 1] - 2.0 * phi.values[i] + phi.values[i - 1]) / (dt * dt);
        const double p1 = (phi.values[i + 1] - phi.values[i - 1]) / (2.0 * dt);
        r = std::max(r, std::abs(p2 - ctx.c * p1 - phi.values[i] + g.eval_unchecked(std::max(d1, 0.0))));
    }
    return r;
}

enum class TailFit { automatic, distinct, double_root };

struct TailCoefficients {
    bool double_root = false;
    double value = 0.0;  // p (distinct) or q (double root)
    double lower = 0.0;  // exclusive lower bound
    double upper = 0.0;  // inclusive upper bound
    std::optional<double> sharp_upper;  // additional bound at the minimal speed
    bool within_bounds = false;
    double fit_rms = 0.0;
};

/// Least-squares fit of the leading-edge representation on [-L, 0]:
/// p e^{mu2 t} + (theta - p) e^{mu1 t}, or (theta - q t) e^{mu1 t} at a double root.
inline TailCoefficients estimate_tail_coeffs(const WaveContext& ctx, const WaveProfile& phi,
                                             TailFit mode = TailFit::automatic) {
    if (!ctx.mu1 || !ctx.mu2) throw Error(ErrorCode::not_in_domain, "no positive roots of chi_0");
    const double mu1 = *ctx.mu1, mu2 = *ctx.mu2, theta = ctx.g.theta(), tau = ctx.tau;
    const bool is_double = ctx.mu_double || std::abs(mu1 - mu2) < 1e-6;
    if (mode == TailFit::distinct && is_double) {
        throw Error(ErrorCode::regime_mismatch, "distinct-root fit requested at a double root");
    }
    if (mode == TailFit::double_root && !is_double) {
        std::ostringstream os;
        os << "double-root fit requested but mu1 - mu2 = " << mu1 - mu2;
        throw Error(ErrorCode::regime_mismatch, os.str());
    }
    TailCoefficients out;
    out.double_root = is_double;
    double sbr = 0.0, sbb = 0.0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < phi.size() && phi.node(i) <= 1e-12; ++i) {
        const double t = phi.node(i);
        const double b = is_double ? t * std::exp(mu1 * t) : std::exp(mu2 * t) - std::exp(mu1 * t);
        const double r = phi.values[i] - theta * std::exp(mu1 * t);
        pts.emplace_back(b, r);
        sbr += b * r;
        sbb += b * b;
    }
    if (sbb == 0.0) throw Error(ErrorCode::out_of_range, "empty fitting window");
    double coef = sbr / sbb;
    double ss = 0.0;
    for (auto [b, r] : pts) ss += (r - coef * b) * (r - coef * b);
    out.fit_rms = std::sqrt(ss / static_cast<double>(pts.size()));
    if (is_double) {
        out.value = -coef;
        out.lower = 0.0;
        out.upper = mu1 * theta / (1.0 + mu1 * tau);
        out.sharp_upper = (theta - ctx.g.g_theta() * std::exp(-mu1 * tau) / (1.0 + mu1 * mu1)) / tau;
        out.within_bounds = out.value > out.lower && out.value <= out.upper && out.value <= *out.sharp_upper;
    } else {
        out.value = coef;
        out.lower = theta;
        out.upper = mu1 * theta / (mu1 - mu2 * std::exp(-tau * (mu1 - mu2)));
        out.within_bounds = out.value > out.lower && out.value <= out.upper;
    }
    return out;
}

struct FrontInequalities {
    double phi_at_ch = 0.0;
    double gamma = 0.0;
    bool phi_at_ch_above_gamma = false;
    bool phi_at_ch_above_kappa = false;
    double max_abs_derivative = 0.0;
    double derivative_bound = 0.0;
    bool derivative_ok = false;
    std::optional<double> tau1;  // first local maximum
    bool leading_edge_increasing = false;
    bool all_hold = false;
};

/// First node where phi' turns from positive to non-positive, refined linearly.
inline std::optional<double> first_local_max(const WaveProfile& phi) {
    for (std::size_t i = 1; i + 1 < phi.size(); ++i) {
        const double a = phi.node_derivative(i), b = phi.node_derivative(i + 1);
        if (a > 0.0 && b <= 0.0) return phi.node(i) + a / (a - b) * phi.dt;
    }
    return std::nullopt;
}

inline FrontInequalities check_front_inequalities(const WaveContext& ctx, const WaveProfile& phi,
                                                  double tol = 1e-6) {
    FrontInequalities r;
    r.phi_at_ch = phi(ctx.tau);
    if (ctx.mu1 && ctx.mu2) r.gamma = ctx.g.g_theta() / (1.0 + *ctx.mu1 * *ctx.mu2);
    r.phi_at_ch_above_gamma = r.phi_at_ch >= r.gamma - tol;
    r.phi_at_ch_above_kappa = r.phi_at_ch > ctx.g.kappa();
    r.derivative_bound = ctx.g.g_theta() / std::sqrt(ctx.c * ctx.c + 4.0);
    for (std::size_t i = 0; i < phi.size(); ++i)
        r.max_abs_derivative = std::max(r.max_abs_derivative, std::abs(phi.node_derivative(i)));
    r.derivative_ok = r.max_abs_derivative <= r.derivative_bound + tol;
    r.tau1 = first_local_max(phi);
    r.leading_edge_increasing = true;
    const double stop = r.tau1 ? *r.tau1 : phi.t_end();
    for (std::size_t i = 0; i < phi.size() && phi.node(i) < stop - phi.dt; ++i) {
        if (!(phi.node_derivative(i) > 0.0)) {
            r.leading_edge_increasing = false;
            break;
        }
    }
    r.all_hold = r.phi_at_ch_above_gamma && r.derivative_ok && r.leading_edge_increasing;
    return r;
}

}  // namespace wavefront
