#pragma once

// Independent reference computations for cross-checking. Slow on purpose:
// adaptive quadrature instead of closed forms, exhaustive search instead of
// a single pass.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "wavefront/char_spectrum.hpp"
#include "wavefront/profile_solver.hpp"

namespace wavefront::oracle {

namespace detail {

template <typename F>
double integrate_split(F&& f, std::vector<double> cuts) {
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        sum += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, cuts[i], cuts[i + 1], 12, 1e-12);
    }
    return sum;
}

}  // namespace detail

/// A(phi)(t) by adaptive Gauss-Kronrod quadrature of both convolution
/// integrals; the integrand is g(phi(s - ch)) evaluated pointwise from the
/// profile (grid plus tail models). Semi-infinite ranges are truncated where
/// the kernel times the integrand has decayed by e^{-45}.
inline double operator_at(const WaveContext& ctx, const WaveProfile& phi, double t) {
    const double z1 = ctx.z1, z2 = ctx.z2, tau = ctx.tau;
    const auto& g = ctx.g;
    auto G = [&](double s) { return g.eval_unchecked(std::max(0.0, phi(s - tau))); };

    // Kinks of G: shifted grid nodes, and points where the profile crosses a
    // breakpoint of g inside a grid cell.
    std::vector<double> kinks;
    const auto bps = g.breakpoints();
    for (std::size_t i = 0; i < phi.size(); ++i) {
        kinks.push_back(phi.node(i) + tau);
        if (i + 1 == phi.size()) break;
        const double a = phi.values[i], b = phi.values[i + 1];
        for (double x : bps)
            if ((a - x) * (b - x) < 0.0) kinks.push_back(phi.node(i) + (x - a) / (b - a) * phi.dt + tau);
    }

    const double left_decay = phi.left.rate - z1;
    const double lo = std::min(t, phi.t0 + tau) - 45.0 / left_decay;
    const double hi = std::max(t, phi.t_end() + tau) + 45.0 / z2;

    std::vector<double> c1{lo, t};
    for (double k : kinks)
        if (k > lo && k < t) c1.push_back(k);
    std::vector<double> c2{t, hi};
    for (double k : kinks)
        if (k > t && k < hi) c2.push_back(k);

    const double i1 = detail::integrate_split([&](double s) { return std::exp(z1 * (t - s)) * G(s); }, c1);
    const double i2 = detail::integrate_split([&](double s) { return std::exp(z2 * (t - s)) * G(s); }, c2);
    return (i1 + i2) / (z2 - z1);
}

/// Random piecewise-linear profile: random node values in [0, g(theta)],
/// a leading edge below theta, an end close to kappa on its own segment of g,
/// and a grid step that is generally not commensurate with ch.
inline WaveProfile random_profile(const WaveContext& ctx, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const auto& g = ctx.g;
    WaveProfile phi;
    const std::size_t n = 40 + static_cast<std::size_t>(u01(rng) * 60.0);
    phi.dt = 0.05 + 0.2 * u01(rng);
    phi.t0 = -static_cast<double>(n / 3) * phi.dt;
    phi.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) phi.values[i] = g.g_theta() * u01(rng);
    phi.values.front() = 0.7 * g.theta() * u01(rng);
    const double room = std::min(g.kappa() - g.theta1(), 0.05);
    phi.values.back() = g.kappa() + room * (2.0 * u01(rng) - 1.0) * 0.9;
    phi.left.rate = 0.3 + 1.5 * u01(rng);
    if (u01(rng) < 0.5) phi.left.fast_rate = phi.left.rate + (u01(rng) < 0.3 ? 0.0 : 0.8 * u01(rng));
    phi.left.anchor = phi.t0;
    phi.left.a = phi.values.front();
    // b <= 0 keeps the tail positive and below theta.
    phi.left.b = phi.left.fast_rate ? -0.2 * phi.left.a * u01(rng) : 0.0;
    phi.right.base = g.kappa();
    phi.right.anchor = phi.t_end();
    phi.right.rate = -(0.5 + u01(rng));
    phi.right.amplitude = phi.values.back() - g.kappa();
    return phi;
}

/// Definition-based count: the longest subsequence of nonzero entries with
/// strictly alternating signs, by exhaustive dynamic programming over all
/// index pairs, minus one.
inline int sign_changes_bruteforce(const std::vector<double>& v, double zero_tol) {
    const std::size_t n = v.size();
    // best[i]: longest alternating chain ending at index i
    std::vector<int> best(n, 0);
    int answer = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::abs(v[i]) > zero_tol)) continue;
        best[i] = 1;
        for (std::size_t j = 0; j < i; ++j) {
            if (best[j] > 0 && v[j] * v[i] < 0.0) best[i] = std::max(best[i], best[j] + 1);
        }
        answer = std::max(answer, best[i] - 1);
    }
    return answer;
}

}  // namespace wavefront::oracle
