#pragma once

// Small numerical kernels shared by the spectral and profile modules.

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include "wavefront/error.hpp"

namespace wavefront::numerics {

namespace detail {

template <typename T>
T abs_value(const T& x) {
    using std::abs;
    return abs(x);
}

}  // namespace detail

/// phi1(x) = (e^x - 1)/x, continuous at 0. Works for real and complex x.
template <typename T>
T phi1(const T& x) {
    if (detail::abs_value(x) < 0.2) {
        // sum_{k>=0} x^k/(k+1)!
        T term = T(1.0);
        T sum = T(1.0);
        for (int k = 1; k < 16; ++k) {
            term *= x / static_cast<double>(k + 1);
            sum += term;
        }
        return sum;
    }
    if constexpr (std::is_floating_point_v<T>) {
        return std::expm1(x) / x;
    } else {
        return (std::exp(x) - T(1.0)) / x;
    }
}

/// phi2(x) = (e^x - 1 - x)/x^2 = int_0^1 (1 - v) e^{x v} dv.
template <typename T>
T phi2(const T& x) {
    if (detail::abs_value(x) < 0.2) {
        // sum_{k>=0} x^k/(k+2)!
        T term = T(0.5);
        T sum = T(0.5);
        for (int k = 1; k < 16; ++k) {
            term *= x / static_cast<double>(k + 2);
            sum += term;
        }
        return sum;
    }
    return (phi1(x) - T(1.0)) / x;
}

/// Exponential moments of a piece of length w:
///   m0 = int_0^w e^{-z u} du,  m1 = int_0^w u e^{-z u} du.
struct ExpMoments {
    double m0;
    double m1;
};

inline ExpMoments exp_moments(double z, double w) {
    const double x = -z * w;
    const double p1 = phi1(x);
    // int_0^w u e^{-zu} du = w^2 * int_0^1 v e^{x v} dv = w^2 (phi1(x) - phi2(x))
    const double p2 = phi2(x);
    return {w * p1, w * w * (p1 - p2)};
}

/// Root of f on [lo, hi] given a sign change. Uses TOMS 748.
template <typename F>
double bracket_root(F&& f, double lo, double hi, double flo, double fhi) {
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    std::uintmax_t max_iter = 200;
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 2);
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, max_iter);
    return 0.5 * (a + b);
}

template <typename F>
double bracket_root(F&& f, double lo, double hi) {
    return bracket_root(f, lo, hi, f(lo), f(hi));
}

}  // namespace wavefront::numerics
