#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <string_view>
#include <tuple>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "wavefront/birth_model.hpp"
#include "wavefront/error.hpp"
#include "wavefront/numerics.hpp"

namespace wavefront {

/// chi(z) = z^2 - c z - 1 + k e^{-z tau}, tau = c h.
struct Quasipolynomial {
    double c;
    double tau;
    double k;

    static Quasipolynomial make(double c, double h, double k) { return {c, c * h, k}; }

    template <typename T>
    T operator()(const T& z) const {
        using std::exp;
        return z * z - c * z - 1.0 + k * exp(-z * tau);
    }

    template <typename T>
    T d1(const T& z) const {
        using std::exp;
        return 2.0 * z - c - k * tau * exp(-z * tau);
    }

    template <typename T>
    T d2(const T& z) const {
        using std::exp;
        return 2.0 + k * tau * tau * exp(-z * tau);
    }
};

struct RealRoot {
    double value;
    int multiplicity;
};

struct Rect {
    double re_lo;
    double re_hi;
    double im_lo;
    double im_hi;

    double width() const noexcept { return re_hi - re_lo; }
    double height() const noexcept { return im_hi - im_lo; }
    bool contains(std::complex<double> z, double tol = 0.0) const noexcept {
        return z.real() >= re_lo - tol && z.real() <= re_hi + tol && z.imag() >= im_lo - tol &&
               z.imag() <= im_hi + tol;
    }
};

struct SpectrumReport {
    std::vector<RealRoot> real_roots;
    std::vector<std::complex<double>> complex_roots;
    Rect window{};
};

/// Roots z1 < 0 < z2 of z^2 - c z - 1.
inline std::pair<double, double> base_roots(double c) {
    const double s = std::sqrt(c * c + 4.0);
    // z1 z2 = -1; the second root avoids cancellation for large c.
    const double z2 = 0.5 * (c + s);
    return {-1.0 / z2, z2};
}

namespace detail {

// Root-pair separation below which a critical point is reported as a double root.
inline constexpr double kDoubleRootGap = 1e-6;

inline std::optional<double> inflection_point(const Quasipolynomial& qp) {
    if (qp.k >= 0.0 || qp.tau <= 0.0) return std::nullopt;
    return -std::log(-2.0 / (qp.k * qp.tau * qp.tau)) / qp.tau;
}

}  // namespace detail

/// All real zeros of chi on [lo, hi] with multiplicity.
///
/// chi'' is monotone in z, so it has at most one zero; splitting there leaves
/// pieces on which chi' is monotone, whose zeros (critical points of chi) cut
/// the window into pieces where chi is monotone and has at most one zero.
/// A critical point whose neighbouring roots would be closer than 1e-6 is
/// reported as a double root.
inline std::vector<RealRoot> real_roots(const Quasipolynomial& qp, double lo, double hi) {
    if (!(lo < hi)) throw Error(ErrorCode::out_of_range, "real_roots needs lo < hi");
    auto f = [&](double z) { return qp(z); };
    auto df = [&](double z) { return qp.d1(z); };

    std::vector<double> cuts{lo, hi};
    if (auto zi = detail::inflection_point(qp); zi && *zi > lo && *zi < hi) cuts.push_back(*zi);
    std::sort(cuts.begin(), cuts.end());

    std::vector<double> critical;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        const double fa = df(a), fb = df(b);
        if (fa == 0.0) critical.push_back(a);
        else if (fa * fb < 0.0) critical.push_back(numerics::bracket_root(df, a, b, fa, fb));
    }
    if (df(hi) == 0.0) critical.push_back(hi);
    std::sort(critical.begin(), critical.end());
    critical.erase(std::unique(critical.begin(), critical.end()), critical.end());

    struct Double {
        double z;
    };
    std::vector<Double> doubles;
    for (double zc : critical) {
        const double curvature = std::abs(qp.d2(zc));
        if (curvature == 0.0) continue;
        const double gap = std::sqrt(2.0 * std::abs(f(zc)) / curvature);
        if (gap < detail::kDoubleRootGap) doubles.push_back({zc});
    }

    std::vector<double> pieces{lo};
    for (double zc : critical)
        if (zc > lo && zc < hi) pieces.push_back(zc);
    pieces.push_back(hi);

    std::vector<RealRoot> out;
    for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
        const double a = pieces[i], b = pieces[i + 1];
        const double fa = f(a), fb = f(b);
        std::optional<double> r;
        if (fa == 0.0 && i == 0) r = a;
        else if (fb == 0.0) r = b;
        else if (fa * fb < 0.0) r = numerics::bracket_root(f, a, b, fa, fb);
        if (!r) continue;
        const bool near_double = std::any_of(doubles.begin(), doubles.end(), [&](const Double& d) {
            return std::abs(*r - d.z) <= detail::kDoubleRootGap;
        });
        if (!near_double) out.push_back({*r, 1});
    }
    for (const auto& d : doubles)
        if (d.z >= lo && d.z <= hi) out.push_back({d.z, 2});
    std::sort(out.begin(), out.end(), [](const RealRoot& a, const RealRoot& b) { return a.value < b.value; });
    return out;
}

/// Window that provably contains every real zero of chi. Starts from
/// [-20/max(1,tau), 20+c] and widens the left end for k < 0 until chi is
/// negative, increasing and concave there.
inline std::pair<double, double> spectral_window(const Quasipolynomial& qp) {
    double lo = -20.0 / std::max(1.0, qp.tau);
    const double hi = std::max(20.0 + qp.c, base_roots(qp.c).second + 1.0);
    if (qp.k < 0.0 && qp.tau > 0.0) {
        const double zi = *detail::inflection_point(qp);
        for (int i = 0; i < 64; ++i) {
            if (qp(lo) < 0.0 && qp.d1(lo) > 0.0 && lo < zi) break;
            lo = std::min(lo * 2.0, zi - 1.0);
        }
    } else {
        // For k >= 0 the negative zeros satisfy z^2 - c z < 1.
        lo = std::min(lo, base_roots(qp.c).first - 1.0);
    }
    return {lo, hi};
}

inline std::vector<RealRoot> real_roots(const Quasipolynomial& qp) {
    auto [lo, hi] = spectral_window(qp);
    return real_roots(qp, lo, hi);
}

namespace detail {

inline int count_roots(const std::vector<RealRoot>& roots, int sign) {
    int n = 0;
    for (const auto& r : roots)
        if ((sign > 0 && r.value > 0.0) || (sign < 0 && r.value < 0.0)) n += r.multiplicity;
    return n;
}

}  // namespace detail

enum class Branch { positive_double_root, negative_double_root };

struct CriticalSpeed {
    double c;
    double z_double;
    int newton_iterations;
};

/// Tangency speed: solves chi = chi' = 0 for (c, z) by Newton's method with
/// the analytic Jacobian. The seed comes from a 0.01-resolution scan in c for
/// the switch between zero and two real roots of the branch sign.
inline CriticalSpeed critical_speed(double k, double h, Branch branch, double c_max = 100.0) {
    const int sign = branch == Branch::positive_double_root ? 1 : -1;
    if (sign > 0 && !(k > 1.0)) throw Error(ErrorCode::no_tangency, "positive branch needs k > 1");
    if (sign < 0 && !(k < 0.0)) throw Error(ErrorCode::no_tangency, "negative branch needs k < 0");

    auto count_at = [&](double c) { return detail::count_roots(real_roots(Quasipolynomial::make(c, h, k)), sign); };

    const double step = 0.01;
    double c_lo = 0.0, c_hi = 0.0;
    bool found = false;
    int prev = count_at(step);
    for (double c = 2 * step; c <= c_max; c += step) {
        const int cur = count_at(c);
        const bool switch_on = sign > 0 && prev == 0 && cur >= 2;
        const bool switch_off = sign < 0 && prev >= 2 && cur == 0;
        if (switch_on || switch_off) {
            c_lo = c - step;
            c_hi = c;
            found = true;
            break;
        }
        prev = cur;
    }
    if (!found) {
        std::ostringstream os;
        os << "no change in the number of " << (sign > 0 ? "positive" : "negative") << " roots for c in (0, "
           << c_max << "]";
        throw Error(ErrorCode::no_tangency, os.str());
    }

    // Seed z at the critical point of chi that carries the tangency.
    double c = 0.5 * (c_lo + c_hi);
    double z = 0.0;
    {
        const auto qp = Quasipolynomial::make(c, h, k);
        auto [lo, hi] = spectral_window(qp);
        auto df = [&](double x) { return qp.d1(x); };
        std::vector<double> cuts{lo, hi};
        if (auto zi = detail::inflection_point(qp); zi && *zi > lo && *zi < hi) cuts.push_back(*zi);
        std::sort(cuts.begin(), cuts.end());
        bool seeded = false;
        for (std::size_t i = 0; i + 1 < cuts.size() && !seeded; ++i) {
            const double fa = df(cuts[i]), fb = df(cuts[i + 1]);
            if (fa * fb < 0.0) {
                const double zc = numerics::bracket_root(df, cuts[i], cuts[i + 1], fa, fb);
                if ((sign > 0 && zc > 0.0) || (sign < 0 && zc < 0.0)) {
                    z = zc;
                    seeded = true;
                }
            }
        }
        if (!seeded) throw Error(ErrorCode::no_tangency, "no critical point of the branch sign");
    }

    for (int it = 1; it <= 100; ++it) {
        const double tau = c * h;
        const double e = std::exp(-z * tau);
        const double f1 = z * z - c * z - 1.0 + k * e;
        const double f2 = 2.0 * z - c - k * tau * e;
        const double j11 = f2;
        const double j12 = -z - k * z * h * e;
        const double j21 = 2.0 + k * tau * tau * e;
        const double j22 = -1.0 - k * h * e + k * c * z * h * h * e;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det)) break;
        const double dz = (f1 * j22 - f2 * j12) / det;
        const double dc = (j11 * f2 - j21 * f1) / det;
        z -= dz;
        c -= dc;
        if (std::abs(dz) <= 1e-15 * std::max(1.0, std::abs(z)) && std::abs(dc) <= 1e-15 * std::max(1.0, c)) {
            return {c, z, it};
        }
    }
    throw Error(ErrorCode::no_convergence, "tangency Newton iteration did not converge");
}

struct DomainReport {
    bool in_dl = false;
    int positive_roots_chi0 = 0;
    int negative_roots_chi_kappa = 0;
    std::vector<RealRoot> roots_chi0;
    std::vector<RealRoot> roots_chi_kappa;
    std::string diagnostics;
};

/// (h, c) belongs to the admissible region iff chi_0 has exactly two positive
/// and chi_kappa exactly two negative real roots, multiplicity counted.
inline DomainReport in_domain_dl(const PiecewiseLinearBirth& g, double h, double c) {
    DomainReport r;
    r.roots_chi0 = real_roots(Quasipolynomial::make(c, h, g.k1()));
    r.roots_chi_kappa = real_roots(Quasipolynomial::make(c, h, g.slope_left(g.kappa())));
    r.positive_roots_chi0 = detail::count_roots(r.roots_chi0, +1);
    r.negative_roots_chi_kappa = detail::count_roots(r.roots_chi_kappa, -1);
    r.in_dl = r.positive_roots_chi0 == 2 && r.negative_roots_chi_kappa == 2;
    std::ostringstream os;
    os << "chi_0 has " << r.positive_roots_chi0 << " positive real roots; chi_kappa has "
       << r.negative_roots_chi_kappa << " negative real roots";
    r.diagnostics = os.str();
    return r;
}

/// xi(h, c) = (z2 - z1)/(z2 e^{-c h z1} - z1 e^{-c h z2}), a value in [e^{-h}, 1].
inline double xi(double h, double c) {
    const auto [z1, z2] = base_roots(c);
    const double tau = c * h;
    return (z2 - z1) / (z2 * std::exp(-tau * z1) - z1 * std::exp(-tau * z2));
}

/// Closed-form lower bound (1 + 1.53 c^2)/(2.55 + 1.53 c^2) for gamma(c),
/// valid for the reference birth function with h = 2.
inline double gamma1_reference(double c) {
    const double c2 = 1.53 * c * c;
    return (1.0 + c2) / (2.55 + c2);
}

struct ComplexRootSearch {
    std::vector<std::complex<double>> roots;
    int winding_count = 0;
    Rect rect{};
};

namespace detail {

inline double chi_scale(std::complex<double> z) { return std::max(1.0, std::norm(z)); }

/// (1/2 pi i) * contour integral of chi'/chi over the rectangle, by the
/// composite trapezoid rule with n points per edge, doubling n until the
/// rounded value is stable. Returns nullopt if a zero sits on the contour.
inline std::optional<int> winding_number(const Quasipolynomial& qp, const Rect& r) {
    using C = std::complex<double>;
    const std::array<C, 5> corners{C(r.re_lo, r.im_lo), C(r.re_hi, r.im_lo), C(r.re_hi, r.im_hi),
                                   C(r.re_lo, r.im_hi), C(r.re_lo, r.im_lo)};
    long previous = 0;
    bool have_previous = false;
    for (int n = 512; n <= (1 << 17); n *= 2) {
        C total(0.0, 0.0);
        double min_ratio = std::numeric_limits<double>::infinity();
        for (int e = 0; e < 4; ++e) {
            const C a = corners[e], b = corners[e + 1];
            const C dz = (b - a) / static_cast<double>(n);
            C edge(0.0, 0.0);
            for (int j = 0; j <= n; ++j) {
                const C z = a + static_cast<double>(j) * dz;
                const C v = qp(z);
                min_ratio = std::min(min_ratio, std::abs(v) / chi_scale(z));
                const C w = qp.d1(z) / v;
                edge += (j == 0 || j == n) ? 0.5 * w : w;
            }
            total += edge * dz;
        }
        if (min_ratio < 1e-9 || !std::isfinite(std::abs(total))) return std::nullopt;
        const double wn = total.imag() / (2.0 * std::numbers::pi);
        const long rounded = std::lround(wn);
        if (std::abs(wn - static_cast<double>(rounded)) < 0.05 && std::abs(total.real()) < 0.3) {
            if (have_previous && previous == rounded) return static_cast<int>(rounded);
            previous = rounded;
            have_previous = true;
        } else {
            have_previous = false;
        }
    }
    return std::nullopt;
}

inline std::optional<std::complex<double>> complex_newton(const Quasipolynomial& qp, std::complex<double> z) {
    for (int it = 0; it < 60; ++it) {
        const auto d = qp.d1(z);
        if (d == std::complex<double>(0.0, 0.0)) return std::nullopt;
        const auto step = qp(z) / d;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) return z;
    }
    if (std::abs(qp(z)) <= 1e-10 * chi_scale(z)) return z;
    return std::nullopt;
}

inline void locate_roots(const Quasipolynomial& qp, const Rect& r, int count, int depth,
                         std::vector<std::complex<double>>& out) {
    if (count <= 0) return;
    const double size = std::max(r.width(), r.height());
    if (count == 1 || size < 1e-9 || depth > 60) {
        const std::complex<double> center(0.5 * (r.re_lo + r.re_hi), 0.5 * (r.im_lo + r.im_hi));
        if (auto z = complex_newton(qp, center); z && r.contains(*z, 1e-9 * std::max(1.0, size))) {
            for (int i = 0; i < count; ++i) out.push_back(*z);
            return;
        }
        if (size < 1e-9 || depth > 60) throw Error(ErrorCode::no_convergence, "complex Newton failed in a tiny cell");
    }
    // Off-centre split so that symmetric features (the real axis) avoid the cut.
    const double fr = 0.5123456789;
    const double xm = r.re_lo + fr * r.width();
    const double ym = r.im_lo + fr * r.height();
    std::array<Rect, 4> children{Rect{r.re_lo, xm, r.im_lo, ym}, Rect{xm, r.re_hi, r.im_lo, ym},
                                 Rect{r.re_lo, xm, ym, r.im_hi}, Rect{xm, r.re_hi, ym, r.im_hi}};
    std::array<int, 4> counts{};
    int total = 0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        bool ok = true;
        total = 0;
        for (int i = 0; i < 4; ++i) {
            auto w = winding_number(qp, children[i]);
            if (!w) {
                ok = false;
                break;
            }
            counts[i] = *w;
            total += *w;
        }
        if (ok && total == count) break;
        // Nudge the interior cut lines and retry.
        const double f2 = fr + 0.0371 * (attempt + 1);
        const double x2 = r.re_lo + f2 * r.width();
        const double y2 = r.im_lo + f2 * r.height();
        children = {Rect{r.re_lo, x2, r.im_lo, y2}, Rect{x2, r.re_hi, r.im_lo, y2}, Rect{r.re_lo, x2, y2, r.im_hi},
                    Rect{x2, r.re_hi, y2, r.im_hi}};
        total = -1;
    }
    if (total != count) throw Error(ErrorCode::boundary_zero, "could not split a cell without hitting a zero");
    for (int i = 0; i < 4; ++i) locate_roots(qp, children[i], counts[i], depth + 1, out);
}

}  // namespace detail

/// Zeros of chi inside a rectangle: argument-principle counts with adaptive
/// quadrisection, refined by complex Newton. A contour that passes through a
/// zero is enlarged slightly a few times before giving up.
inline ComplexRootSearch complex_roots_in_rect(const Quasipolynomial& qp, Rect rect) {
    if (!(rect.re_lo < rect.re_hi && rect.im_lo < rect.im_hi)) {
        throw Error(ErrorCode::out_of_range, "degenerate rectangle");
    }
    std::optional<int> w;
    for (int attempt = 0; attempt < 4 && !w; ++attempt) {
        w = detail::winding_number(qp, rect);
        if (!w) {
            const double eps = 1e-7 * std::max(rect.width(), rect.height()) * (attempt + 1);
            rect = {rect.re_lo - eps, rect.re_hi + eps, rect.im_lo - eps, rect.im_hi + eps};
        }
    }
    if (!w) throw Error(ErrorCode::boundary_zero, "a zero lies on the search contour");
    ComplexRootSearch out;
    out.rect = rect;
    out.winding_count = *w;
    detail::locate_roots(qp, rect, *w, 0, out.roots);
    std::sort(out.roots.begin(), out.roots.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag();
    });
    return out;
}

/// Leading decaying oscillatory mode: the zero of chi with Re < 0, Im > 0 and
/// the largest real part. Only meaningful when chi has no negative real zero.
inline std::optional<std::complex<double>> leading_complex_root(const Quasipolynomial& qp) {
    auto [lo, hi] = spectral_window(qp);
    const double top = qp.tau > 0.0 ? 4.0 * std::numbers::pi / qp.tau : 10.0;
    auto found = complex_roots_in_rect(qp, {lo, -1e-9, 1e-12, top});
    std::optional<std::complex<double>> best;
    for (auto z : found.roots)
        if (z.imag() > 1e-12 && (!best || z.real() > best->real())) best = z;
    return best;
}

enum class Regime { front, oscillatory, no_front };

constexpr std::string_view to_string(Regime r) noexcept {
    switch (r) {
        case Regime::front: return "front";
        case Regime::oscillatory: return "oscillatory";
        case Regime::no_front: return "no-front";
    }
    return "unknown";
}

/// A resolved (g, h, c) instance with every characteristic root the profile
/// solver and the classifier need.
struct WaveContext {
    PiecewiseLinearBirth g;
    double h = 0.0;
    double c = 0.0;
    double tau = 0.0;
    double z1 = 0.0;
    double z2 = 0.0;
    std::optional<double> mu1{};      // larger positive root of chi_0
    std::optional<double> mu2{};      // smaller positive root of chi_0
    std::optional<double> lambda1{};  // negative root of chi_kappa closest to 0
    std::optional<double> lambda2{};  // other negative root
    std::optional<double> lambda3{};  // positive root of chi_kappa
    bool mu_double = false;
    bool lambda_double = false;
    bool in_dl = false;
    Regime regime = Regime::no_front;
    std::optional<std::complex<double>> oscillatory_mode{};  // leading complex root of chi_kappa

    Quasipolynomial chi0() const { return Quasipolynomial::make(c, h, g.k1()); }
    Quasipolynomial chi_kappa() const { return Quasipolynomial::make(c, h, g.slope_left(g.kappa())); }
};

inline WaveContext make_context(const PiecewiseLinearBirth& g, double h, double c) {
    if (!(h >= 0.0) || !(c > 0.0)) throw Error(ErrorCode::not_in_domain, "need h >= 0 and c > 0");
    WaveContext ctx{.g = g};
    ctx.h = h;
    ctx.c = c;
    ctx.tau = c * h;
    std::tie(ctx.z1, ctx.z2) = base_roots(c);

    const auto dom = in_domain_dl(g, h, c);
    ctx.in_dl = dom.in_dl;

    std::vector<double> pos;
    for (const auto& r : dom.roots_chi0)
        if (r.value > 0.0)
            for (int m = 0; m < r.multiplicity; ++m) pos.push_back(r.value);
    if (pos.size() == 2) {
        ctx.mu1 = std::max(pos[0], pos[1]);
        ctx.mu2 = std::min(pos[0], pos[1]);
        ctx.mu_double = std::any_of(dom.roots_chi0.begin(), dom.roots_chi0.end(),
                                    [](const RealRoot& r) { return r.value > 0.0 && r.multiplicity == 2; });
    }

    std::vector<double> neg;
    for (const auto& r : dom.roots_chi_kappa) {
        if (r.value < 0.0)
            for (int m = 0; m < r.multiplicity; ++m) neg.push_back(r.value);
        else if (r.value > 0.0) ctx.lambda3 = r.value;
    }
    if (neg.size() == 2) {
        ctx.lambda1 = std::max(neg[0], neg[1]);
        ctx.lambda2 = std::min(neg[0], neg[1]);
        ctx.lambda_double = std::any_of(dom.roots_chi_kappa.begin(), dom.roots_chi_kappa.end(),
                                        [](const RealRoot& r) { return r.value < 0.0 && r.multiplicity == 2; });
    }

    if (ctx.in_dl) {
        ctx.regime = Regime::front;
    } else if (ctx.mu1 && neg.empty()) {
        ctx.regime = Regime::oscillatory;
        ctx.oscillatory_mode = leading_complex_root(ctx.chi_kappa());
    } else {
        ctx.regime = Regime::no_front;
    }
    return ctx;
}

/// gamma(c) = g(theta)/(1 + mu1 mu2).
inline double gamma(const PiecewiseLinearBirth& g, double h, double c) {
    const auto ctx = make_context(g, h, c);
    if (!ctx.in_dl) {
        std::ostringstream os;
        os << "(h, c) = (" << h << ", " << c << ") outside the admissible region";
        throw Error(ErrorCode::not_in_domain, os.str());
    }
    return g.g_theta() / (1.0 + *ctx.mu1 * *ctx.mu2);
}

}  // namespace wavefront
