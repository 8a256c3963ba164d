#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "wavefront/error.hpp"

namespace wavefront {

/// y = slope * x + intercept on [lo, hi].
struct AffinePiece {
    double lo;
    double hi;
    double slope;
    double intercept;

    double operator()(double x) const noexcept { return slope * x + intercept; }
};

/// Continuous piecewise-affine map of an interval [a, b]. Pieces are ordered
/// and abut exactly; values agree across breakpoints.
class IntervalMap {
public:
    IntervalMap() = default;

    explicit IntervalMap(std::vector<AffinePiece> pieces, std::optional<double> fixed_point = std::nullopt)
        : pieces_(std::move(pieces)), fixed_point_(fixed_point) {
        validate();
    }

    static IntervalMap identity(double a, double b) { return IntervalMap({{a, b, 1.0, 0.0}}); }
    static IntervalMap constant(double a, double b, double value) { return IntervalMap({{a, b, 0.0, value}}); }

    double lo() const noexcept { return pieces_.front().lo; }
    double hi() const noexcept { return pieces_.back().hi; }
    const std::vector<AffinePiece>& pieces() const noexcept { return pieces_; }
    std::optional<double> fixed_point() const noexcept { return fixed_point_; }
    void set_fixed_point(std::optional<double> k) { fixed_point_ = k; }

    bool contains(double x, double tol = 0.0) const noexcept { return x >= lo() - tol && x <= hi() + tol; }

    const AffinePiece& piece_at(double x) const {
        auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                                   [](double v, const AffinePiece& p) { return v < p.hi; });
        if (it == pieces_.end()) return pieces_.back();
        return *it;
    }

    double operator()(double x) const {
        const double tol = 1e-12 * std::max(1.0, std::abs(hi() - lo()));
        if (!contains(x, tol)) {
            std::ostringstream os;
            os << "x=" << x << " outside [" << lo() << ", " << hi() << "]";
            throw Error(ErrorCode::out_of_range, os.str());
        }
        return piece_at(std::clamp(x, lo(), hi()))(x);
    }

    std::vector<double> breakpoints() const {
        std::vector<double> out;
        out.reserve(pieces_.size() + 1);
        out.push_back(lo());
        for (const auto& p : pieces_) out.push_back(p.hi);
        return out;
    }

    /// Exact [min, max] of the image; attained at breakpoints.
    std::pair<double, double> image() const {
        double mn = std::numeric_limits<double>::infinity();
        double mx = -mn;
        for (const auto& p : pieces_) {
            for (double v : {p(p.lo), p(p.hi)}) {
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
        }
        return {mn, mx};
    }

    bool maps_into_itself(double tol = 1e-12) const {
        auto [mn, mx] = image();
        return mn >= lo() - tol && mx <= hi() + tol;
    }

    double max_abs_slope() const noexcept {
        double m = 0.0;
        for (const auto& p : pieces_) m = std::max(m, std::abs(p.slope));
        return m;
    }

    IntervalMap restricted(double a, double b) const {
        if (a > b || !contains(a, 1e-12) || !contains(b, 1e-12)) {
            throw Error(ErrorCode::out_of_range, "restriction interval not inside the domain");
        }
        std::vector<AffinePiece> out;
        for (const auto& p : pieces_) {
            const double l = std::max(p.lo, a);
            const double h = std::min(p.hi, b);
            if (h > l) out.push_back({l, h, p.slope, p.intercept});
        }
        if (out.empty()) out.push_back({a, b, piece_at(a).slope, piece_at(a).intercept});
        return IntervalMap(std::move(out), fixed_point_);
    }

    /// Inverse of a strictly monotone map, defined on its image.
    IntervalMap inverse() const {
        std::vector<AffinePiece> out;
        bool increasing = pieces_.front().slope > 0.0;
        for (const auto& p : pieces_) {
            if (p.slope == 0.0 || (p.slope > 0.0) != increasing) {
                throw Error(ErrorCode::invalid_geometry, "inverse requires a strictly monotone map");
            }
            const double y0 = p(p.lo);
            const double y1 = p(p.hi);
            out.push_back({std::min(y0, y1), std::max(y0, y1), 1.0 / p.slope, -p.intercept / p.slope});
        }
        if (!increasing) std::reverse(out.begin(), out.end());
        // Snap shared endpoints so the pieces abut exactly.
        for (std::size_t i = 1; i < out.size(); ++i) out[i].lo = out[i - 1].hi;
        return IntervalMap(std::move(out));
    }

    /// Every x with map(x) = x: isolated solutions per piece, plus whole
    /// pieces lying on the diagonal (reported by their endpoints).
    std::vector<double> fixed_points(double tol = 1e-12) const {
        std::vector<double> out;
        for (const auto& p : pieces_) {
            if (std::abs(p.slope - 1.0) < tol) {
                if (std::abs(p.intercept) < tol) {
                    out.push_back(p.lo);
                    out.push_back(p.hi);
                }
                continue;
            }
            const double x = p.intercept / (1.0 - p.slope);
            if (x >= p.lo - tol && x <= p.hi + tol) out.push_back(x);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end(), [tol](double a, double b) { return std::abs(a - b) <= 10 * tol; }),
                  out.end());
        return out;
    }

private:
    void validate() const {
        if (pieces_.empty()) throw Error(ErrorCode::invalid_geometry, "interval map without pieces");
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const auto& p = pieces_[i];
            if (!(p.hi >= p.lo)) throw Error(ErrorCode::invalid_geometry, "piece with hi < lo");
            if (i > 0) {
                const auto& q = pieces_[i - 1];
                const double scale = std::max({1.0, std::abs(q.hi), std::abs(q(q.hi))});
                if (std::abs(q.hi - p.lo) > 1e-12 * scale) {
                    throw Error(ErrorCode::invalid_geometry, "pieces do not abut");
                }
                if (std::abs(q(q.hi) - p(p.lo)) > 1e-10 * scale) {
                    std::ostringstream os;
                    os << "discontinuity at x=" << p.lo << ": " << q(q.hi) << " vs " << p(p.lo);
                    throw Error(ErrorCode::invalid_geometry, os.str());
                }
            }
        }
    }

    std::vector<AffinePiece> pieces_;
    std::optional<double> fixed_point_;
};

/// outer(inner(x)) on the domain of inner. Breakpoints of outer are pulled
/// back through each affine piece of inner, so the result is exact.
inline IntervalMap compose(const IntervalMap& outer, const IntervalMap& inner) {
    const auto [mn, mx] = inner.image();
    const double tol = 1e-12 * std::max({1.0, std::abs(mn), std::abs(mx)});
    if (mn < outer.lo() - tol || mx > outer.hi() + tol) {
        std::ostringstream os;
        os << "image [" << mn << ", " << mx << "] not inside [" << outer.lo() << ", " << outer.hi() << "]";
        throw Error(ErrorCode::not_invariant, os.str());
    }
    const auto outer_breaks = outer.breakpoints();
    std::vector<AffinePiece> out;
    for (const auto& p : inner.pieces()) {
        std::vector<double> cuts{p.lo, p.hi};
        if (p.slope != 0.0) {
            const double y0 = p(p.lo);
            const double y1 = p(p.hi);
            const double ylo = std::min(y0, y1);
            const double yhi = std::max(y0, y1);
            for (std::size_t k = 1; k + 1 < outer_breaks.size(); ++k) {
                const double yb = outer_breaks[k];
                if (yb > ylo && yb < yhi) cuts.push_back((yb - p.intercept) / p.slope);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
            const double a = cuts[j];
            const double b = cuts[j + 1];
            if (b <= a) continue;
            const double ym = std::clamp(p(0.5 * (a + b)), outer.lo(), outer.hi());
            const auto& o = outer.piece_at(ym);
            out.push_back({a, b, o.slope * p.slope, o.slope * p.intercept + o.intercept});
        }
    }
    for (std::size_t i = 1; i < out.size(); ++i) out[i].lo = out[i - 1].hi;
    return IntervalMap(std::move(out), inner.fixed_point());
}

/// alpha * f + beta * g on the common domain, breakpoints merged.
inline IntervalMap linear_combination(const IntervalMap& f, double alpha, const IntervalMap& g, double beta) {
    const double a = std::max(f.lo(), g.lo());
    const double b = std::min(f.hi(), g.hi());
    if (!(b > a)) throw Error(ErrorCode::out_of_range, "maps have no common domain");
    std::vector<double> cuts{a, b};
    for (double x : f.breakpoints())
        if (x > a && x < b) cuts.push_back(x);
    for (double x : g.breakpoints())
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<AffinePiece> out;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        const double m = 0.5 * (cuts[j] + cuts[j + 1]);
        const auto& pf = f.piece_at(m);
        const auto& pg = g.piece_at(m);
        out.push_back({cuts[j], cuts[j + 1], alpha * pf.slope + beta * pg.slope,
                       alpha * pf.intercept + beta * pg.intercept});
    }
    return IntervalMap(std::move(out));
}

inline IntervalMap scaled(const IntervalMap& f, double factor) {
    std::vector<AffinePiece> out = f.pieces();
    for (auto& p : out) {
        p.slope *= factor;
        p.intercept *= factor;
    }
    return IntervalMap(std::move(out), f.fixed_point());
}

}  // namespace wavefront
