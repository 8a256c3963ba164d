#pragma once

// Acceptance suite for the reference model (k1=3, k2=-3, k3=-0.25,
// theta=1/3, kappa=0.53, h=2). Shared by the acceptance test binary and the
// replicate-paper command.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "wavefront/birth_model.hpp"
#include "wavefront/char_spectrum.hpp"
#include "wavefront/error.hpp"
#include "wavefront/map_dynamics.hpp"
#include "wavefront/oracles.hpp"
#include "wavefront/pde_oracle.hpp"
#include "wavefront/profile_solver.hpp"
#include "wavefront/shape_classifier.hpp"

namespace wavefront::acceptance {

/// One checked quantity: what was computed, what was expected (tolerance included).
struct Line {
    std::string label;
    std::string computed;
    std::string expected;
    bool pass = false;
};

struct Criterion {
    int id = 0;
    std::string title;
    std::string anchor;
    std::vector<Line> lines;
    std::string error;  // set when the run threw
    double seconds = 0.0;
    bool pass = false;
};

namespace detail {

inline std::string num(double x, int prec = 6) {
    std::ostringstream os;
    os.precision(prec);
    os << x;
    return os.str();
}

inline Line in_range(std::string label, double v, double lo, double hi, int prec = 6) {
    return {std::move(label), num(v, prec), "[" + num(lo, prec) + ", " + num(hi, prec) + "]", v >= lo && v <= hi};
}

inline Line near(std::string label, double v, double center, double tol, int prec = 6) {
    return {std::move(label), num(v, prec), num(center, prec) + " +- " + num(tol, 3), std::abs(v - center) <= tol};
}

inline Line below(std::string label, double v, double bound, int prec = 6) {
    return {std::move(label), num(v, prec), "< " + num(bound, prec), v < bound};
}

inline Line at_least(std::string label, double v, double bound, int prec = 6) {
    return {std::move(label), num(v, prec), ">= " + num(bound, prec), v >= bound};
}

inline Line flag(std::string label, bool ok, std::string computed, std::string expected) {
    return {std::move(label), std::move(computed), std::move(expected), ok};
}

inline Line yes(std::string label, bool ok) { return flag(std::move(label), ok, ok ? "yes" : "no", "yes"); }

using clock = std::chrono::steady_clock;

inline double since(clock::time_point t0) { return std::chrono::duration<double>(clock::now() - t0).count(); }

}  // namespace detail

/// Solved profile plus the time it took.
struct SolvedFront {
    WaveContext ctx;
    WaveProfile phi;
    double seconds = 0.0;
};

class Suite {
public:
    static constexpr int kCount = 15;

    Suite() : g_(reference_birth()) {}

    const PiecewiseLinearBirth& model() const { return g_; }
    double h() const { return h_; }

    double c_star() {
        if (!c_star_) c_star_ = critical_speed(g_.k1(), h_, Branch::positive_double_root).c;
        return *c_star_;
    }
    double c_star2() {
        if (!c_star2_) c_star2_ = critical_speed(g_.slope_left(g_.kappa()), h_, Branch::negative_double_root).c;
        return *c_star2_;
    }

    /// Cached profile for speed c (solved once per suite).
    const SolvedFront& front(double c) {
        auto it = fronts_.find(c);
        if (it != fronts_.end()) return it->second;
        const auto t0 = detail::clock::now();
        auto ctx = make_context(g_, h_, c);
        auto phi = solve_profile(ctx);
        SolvedFront f{std::move(ctx), std::move(phi), 0.0};
        f.seconds = detail::since(t0);
        return fronts_.emplace(c, std::move(f)).first->second;
    }

    Criterion run(int id) {
        Criterion cr;
        cr.id = id;
        const auto t0 = detail::clock::now();
        try {
            switch (id) {
                case 1: critical_speeds(cr); break;
                case 2: double_root(cr); break;
                case 3: rho_monotonicity(cr); break;
                case 4: gamma_threshold(cr); break;
                case 5: hypotheses(cr); break;
                case 6: domain_boundary(cr); break;
                case 7: minimal_front(cr); break;
                case 8: fronts_above_minimal(cr); break;
                case 9: oscillatory(cr); break;
                case 10: complex_roots(cr); break;
                case 11: secant_remark(cr); break;
                case 12: operator_oracle(cr); break;
                case 13: sc_oracle(cr); break;
                case 14: pde_cross_check(cr); break;
                case 15: negative_control(cr); break;
                default: throw Error(ErrorCode::invalid_config, "criterion id out of range");
            }
        } catch (const std::exception& e) {
            cr.error = e.what();
        }
        if (cr.seconds == 0.0) cr.seconds = detail::since(t0);
        cr.pass = cr.error.empty() && !cr.lines.empty() &&
                  std::all_of(cr.lines.begin(), cr.lines.end(), [](const Line& l) { return l.pass; });
        return cr;
    }

    std::vector<Criterion> run_all() {
        std::vector<Criterion> out;
        for (int id = 1; id <= kCount; ++id) out.push_back(run(id));
        return out;
    }

private:
    PiecewiseLinearBirth g_;
    double h_ = 2.0;
    std::optional<double> c_star_, c_star2_;
    std::map<double, SolvedFront> fronts_;

    void critical_speeds(Criterion& cr) {
        cr.title = "critical speeds";
        cr.anchor = "minimal speed c* = 0.712..., critical speed c** = 0.751...";
        const auto t0 = detail::clock::now();
        const double a = c_star();
        const double b = c_star2();
        const double secs = detail::since(t0);
        cr.lines.push_back(detail::in_range("c*", a, 0.710, 0.714, 12));
        cr.lines.push_back(detail::in_range("c**", b, 0.749, 0.753, 12));
        cr.lines.push_back(detail::below("runtime [s]", secs, 1.0, 3));
    }

    void double_root(Criterion& cr) {
        cr.title = "double root at c*";
        cr.anchor = "mu1(c*) = mu2(c*) = 0.926...";
        const auto cs = critical_speed(g_.k1(), h_, Branch::positive_double_root);
        const auto ctx = make_context(g_, h_, cs.c);
        cr.lines.push_back(detail::in_range("mu double root", cs.z_double, 0.921, 0.931, 10));
        cr.lines.push_back(detail::yes("chi_0 root has multiplicity 2", ctx.mu_double));
        cr.lines.push_back(detail::near("rho1(c*) = c* mu", cs.c * cs.z_double, 0.656, 0.005, 8));
    }

    void rho_monotonicity(Criterion& cr) {
        cr.title = "rho monotonicity and endpoints";
        cr.anchor = "rho1 decreasing, rho2 increasing; rho1(c**) = 0.537..., rho2(c**) = 0.867...";
        const double a = c_star(), b = c_star2();
        std::vector<double> r1, r2;
        for (int i = 0; i < 20; ++i) {
            const double c = a + (b - a) * i / 19.0;
            const auto ctx = make_context(g_, h_, c);
            if (!ctx.mu1) throw Error(ErrorCode::not_in_domain, "no positive roots at c = " + detail::num(c, 12));
            r1.push_back(c * *ctx.mu2);
            r2.push_back(c * *ctx.mu1);
        }
        bool dec = true, inc = true;
        for (std::size_t i = 1; i < r1.size(); ++i) {
            dec = dec && r1[i] < r1[i - 1];
            inc = inc && r2[i] > r2[i - 1];
        }
        cr.lines.push_back(detail::yes("rho1 strictly decreasing (20 pts)", dec));
        cr.lines.push_back(detail::yes("rho2 strictly increasing (20 pts)", inc));
        cr.lines.push_back(detail::near("rho1(c**)", r1.back(), 0.537, 0.005, 8));
        cr.lines.push_back(detail::near("rho2(c**)", r2.back(), 0.867, 0.005, 8));
    }

    void gamma_threshold(Criterion& cr) {
        cr.title = "gamma threshold";
        cr.anchor = "gamma(c) > gamma1(c) > kappa on [c*, c**]";
        const double a = c_star(), b = c_star2();
        double min_gamma = 1e300, min_gap = 1e300, worst_formula = 0.0;
        for (int i = 0; i < 50; ++i) {
            const double c = a + (b - a) * i / 49.0;
            const auto ctx = make_context(g_, h_, c);
            if (!ctx.mu1) throw Error(ErrorCode::not_in_domain, "no positive roots at c = " + detail::num(c, 12));
            const double gam = g_.g_theta() / (1.0 + *ctx.mu1 * *ctx.mu2);
            const double g1 = gamma1_reference(c);
            const double closed = (1.0 + 1.53 * c * c) / (2.55 + 1.53 * c * c);
            min_gamma = std::min(min_gamma, gam);
            min_gap = std::min(min_gap, gam - g1);
            worst_formula = std::max(worst_formula, std::abs(g1 - closed));
        }
        cr.lines.push_back(detail::flag("min gamma over 50 pts", min_gamma > 0.53, detail::num(min_gamma, 8), "> 0.53"));
        cr.lines.push_back(detail::flag("min gamma - gamma1", min_gap > 0.0, detail::num(min_gap, 6), "> 0"));
        cr.lines.push_back(detail::flag("gamma1 vs closed form", worst_formula <= 1e-12, detail::num(worst_formula, 3),
                                        "<= 1e-12"));
    }

    void hypotheses(Criterion& cr) {
        cr.title = "hypotheses on g";
        cr.anchor = "slopes of g^2 can not exceed |k2 k3| = 0.75";
        const auto um = check_um(g_);
        const auto fc = check_fc(g_);
        const auto st = check_subtangency(g_);
        const auto ga = check_ga(restrict_g(g_));
        cr.lines.push_back(detail::flag("UM", um.holds, um.holds ? "pass" : "fail", "pass"));
        cr.lines.push_back(detail::flag("FC", fc.holds, fc.holds ? "pass" : "fail", "pass"));
        const bool witness_theta = st.witness && std::abs(*st.witness - g_.theta()) < 1e-12;
        cr.lines.push_back(detail::flag("sub-tangency", !st.holds && witness_theta,
                                        st.holds ? "pass" : "fail at x=" + detail::num(st.witness.value_or(NAN), 10),
                                        "fail at x=theta=" + detail::num(g_.theta(), 10)));
        cr.lines.push_back(detail::flag("GA verdict", ga.verdict == GaVerdict::proved, std::string(to_string(ga.verdict)),
                                        "PROVED"));
        cr.lines.push_back(detail::near("max |slope g^2|", ga.max_slope_second_iterate.value_or(NAN), 0.75, 1e-9, 12));
    }

    void domain_boundary(Criterion& cr) {
        cr.title = "admissible region boundary";
        cr.anchor = "{2} x [c*, c**] is the admissible set for h = 2";
        const double a = c_star(), b = c_star2(), d = 1e-3;
        auto member = [&](double c) { return in_domain_dl(g_, h_, c).in_dl; };
        auto line = [&](const char* name, double c, bool want) {
            const bool got = member(c);
            cr.lines.push_back(detail::flag(std::string("in region at ") + name, got == want, got ? "in" : "out",
                                            want ? "in" : "out"));
        };
        line("c* - 1e-3", a - d, false);
        line("c* + 1e-3", a + d, true);
        line("c** - 1e-3", b - d, true);
        line("c** + 1e-3", b + d, false);
    }

    /// Residual, ordering and slope inequalities shared by criteria 7 and 8.
    void inequality_suite(Criterion& cr, const SolvedFront& f, const std::string& tag) {
        const auto& ctx = f.ctx;
        const auto& phi = f.phi;
        const double tol = 1e-8 * g_.g_theta();
        cr.lines.push_back(detail::flag(tag + "fixed-point residual (raw " + detail::num(phi.raw_residual, 2) + ")",
                                        phi.residual < tol, detail::num(phi.residual, 3), "< " + detail::num(tol, 3)));
        const auto ineq = check_front_inequalities(ctx, phi);
        cr.lines.push_back(detail::flag(tag + "phi(ch) > kappa", ineq.phi_at_ch_above_kappa, detail::num(ineq.phi_at_ch, 8),
                                        "> " + detail::num(g_.kappa(), 4)));
        cr.lines.push_back(detail::flag(tag + "phi(ch) >= gamma - 1e-6", ineq.phi_at_ch_above_gamma,
                                        detail::num(ineq.phi_at_ch, 8), ">= " + detail::num(ineq.gamma - 1e-6, 8)));
        const auto p2 = check_prop2(ctx, phi);
        cr.lines.push_back(detail::flag(tag + "tau1 - tau0 >= ch", p2.gap_at_least_delay && p2.gap.has_value(),
                                        p2.gap ? detail::num(*p2.gap, 6) : "+inf", ">= " + detail::num(ctx.tau, 6)));
        cr.lines.push_back(detail::flag(tag + "max |phi'|", ineq.derivative_ok, detail::num(ineq.max_abs_derivative, 6),
                                        "<= " + detail::num(ineq.derivative_bound + 1e-6, 6)));
    }

    void minimal_front(Criterion& cr) {
        cr.title = "front at the minimal speed";
        cr.anchor = "non-monotone but eventually monotone front at c*";
        const double c = c_star();
        const auto& f = front(c);
        const auto t0 = detail::clock::now();
        const auto shape = classify(f.ctx, f.phi);
        const double secs = f.seconds + detail::since(t0);
        inequality_suite(cr, f, "");
        cr.lines.push_back(detail::flag("classification", shape.classification == Shape::eventually_monotone,
                                        std::string(to_string(shape.classification)), "eventually-monotone"));
        cr.lines.push_back(detail::flag("local maxima", shape.local_maxima == 1, std::to_string(shape.local_maxima), "1"));
        const auto q = estimate_tail_coeffs(f.ctx, f.phi, TailFit::double_root);
        cr.lines.push_back(detail::flag("q in (0, 0.135]", q.value > 0.0 && q.value <= 0.135, detail::num(q.value, 6),
                                        "(0, 0.135]"));
        cr.lines.push_back(detail::near("q", q.value, 0.12, 0.02, 6));
        cr.lines.push_back(detail::below("runtime [s]", secs, 30.0, 3));
        cr.seconds = secs;
    }

    void fronts_above_minimal(Criterion& cr) {
        cr.title = "fronts at c = 0.73 and c = c**";
        cr.anchor = "theta < p <= mu1 theta/(mu1 - mu2 e^{-ch(mu1 - mu2)})";
        for (double c : {0.73, c_star2()}) {
            const auto& f = front(c);
            const std::string tag = "c=" + detail::num(c, 6) + ": ";
            inequality_suite(cr, f, tag);
            const auto p = estimate_tail_coeffs(f.ctx, f.phi, TailFit::distinct);
            cr.lines.push_back(detail::flag(tag + "p", p.within_bounds, detail::num(p.value, 6),
                                            "(" + detail::num(p.lower, 6) + ", " + detail::num(p.upper, 6) + "]"));
        }
    }

    void oscillatory(Criterion& cr) {
        cr.title = "oscillating front at c = 0.8";
        cr.anchor = "slowly oscillating semi-wavefront for c > c**";
        const auto& f = front(0.8);
        const auto shape = classify(f.ctx, f.phi);
        cr.lines.push_back(detail::flag("classification", shape.classification == Shape::slowly_oscillating,
                                        std::string(to_string(shape.classification)), "slowly-oscillating"));
        int lo = 99, hi = -1;
        for (const auto& s : shape.sc_sequence) {
            lo = std::min(lo, s.sc);
            hi = std::max(hi, s.sc);
        }
        cr.lines.push_back(detail::flag("sc range over " + std::to_string(shape.sc_sequence.size()) + " samples",
                                        lo >= 1 && hi <= 2, "[" + std::to_string(lo) + ", " + std::to_string(hi) + "]",
                                        "within {1, 2}"));
        const bool have = shape.amplitude_after_crossing.size() >= 10;
        const double amp = have ? shape.amplitude_after_crossing[9] : NAN;
        cr.lines.push_back(detail::flag("amplitude after 10th crossing", have && amp < 0.05 * g_.kappa(),
                                        detail::num(amp, 3), "< " + detail::num(0.05 * g_.kappa(), 4)));
    }

    void complex_roots(Criterion& cr) {
        cr.title = "complex zeros of chi_kappa";
        cr.anchor = "no zeros with 0 < |Im z| <= 2 pi/(ch); complex zeros lie left of lambda2";
        for (double c : {0.72, 0.74}) {
            const auto ctx = make_context(g_, h_, c);
            if (!ctx.lambda2) throw Error(ErrorCode::not_in_domain, "no negative roots at c = " + detail::num(c));
            const double band = 2.0 * std::numbers::pi / ctx.tau;
            const auto search = complex_roots_in_rect(ctx.chi_kappa(), Rect{-10.0, 0.0, -2.0 * band, 2.0 * band});
            int in_band = 0, complex_count = 0;
            double max_re = -1e300;
            for (auto z : search.roots) {
                if (std::abs(z.imag()) < 1e-9) continue;
                ++complex_count;
                if (std::abs(z.imag()) <= band) ++in_band;
                max_re = std::max(max_re, z.real());
            }
            const std::string tag = "c=" + detail::num(c, 3) + ": ";
            cr.lines.push_back(detail::flag(tag + "zeros with 0<|Im|<=2pi/ch", in_band == 0, std::to_string(in_band), "0"));
            cr.lines.push_back(detail::flag(tag + "max Re of " + std::to_string(complex_count) + " complex zeros",
                                            complex_count == 0 || max_re < *ctx.lambda2, detail::num(max_re, 8),
                                            "< lambda2 = " + detail::num(*ctx.lambda2, 8)));
        }
    }

    void secant_remark(Criterion& cr) {
        cr.title = "no negative real root with the secant slope";
        cr.anchor = "z^2 - c* z - 1 - g'_kappa e^{-2 z c*} can not have negative real roots";
        const auto s = critical_secant_slope(g_);
        const double c = c_star();
        const auto roots = real_roots(Quasipolynomial::make(c, h_, -s.value), -20.0, 0.0);
        int negative = 0;
        for (const auto& r : roots)
            if (r.value < 0.0) negative += r.multiplicity;
        cr.lines.push_back(detail::flag("g'_kappa (secant slope)", true, detail::num(s.value, 8), "reported"));
        cr.lines.push_back(detail::flag("real roots in [-20, 0)", negative == 0, std::to_string(negative), "0"));
    }

    void operator_oracle(Criterion& cr) {
        cr.title = "integral operator vs quadrature";
        cr.anchor = "A matches adaptive quadrature to 1e-10";
        const auto ctx = make_context(g_, h_, 0.73);
        std::mt19937_64 rng(20240101);
        double worst = 0.0;
        std::size_t points = 0;
        for (int k = 0; k < 100; ++k) {
            const auto phi = oracle::random_profile(ctx, rng);
            const auto a = apply_operator(ctx, phi);
            for (std::size_t i = 0; i < phi.size(); ++i) {
                worst = std::max(worst, std::abs(a[i] - oracle::operator_at(ctx, phi, phi.node(i))));
                ++points;
            }
        }
        cr.lines.push_back(detail::flag("max |A - quadrature| over " + std::to_string(points) + " nodes, 100 profiles",
                                        worst <= 1e-10, detail::num(worst, 3), "<= 1e-10"));
    }

    void sc_oracle(Criterion& cr) {
        cr.title = "sign changes vs exhaustive scan";
        cr.anchor = "sc counts strict sign alternations";
        const auto ctx = make_context(g_, h_, 0.8);
        std::mt19937_64 rng(777);
        int mismatches = 0;
        for (int k = 0; k < 1000; ++k) {
            auto phi = oracle::random_profile(ctx, rng);
            std::uniform_real_distribution<double> pick(phi.t0 - 1.0, phi.t_end() + 1.0);
            const double t = pick(rng);
            // Same segment, sampled and scanned without the library path.
            const auto n = static_cast<std::size_t>(std::max(1.0, std::round(ctx.tau / phi.dt)));
            std::vector<double> v;
            double scale = 0.0;
            for (std::size_t j = 0; j <= n; ++j) {
                const double s = t - ctx.tau + ctx.tau * static_cast<double>(j) / static_cast<double>(n);
                v.push_back(phi.deviation(s, g_.kappa()));
                scale = std::max(scale, std::abs(v.back()));
            }
            v.push_back(phi.derivative(t));
            const int expected = scale == 0.0 ? 0 : oracle::sign_changes_bruteforce(v, 1e-12 * scale);
            if (sign_changes(ctx, phi, t) != expected) ++mismatches;
        }
        cr.lines.push_back(detail::flag("mismatches over 1000 segments", mismatches == 0, std::to_string(mismatches), "0"));
    }

    void pde_cross_check(Criterion& cr) {
        cr.title = "delayed reaction-diffusion simulation";
        cr.anchor = "spreading from step data selects the minimal speed";
        const auto t0 = detail::clock::now();
        const double cs = c_star();

        SimConfig step;
        step.keep_snapshots = false;
        step.history = step_history(g_.kappa(), 50.0);
        const double speed = measure_front_speed(simulate(g_, h_, step));
        cr.lines.push_back(detail::flag("step data speed (rel. to c*)", std::abs(speed / cs - 1.0) <= 0.05,
                                        detail::num(speed, 6) + " (" + detail::num(100.0 * (speed / cs - 1.0), 3) + "%)",
                                        "within 5% of " + detail::num(cs, 6)));

        // Seed with the solved profile: u(s, x) = phi(c s - (x - x0)).
        const auto& f = front(cs);
        const double x0 = 100.0;
        SimConfig seeded;
        seeded.t_end = 100.0;
        seeded.history = [&f, cs, x0](double s, double x) { return f.phi(cs * s - (x - x0)); };
        const auto rec = simulate(g_, h_, seeded);
        const double seeded_speed = measure_front_speed(rec);
        cr.lines.push_back(detail::flag("seeded run speed", std::abs(seeded_speed / cs - 1.0) <= 0.02,
                                        detail::num(seeded_speed, 6), "within 2% of " + detail::num(cs, 6)));
        const double xf = rec.front.back().value();
        double err = 0.0;
        for (std::size_t i = 0; i < rec.x.size(); ++i) {
            err = std::max(err, std::abs(rec.final_state[i] - f.phi(xf - rec.x[i])));
        }
        const double rel = err / g_.g_theta();
        cr.lines.push_back(detail::flag("shape error after shift (sup, rel. g(theta))", rel <= 0.02, detail::num(rel, 3),
                                        "<= 0.02"));
        const double secs = detail::since(t0);
        cr.lines.push_back(detail::below("runtime [s]", secs, 300.0, 3));
    }

    void negative_control(Criterion& cr) {
        cr.title = "no front below the minimal speed";
        cr.anchor = "no wavefront propagating with speed c < c*";
        const auto ctx = make_context(g_, h_, 0.5);
        std::string refusal = "accepted";
        bool refused = false;
        try {
            (void)solve_profile(ctx);
        } catch (const Error& e) {
            refusal = std::string(to_string(e.code()));
            refused = e.code() == ErrorCode::not_in_domain;
        }
        cr.lines.push_back(detail::flag("solver at c = 0.5", refused, refusal, "NotInDomain"));

        // Forced iteration: a shape that A only translates is not a fixed point.
        SolveOptions opts;
        opts.forced = true;
        opts.max_iter = 500;
        std::string outcome;
        bool failed = false;
        try {
            const auto phi = iterate_profile(ctx, opts);
            const double tol = 1e-8 * g_.g_theta();
            failed = !phi.converged || !(phi.raw_residual < tol);
            outcome = phi.converged ? "residual " + detail::num(phi.raw_residual, 3) + ", drift " + detail::num(phi.drift, 3)
                                    : "no convergence";
        } catch (const Error& e) {
            failed = true;
            outcome = std::string(to_string(e.code()));
        }
        cr.lines.push_back(detail::flag("forced run at c = 0.5", failed, outcome, "fails"));
    }
};

/// "[PASS] 7 front at the minimal speed (2.8 s)" followed by indented lines.
inline std::string format(const Criterion& cr, bool details = true) {
    std::ostringstream os;
    os << (cr.pass ? "[PASS] " : "[FAIL] ") << cr.id << ' ' << cr.title << " (" << detail::num(cr.seconds, 3) << " s)\n";
    if (!details) return os.str();
    os << "       anchor: " << cr.anchor << '\n';
    for (const auto& l : cr.lines) {
        os << "       " << (l.pass ? "ok   " : "FAIL ") << l.label << ": " << l.computed << " (expected " << l.expected
           << ")\n";
    }
    if (!cr.error.empty()) os << "       error: " << cr.error << '\n';
    return os.str();
}

}  // namespace wavefront::acceptance
