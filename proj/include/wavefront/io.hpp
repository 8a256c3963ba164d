#pragma once

// JSON and CSV serialization of models and reports.

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "wavefront/birth_model.hpp"
#include "wavefront/char_spectrum.hpp"
#include "wavefront/error.hpp"
#include "wavefront/map_dynamics.hpp"
#include "wavefront/pde_oracle.hpp"
#include "wavefront/profile_solver.hpp"
#include "wavefront/shape_classifier.hpp"

namespace wavefront::io {

using json = nlohmann::ordered_json;

namespace detail {

inline double finite_number(const json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::invalid_config, std::string("missing field '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number()) throw Error(ErrorCode::invalid_config, std::string("field '") + key + "' is not a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw Error(ErrorCode::invalid_config, std::string("field '") + key + "' is not finite");
    return x;
}

template <typename T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace detail

/// {"k1", "k2", "k3", "theta", "kappa"}; geometry errors surface as InvalidConfig.
inline PiecewiseLinearBirth birth_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::invalid_config, "model must be a JSON object");
    const double k1 = detail::finite_number(j, "k1");
    const double k2 = detail::finite_number(j, "k2");
    const double k3 = detail::finite_number(j, "k3");
    const double theta = detail::finite_number(j, "theta");
    const double kappa = detail::finite_number(j, "kappa");
    try {
        return PiecewiseLinearBirth::construct(k1, k2, k3, theta, kappa);
    } catch (const Error& e) {
        throw Error(ErrorCode::invalid_config, e.what());
    }
}

inline json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::invalid_config, what + ": " + e.what());
    }
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::invalid_config, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_json_text(ss.str(), path.string());
}

inline json to_json(const PiecewiseLinearBirth& g) {
    return {{"k1", g.k1()},
            {"k2", g.k2()},
            {"k3", g.k3()},
            {"theta", g.theta()},
            {"kappa", g.kappa()},
            {"derived", {{"q2", g.q2()}, {"q3", g.q3()}, {"theta1", g.theta1()}, {"g_theta", g.g_theta()},
                         {"g2_theta", g.g2_theta()}}}};
}

inline json to_json(const HypothesisReport& r) {
    json details = json::array();
    for (const auto& d : r.details) {
        details.push_back({{"name", d.name}, {"holds", d.holds}, {"witness", detail::opt(d.witness)}, {"detail", d.detail}});
    }
    json j{{"holds", r.holds}, {"witness", detail::opt(r.witness)}};
    j["interval"] = r.interval ? json::array({r.interval->first, r.interval->second}) : json(nullptr);
    j["details"] = details;
    return j;
}

inline json to_json(const std::vector<RealRoot>& roots) {
    json a = json::array();
    for (const auto& r : roots) a.push_back({{"root", r.value}, {"multiplicity", r.multiplicity}});
    return a;
}

inline json to_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

/// Spectrum report for one (g, h, c).
inline json spectrum_json(const PiecewiseLinearBirth& g, double h, double c, std::optional<double> c_star,
                          std::optional<double> c_star2) {
    const auto ctx = make_context(g, h, c);
    const auto dom = in_domain_dl(g, h, c);
    json j;
    j["model"] = to_json(g);
    j["h"] = h;
    j["c"] = c;
    j["c_star"] = detail::opt(c_star);
    j["c_star2"] = detail::opt(c_star2);
    j["z1"] = ctx.z1;
    j["z2"] = ctx.z2;
    j["mu1"] = detail::opt(ctx.mu1);
    j["mu2"] = detail::opt(ctx.mu2);
    j["lambda1"] = detail::opt(ctx.lambda1);
    j["lambda2"] = detail::opt(ctx.lambda2);
    j["lambda3"] = detail::opt(ctx.lambda3);
    j["in_DL"] = dom.in_dl;
    j["gamma"] = ctx.in_dl ? json(g.g_theta() / (1.0 + *ctx.mu1 * *ctx.mu2)) : json(nullptr);
    j["xi"] = xi(h, c);
    j["regime"] = std::string(to_string(ctx.regime));
    j["oscillatory_mode"] = ctx.oscillatory_mode ? to_json(*ctx.oscillatory_mode) : json(nullptr);
    j["roots_chi0"] = to_json(dom.roots_chi0);
    j["roots_chi_kappa"] = to_json(dom.roots_chi_kappa);
    j["diagnostics"] = dom.diagnostics;
    return j;
}

inline json to_json(const GaReport& r) {
    json j{{"verdict", std::string(to_string(r.verdict))},
           {"max_slope_second_iterate", detail::opt(r.max_slope_second_iterate)},
           {"fixed_point", detail::opt(r.fixed_point)},
           {"invariant", r.invariant},
           {"detail", r.detail}};
    if (r.witness_start) {
        j["witness"] = {{"start", *r.witness_start}, {"orbit", r.witness_orbit}, {"period", detail::opt(r.witness_period)}};
    }
    return j;
}

inline json to_json(const TailCoefficients& t) {
    return {{"regime", t.double_root ? "double-root" : "distinct-roots"},
            {t.double_root ? "q" : "p", t.value},
            {"lower_exclusive", t.lower},
            {"upper", t.upper},
            {"sharp_upper", detail::opt(t.sharp_upper)},
            {"within_bounds", t.within_bounds},
            {"fit_rms", t.fit_rms}};
}

inline json to_json(const FrontInequalities& f) {
    return {{"phi_at_ch", f.phi_at_ch},
            {"gamma", f.gamma},
            {"phi_at_ch_above_gamma", f.phi_at_ch_above_gamma},
            {"phi_at_ch_above_kappa", f.phi_at_ch_above_kappa},
            {"max_abs_derivative", f.max_abs_derivative},
            {"derivative_bound", f.derivative_bound},
            {"derivative_ok", f.derivative_ok},
            {"tau1", detail::opt(f.tau1)},
            {"leading_edge_increasing", f.leading_edge_increasing},
            {"all_hold", f.all_hold}};
}

inline json to_json(const ShapeReport& r) {
    json extrema = json::array();
    for (const auto& e : r.extrema) extrema.push_back({{"t", e.t}, {"value", e.value}, {"kind", e.maximum ? "max" : "min"}});
    json sc = json::array();
    for (const auto& s : r.sc_sequence) sc.push_back({s.t, s.sc});
    return {{"classification", std::string(to_string(r.classification))},
            {"tau0", r.tau0},
            {"tau1", r.tau1 ? json(*r.tau1) : json("+inf")},
            {"local_maxima", r.local_maxima},
            {"local_minima", r.local_minima},
            {"crossings_of_kappa", r.kappa_crossings.size()},
            {"crossings_unbounded", r.crossings_unbounded},
            {"crossing_times", r.kappa_crossings},
            {"amplitude_after_crossing", r.amplitude_after_crossing},
            {"extrema", extrema},
            {"sc_sequence", sc}};
}

inline json to_json(const Prop2Report& r) {
    return {{"tau0", r.tau0},
            {"tau1", r.tau1 ? json(*r.tau1) : json("+inf")},
            {"gap", detail::opt(r.gap)},
            {"increasing_before_tau1", r.increasing_before_tau1},
            {"tau1_finite_iff_above_kappa", r.tau1_finite_iff_above_kappa},
            {"gap_at_least_delay", r.gap_at_least_delay},
            {"holds", r.holds},
            {"detail", r.detail}};
}

inline json profile_metadata(const WaveContext& ctx, const WaveProfile& phi, std::optional<TailCoefficients> tail) {
    json j{{"c", ctx.c},
           {"h", ctx.h},
           {"L", -phi.t0},
           {"R", phi.t_end()},
           {"dt", phi.dt},
           {"iterations", phi.iterations},
           {"residual", phi.residual},
           {"raw_residual", phi.raw_residual},
           {"drift", phi.drift},
           {"converged", phi.converged},
           {"regime", std::string(to_string(ctx.regime))}};
    j["p_or_q"] = tail ? json(tail->value) : json(nullptr);
    j["classification_ready"] = phi.converged;
    j["left_tail"] = {{"rate", phi.left.rate}, {"fast_rate", detail::opt(phi.left.fast_rate)}, {"a", phi.left.a}, {"b", phi.left.b}};
    j["right_tail"] = {{"base", phi.right.base}, {"rate", to_json(phi.right.rate)}, {"amplitude", to_json(phi.right.amplitude)}};
    return j;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::invalid_config, "cannot write " + path.string());
    out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// t, phi, dphi on the grid, plus `extend` units of each tail model.
inline std::string profile_csv(const WaveProfile& phi, double extend = 0.0) {
    std::ostringstream os;
    os << std::setprecision(12) << "t,phi,dphi\n";
    const double step = phi.dt * 10.0;
    for (double t = phi.t0 - extend; t < phi.t0; t += step) os << t << ',' << phi(t) << ',' << phi.derivative(t) << '\n';
    for (std::size_t i = 0; i < phi.size(); ++i) os << phi.node(i) << ',' << phi.values[i] << ',' << phi.node_derivative(i) << '\n';
    for (double t = phi.t_end() + step; t <= phi.t_end() + extend; t += step) {
        os << t << ',' << phi(t) << ',' << phi.derivative(t) << '\n';
    }
    return os.str();
}

inline std::string extrema_csv(const ShapeReport& r) {
    std::ostringstream os;
    os << std::setprecision(12) << "t,value,kind\n";
    for (const auto& e : r.extrema) os << e.t << ',' << e.value << ',' << (e.maximum ? "max" : "min") << '\n';
    return os.str();
}

/// x, map(x) on a uniform sample for cobweb plots.
inline std::string map_csv(const IntervalMap& m, int samples = 401) {
    std::ostringstream os;
    os << std::setprecision(12) << "x,map\n";
    for (int i = 0; i < samples; ++i) {
        const double x = m.lo() + (m.hi() - m.lo()) * i / (samples - 1);
        os << x << ',' << m(x) << '\n';
    }
    return os.str();
}

/// t, then one column per probe (every `stride` grid points).
inline std::string snapshots_csv(const SpaceTimeRecord& rec, std::size_t stride) {
    std::ostringstream os;
    os << std::setprecision(10) << 't';
    for (std::size_t i = 0; i < rec.x.size(); i += stride) os << ",x=" << rec.x[i];
    os << '\n';
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k) {
        os << rec.times[k];
        for (std::size_t i = 0; i < rec.x.size(); i += stride) os << ',' << rec.snapshots[k][i];
        os << '\n';
    }
    return os.str();
}

inline std::string front_trace_csv(const SpaceTimeRecord& rec) {
    std::ostringstream os;
    os << std::setprecision(12) << "t,x_f\n";
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        os << rec.times[k] << ',';
        if (rec.front[k]) os << *rec.front[k];
        os << '\n';
    }
    return os.str();
}

}  // namespace wavefront::io
