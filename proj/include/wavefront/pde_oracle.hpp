#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wavefront/birth_model.hpp"
#include "wavefront/error.hpp"

namespace wavefront {

/// u_t = u_xx - u + g(u(t - h, x)) on [0, length] with Neumann ends.
struct SimConfig {
    double length = 400.0;
    double dx = 0.1;
    double dt = 0.004;  // dx^2/2 sits on the edge once the -u term is added
    double t_end = 300.0;
    double output_interval = 1.0;
    double front_level = 0.0;  // 0: use theta
    bool keep_snapshots = true;
    // u(s, x) for s in [-h, 0]
    std::function<double(double, double)> history;
};

struct SpaceTimeRecord {
    std::vector<double> x;
    std::vector<double> times;
    std::vector<std::vector<double>> snapshots;  // one per output time (if kept)
    std::vector<std::optional<double>> front;    // level crossing per output time
    std::vector<double> final_state;
    double level = 0.0;
};

inline void validate(const SimConfig& cfg, double h) {
    auto bad = [](const std::string& m) { throw Error(ErrorCode::invalid_config, m); };
    if (!(cfg.dx > 0.0) || !(cfg.dt > 0.0) || !(cfg.length > 2.0 * cfg.dx) || !(cfg.t_end > 0.0)) {
        bad("length, dx, dt and t_end must be positive");
    }
    if (cfg.dt > 0.5 * cfg.dx * cfg.dx) {
        std::ostringstream os;
        os << "dt = " << cfg.dt << " exceeds dx^2/2 = " << 0.5 * cfg.dx * cfg.dx;
        bad(os.str());
    }
    const double steps = h / cfg.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
        std::ostringstream os;
        os << "dt = " << cfg.dt << " does not divide h = " << h;
        bad(os.str());
    }
    if (!(cfg.output_interval > 0.0)) bad("output_interval must be positive");
    if (!cfg.history) bad("history function missing");
}

/// Rightmost crossing of level, scanning from the right end, interpolated.
inline std::optional<double> front_position(const std::vector<double>& u, const std::vector<double>& x, double level) {
    for (std::size_t i = u.size() - 1; i > 0; --i) {
        if (u[i - 1] >= level && u[i] < level) {
            return x[i - 1] + (u[i - 1] - level) / (u[i - 1] - u[i]) * (x[i] - x[i - 1]);
        }
    }
    return std::nullopt;
}

/// Explicit Euler method of lines; delayed values come from a ring buffer
/// holding the last h/dt time levels.
inline SpaceTimeRecord simulate(const PiecewiseLinearBirth& g, double h, const SimConfig& cfg) {
    validate(cfg, h);
    const auto m = static_cast<std::size_t>(std::llround(cfg.length / cfg.dx)) + 1;
    const auto nd = static_cast<std::size_t>(std::llround(h / cfg.dt));
    const auto steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    const auto out_every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.output_interval / cfg.dt)));
    const double blowup = 2.0 * g.g_theta();

    SpaceTimeRecord rec;
    rec.level = cfg.front_level > 0.0 ? cfg.front_level : g.theta();
    rec.x.resize(m);
    for (std::size_t i = 0; i < m; ++i) rec.x[i] = static_cast<double>(i) * cfg.dx;

    std::vector<double> u(m), next(m);
    for (std::size_t i = 0; i < m; ++i) u[i] = cfg.history(0.0, rec.x[i]);
    // ring[k] holds u at time t_n - h for the step n with n mod nd == k.
    std::vector<std::vector<double>> ring;
    if (nd > 0) {
        ring.assign(nd, std::vector<double>(m));
        for (std::size_t k = 0; k < nd; ++k) {
            const double s = -h + static_cast<double>(k) * cfg.dt;
            for (std::size_t i = 0; i < m; ++i) ring[k][i] = cfg.history(s, rec.x[i]);
        }
    }

    auto record = [&](double t) {
        rec.times.push_back(t);
        rec.front.push_back(front_position(u, rec.x, rec.level));
        if (cfg.keep_snapshots) rec.snapshots.push_back(u);
    };
    record(0.0);

    const double r = cfg.dt / (cfg.dx * cfg.dx);
    for (std::size_t n = 0; n < steps; ++n) {
        const std::vector<double>& delayed = nd > 0 ? ring[n % nd] : u;
        double peak = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double left = i == 0 ? u[1] : u[i - 1];
            const double right = i + 1 == m ? u[m - 2] : u[i + 1];
            const double lap = left - 2.0 * u[i] + right;
            next[i] = u[i] + r * lap + cfg.dt * (-u[i] + g.eval_unchecked(std::max(delayed[i], 0.0)));
            peak = std::max(peak, std::abs(next[i]));
        }
        if (!(peak <= blowup)) {
            std::ostringstream os;
            os << "|u| reached " << peak << " > 2 g(theta) at t = " << static_cast<double>(n + 1) * cfg.dt;
            throw Error(ErrorCode::stability_violation, os.str());
        }
        if (nd > 0) ring[n % nd] = u;
        u.swap(next);
        if ((n + 1) % out_every == 0) record(static_cast<double>(n + 1) * cfg.dt);
    }
    rec.final_state = u;
    return rec;
}

/// Least-squares slope of the front position over the last third of the run.
inline double measure_front_speed(const SpaceTimeRecord& rec) {
    if (rec.front.empty() || !rec.front.back()) {
        throw Error(ErrorCode::front_not_formed, "no level crossing at the final time");
    }
    const double t_last = rec.times.back();
    const double t_from = t_last - (t_last - rec.times.front()) / 3.0;
    double st = 0, sx = 0, stt = 0, stx = 0;
    int n = 0;
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        if (rec.times[k] < t_from || !rec.front[k]) continue;
        const double t = rec.times[k], x = *rec.front[k];
        st += t;
        sx += x;
        stt += t * t;
        stx += t * x;
        ++n;
    }
    const double det = n * stt - st * st;
    if (n < 2 || det <= 0.0) throw Error(ErrorCode::front_not_formed, "too few front positions to fit a speed");
    return (n * stx - st * sx) / det;
}

/// Step history: kappa left of x0, zero beyond, for every s in [-h, 0].
inline std::function<double(double, double)> step_history(double kappa, double x0) {
    return [kappa, x0](double, double x) { return x < x0 ? kappa : 0.0; };
}

}  // namespace wavefront
