// wavefront: command-line front end.
//
// Exit codes: 0 success, 1 acceptance failure (replicate-paper),
// 2 invalid configuration, 3 solver failure.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "wavefront/acceptance.hpp"
#include "wavefront/io.hpp"
#include "wavefront/wavefront.hpp"

namespace fs = std::filesystem;
using namespace wavefront;
using io::json;

namespace {

constexpr int kOk = 0;
constexpr int kAcceptanceFailed = 1;
constexpr int kInvalidConfig = 2;
constexpr int kSolverFailure = 3;

struct Flags {
    std::string model;
    std::string config;
    std::optional<double> h;
    std::optional<double> c;
    std::string c_range;
    std::string out_dir = ".";
    std::optional<double> tol;
    std::optional<double> grid_dt;
    bool quiet = false;
    // command-specific
    bool sweep_profiles = false;
    bool seed_profile = false;
    std::optional<double> pde_length, pde_dx, pde_dt, pde_t_end, pde_x0;
    int probe_stride = 100;
    std::vector<int> criteria;
};

/// Everything a command needs, after merging the config file and the flags.
struct RunConfig {
    PiecewiseLinearBirth g = reference_birth();
    bool reference_model = true;
    double h = 2.0;
    std::optional<double> c;
    std::vector<double> c_grid;
    bool has_range = false;
    fs::path out_dir = ".";
    SolveOptions solve;
    SimConfig sim;
    bool quiet = false;
};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::invalid_config, msg); }

double finite(const json& j, const char* what) {
    if (!j.is_number()) invalid(std::string(what) + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) invalid(std::string(what) + " must be finite");
    return v;
}

/// "lo:hi:n" with n >= 1 points, endpoints included.
std::vector<double> parse_range(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            invalid("--c-range expects lo:hi:n, got '" + text + "'");
        }
    }
    if (parts.size() != 3) invalid("--c-range expects lo:hi:n, got '" + text + "'");
    const double lo = parts[0], hi = parts[1], n = parts[2];
    if (!std::isfinite(lo) || !std::isfinite(hi)) invalid("--c-range bounds must be finite");
    if (n < 1 || n != std::floor(n) || hi < lo || (n == 1 && hi != lo) || (n > 1 && hi == lo)) {
        invalid("empty or malformed c-range '" + text + "'");
    }
    std::vector<double> grid;
    const auto count = static_cast<int>(n);
    for (int i = 0; i < count; ++i) grid.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
    return grid;
}

RunConfig resolve(const Flags& f) {
    RunConfig rc;
    json cfg = json::object();
    if (!f.config.empty()) cfg = io::read_json_file(f.config);
    if (!cfg.is_object()) invalid("config must be a JSON object");

    // Model: --model (file path or inline JSON) beats the config block.
    if (!f.model.empty()) {
        const bool inline_json = f.model.find('{') != std::string::npos;
        const json m = inline_json ? io::parse_json_text(f.model, "--model") : io::read_json_file(f.model);
        rc.g = io::birth_from_json(m.contains("model") ? m.at("model") : m);
        rc.reference_model = false;
    } else if (cfg.contains("model")) {
        rc.g = io::birth_from_json(cfg.at("model"));
        rc.reference_model = false;
    }

    if (cfg.contains("h")) rc.h = finite(cfg.at("h"), "h");
    if (f.h) rc.h = *f.h;
    if (!(rc.h >= 0.0) || !std::isfinite(rc.h)) invalid("h must be finite and >= 0");

    if (cfg.contains("c")) rc.c = finite(cfg.at("c"), "c");
    if (f.c) rc.c = *f.c;
    if (rc.c && !(*rc.c > 0.0 && std::isfinite(*rc.c))) invalid("c must be finite and > 0");

    std::string range = f.c_range;
    if (range.empty() && cfg.contains("c_range")) {
        const auto& r = cfg.at("c_range");
        if (!r.is_array() || r.size() != 3) invalid("c_range must be [lo, hi, n]");
        std::ostringstream os;
        os.precision(17);
        os << finite(r[0], "c_range[0]") << ':' << finite(r[1], "c_range[1]") << ':' << finite(r[2], "c_range[2]");
        range = os.str();
    }
    if (!range.empty()) {
        rc.c_grid = parse_range(range);
        rc.has_range = true;
        for (double c : rc.c_grid)
            if (!(c > 0.0)) invalid("c-range values must be > 0");
    }

    if (cfg.contains("solver")) {
        const auto& s = cfg.at("solver");
        if (!s.is_object()) invalid("solver must be an object");
        if (s.contains("tol")) rc.solve.tol = finite(s.at("tol"), "solver.tol");
        if (s.contains("grid_dt")) rc.solve.dt = finite(s.at("grid_dt"), "solver.grid_dt");
        if (s.contains("L")) rc.solve.L = finite(s.at("L"), "solver.L");
        if (s.contains("R")) rc.solve.R = finite(s.at("R"), "solver.R");
        if (s.contains("max_iter")) rc.solve.max_iter = static_cast<int>(finite(s.at("max_iter"), "solver.max_iter"));
    }
    if (f.tol) rc.solve.tol = *f.tol;
    if (f.grid_dt) rc.solve.dt = *f.grid_dt;
    if (rc.solve.tol && !(*rc.solve.tol > 0.0)) invalid("--tol must be > 0");
    if (rc.solve.dt && !(*rc.solve.dt > 0.0)) invalid("--grid-dt must be > 0");

    if (cfg.contains("pde")) {
        const auto& p = cfg.at("pde");
        if (!p.is_object()) invalid("pde must be an object");
        if (p.contains("length")) rc.sim.length = finite(p.at("length"), "pde.length");
        if (p.contains("dx")) rc.sim.dx = finite(p.at("dx"), "pde.dx");
        if (p.contains("dt")) rc.sim.dt = finite(p.at("dt"), "pde.dt");
        if (p.contains("t_end")) rc.sim.t_end = finite(p.at("t_end"), "pde.t_end");
        if (p.contains("output_interval")) rc.sim.output_interval = finite(p.at("output_interval"), "pde.output_interval");
    }
    if (f.pde_length) rc.sim.length = *f.pde_length;
    if (f.pde_dx) rc.sim.dx = *f.pde_dx;
    if (f.pde_dt) rc.sim.dt = *f.pde_dt;
    if (f.pde_t_end) rc.sim.t_end = *f.pde_t_end;

    rc.out_dir = f.out_dir;
    rc.quiet = f.quiet;
    return rc;
}

double require_c(const RunConfig& rc) {
    if (!rc.c) invalid("this command needs --c");
    return *rc.c;
}

void emit(const RunConfig& rc, const std::string& file, const json& j) {
    io::write_json(rc.out_dir / file, j);
    if (!rc.quiet) std::cout << j.dump(2) << '\n';
}

std::optional<double> try_critical(double k, double h, Branch b) {
    try {
        return critical_speed(k, h, b).c;
    } catch (const Error&) {
        return std::nullopt;
    }
}

int cmd_spectrum(const RunConfig& rc) {
    const double c = require_c(rc);
    const auto cs = try_critical(rc.g.k1(), rc.h, Branch::positive_double_root);
    const auto cs2 = try_critical(rc.g.slope_left(rc.g.kappa()), rc.h, Branch::negative_double_root);
    emit(rc, "spectrum.json", io::spectrum_json(rc.g, rc.h, c, cs, cs2));
    return kOk;
}

int cmd_speeds(const RunConfig& rc) {
    json j;
    j["model"] = io::to_json(rc.g);
    j["h"] = rc.h;
    const auto a = critical_speed(rc.g.k1(), rc.h, Branch::positive_double_root);
    j["c_star"] = a.c;
    j["mu_double"] = a.z_double;
    j["newton_iterations_c_star"] = a.newton_iterations;
    try {
        const auto b = critical_speed(rc.g.slope_left(rc.g.kappa()), rc.h, Branch::negative_double_root);
        j["c_star2"] = b.c;
        j["lambda_double"] = b.z_double;
        j["newton_iterations_c_star2"] = b.newton_iterations;
    } catch (const Error& e) {
        j["c_star2"] = nullptr;
        j["c_star2_diagnostic"] = e.what();
    }
    emit(rc, "speeds.json", j);
    return kOk;
}

int cmd_region(const RunConfig& rc) {
    std::vector<double> grid = rc.has_range ? rc.c_grid : std::vector<double>{require_c(rc)};
    json rows = json::array();
    for (double c : grid) {
        const auto d = in_domain_dl(rc.g, rc.h, c);
        rows.push_back({{"c", c},
                        {"in_DL", d.in_dl},
                        {"positive_roots_chi0", d.positive_roots_chi0},
                        {"negative_roots_chi_kappa", d.negative_roots_chi_kappa},
                        {"diagnostics", d.diagnostics}});
    }
    emit(rc, "region.json", {{"h", rc.h}, {"rows", rows}});
    return kOk;
}

std::string gnuplot_script(const RunConfig& rc, const WaveContext& ctx) {
    std::ostringstream os;
    os << "# Front profile; run: gnuplot -p profile.gp\n"
       << "set datafile separator ','\n"
       << "set key bottom right\n"
       << "set xlabel 't'\nset ylabel 'phi(t)'\n"
       << "set title 'wave profile, c = " << ctx.c << ", h = " << ctx.h << "'\n"
       << "kappa = " << rc.g.kappa() << "\ntheta = " << rc.g.theta() << "\n"
       << "plot 'profile.csv' using 1:2 with lines lw 2 title 'phi', \\\n"
       << "     kappa with lines dt 2 title 'kappa', \\\n"
       << "     theta with lines dt 3 title 'theta', \\\n"
       << "     'extrema.csv' using 1:2 with points pt 7 title 'extrema'\n";
    return os.str();
}

int cmd_profile(const RunConfig& rc, bool write_files) {
    const double c = require_c(rc);
    const auto ctx = make_context(rc.g, rc.h, c);
    const auto phi = solve_profile(ctx, rc.solve);
    const auto shape = classify(ctx, phi);
    const auto p2 = check_prop2(ctx, phi);
    std::optional<TailCoefficients> tail;
    if (ctx.mu1) tail = estimate_tail_coeffs(ctx, phi);

    json report = io::to_json(shape);
    report["prop2"] = io::to_json(p2);
    if (ctx.regime == Regime::front) report["inequalities"] = io::to_json(check_front_inequalities(ctx, phi));
    if (tail) report["tail"] = io::to_json(*tail);

    if (write_files) {
        io::write_text(rc.out_dir / "profile.csv", io::profile_csv(phi, 10.0));
        io::write_text(rc.out_dir / "extrema.csv", io::extrema_csv(shape));
        io::write_json(rc.out_dir / "profile_meta.json", io::profile_metadata(ctx, phi, tail));
        io::write_text(rc.out_dir / "profile.gp", gnuplot_script(rc, ctx));
    }
    emit(rc, "shape.json", report);
    return kOk;
}

int cmd_ga_check(const RunConfig& rc) {
    json j;
    const auto m = restrict_g(rc.g);
    j["g2_on_invariant_interval"] = io::to_json(check_ga(m));
    io::write_text(rc.out_dir / "g_map.csv", io::map_csv(m));
    if (rc.c) {
        try {
            const auto s = build_sigma(rc.g, rc.h, *rc.c);
            j["xi"] = s.xi;
            j["sigma"] = io::to_json(check_ga(s.sigma));
            j["sigma_fixed_points"] = s.fixed_points;
            io::write_text(rc.out_dir / "sigma_map.csv", io::map_csv(s.sigma));
        } catch (const Error& e) {
            j["sigma"] = {{"error", std::string(to_string(e.code()))}, {"detail", e.what()}};
        }
    }
    emit(rc, "ga.json", j);
    return kOk;
}

int cmd_verify(const RunConfig& rc) {
    json j;
    j["model"] = io::to_json(rc.g);
    j["UM"] = io::to_json(check_um(rc.g));
    j["FC"] = io::to_json(check_fc(rc.g));
    j["subtangency"] = io::to_json(check_subtangency(rc.g));
    const auto s = critical_secant_slope(rc.g);
    j["secant_slope"] = {{"value", s.value}, {"argmin", s.argmin}};
    j["GA"] = io::to_json(check_ga(restrict_g(rc.g)));
    if (rc.c) {
        const auto d = in_domain_dl(rc.g, rc.h, *rc.c);
        j["region"] = {{"h", rc.h}, {"c", *rc.c}, {"in_DL", d.in_dl}, {"diagnostics", d.diagnostics}};
    }
    emit(rc, "hypotheses.json", j);
    return kOk;
}

int cmd_pde(const RunConfig& rc, const Flags& f) {
    SimConfig sim = rc.sim;
    const double x0 = f.pde_x0.value_or(50.0);
    std::optional<WaveProfile> seed;
    std::optional<double> seed_c;
    if (f.seed_profile) {
        seed_c = require_c(rc);
        const auto ctx = make_context(rc.g, rc.h, *seed_c);
        seed = solve_profile(ctx, rc.solve);
        const double c = *seed_c;
        const WaveProfile* p = &*seed;
        sim.history = [p, c, x0](double s, double x) { return (*p)(c * s - (x - x0)); };
    } else {
        sim.history = step_history(rc.g.kappa(), x0);
    }
    const auto rec = simulate(rc.g, rc.h, sim);
    json j{{"h", rc.h},
           {"length", sim.length},
           {"dx", sim.dx},
           {"dt", sim.dt},
           {"t_end", sim.t_end},
           {"level", rec.level},
           {"initial_data", seed ? "profile" : "step"}};
    try {
        j["speed"] = measure_front_speed(rec);
    } catch (const Error& e) {
        j["speed"] = nullptr;
        j["diagnostic"] = e.what();
    }
    if (seed_c) j["seed_c"] = *seed_c;
    const std::size_t stride = static_cast<std::size_t>(std::max(1, f.probe_stride));
    io::write_text(rc.out_dir / "snapshots.csv", io::snapshots_csv(rec, stride));
    io::write_text(rc.out_dir / "front.csv", io::front_trace_csv(rec));
    emit(rc, "pde.json", j);
    return j["speed"].is_null() ? kSolverFailure : kOk;
}

unsigned worker_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("WAVEFRONT_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) n = static_cast<unsigned>(v);
        } catch (const std::exception&) {
            invalid(std::string("WAVEFRONT_THREADS must be a positive integer, got '") + env + "'");
        }
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

struct SweepRow {
    double c = 0.0;
    bool ok = false;
    std::string error;
    json data;
};

SweepRow sweep_row(const RunConfig& rc, double c, bool with_profiles) {
    SweepRow row;
    row.c = c;
    try {
        const auto ctx = make_context(rc.g, rc.h, c);
        json d;
        d["in_DL"] = ctx.in_dl;
        d["regime"] = std::string(to_string(ctx.regime));
        d["mu1"] = ctx.mu1 ? json(*ctx.mu1) : json(nullptr);
        d["mu2"] = ctx.mu2 ? json(*ctx.mu2) : json(nullptr);
        d["lambda1"] = ctx.lambda1 ? json(*ctx.lambda1) : json(nullptr);
        d["lambda2"] = ctx.lambda2 ? json(*ctx.lambda2) : json(nullptr);
        d["gamma"] = ctx.mu1 ? json(rc.g.g_theta() / (1.0 + *ctx.mu1 * *ctx.mu2)) : json(nullptr);
        d["gamma1"] = rc.reference_model && rc.h == 2.0 ? json(gamma1_reference(c)) : json(nullptr);
        d["xi"] = xi(rc.h, c);
        if (with_profiles && ctx.regime != Regime::no_front) {
            const auto phi = solve_profile(ctx, rc.solve);
            const auto shape = classify(ctx, phi);
            d["classification"] = std::string(to_string(shape.classification));
            d["local_maxima"] = shape.local_maxima;
            d["local_minima"] = shape.local_minima;
            d["phi_at_ch"] = phi(ctx.tau);
            d["residual"] = phi.residual;
        }
        row.data = std::move(d);
        row.ok = true;
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    std::ostringstream os;
    os.precision(12);
    if (v.is_number_integer()) os << v.get<long long>();
    else os << v.get<double>();
    return os.str();
}

int cmd_sweep(const RunConfig& rc, bool with_profiles) {
    if (!rc.has_range) invalid("sweep needs --c-range lo:hi:n");
    const std::size_t n = rc.c_grid.size();
    std::vector<SweepRow> rows(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) rows[i] = sweep_row(rc, rc.c_grid[i], with_profiles);
    };
    const unsigned workers = worker_count(n);
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    std::vector<std::string> cols{"in_DL", "regime", "mu1", "mu2", "lambda1", "lambda2", "gamma", "gamma1", "xi"};
    if (with_profiles) {
        for (const char* k : {"classification", "local_maxima", "local_minima", "phi_at_ch", "residual"}) cols.push_back(k);
    }
    std::ostringstream csv;
    csv.precision(12);
    csv << "c,status";
    for (const auto& k : cols) csv << ',' << k;
    csv << ",error\n";
    std::size_t good = 0;
    json out = json::array();
    for (const auto& r : rows) {
        csv << r.c << ',' << (r.ok ? "ok" : "failed");
        for (const auto& k : cols) csv << ',' << (r.ok && r.data.contains(k) ? csv_cell(r.data.at(k)) : "");
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        csv << ',' << err << '\n';
        json j{{"c", r.c}, {"ok", r.ok}};
        if (r.ok) j["values"] = r.data;
        else j["error"] = r.error;
        out.push_back(j);
        good += r.ok ? 1 : 0;
    }
    io::write_text(rc.out_dir / "sweep.csv", csv.str());
    json summary{{"rows", n}, {"succeeded", good}, {"workers", workers}, {"rows_detail", out}};
    io::write_json(rc.out_dir / "sweep.json", summary);
    if (!rc.quiet) std::cout << "sweep: " << good << "/" << n << " rows ok, " << workers << " workers\n";
    return 10 * good >= 9 * n ? kOk : kSolverFailure;
}

int cmd_replicate(const RunConfig& rc, const std::vector<int>& only) {
    acceptance::Suite suite;
    json table = json::array();
    bool all = true;
    for (int id = 1; id <= acceptance::Suite::kCount; ++id) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto cr = suite.run(id);
        all = all && cr.pass;
        if (!rc.quiet) std::cout << acceptance::format(cr) << std::flush;
        json lines = json::array();
        for (const auto& l : cr.lines)
            lines.push_back({{"label", l.label}, {"computed", l.computed}, {"expected", l.expected}, {"pass", l.pass}});
        json row{{"id", cr.id}, {"title", cr.title}, {"anchor", cr.anchor}, {"pass", cr.pass}, {"seconds", cr.seconds},
                 {"lines", lines}};
        if (!cr.error.empty()) row["error"] = cr.error;
        table.push_back(row);
    }
    io::write_json(rc.out_dir / "replicate.json", {{"all_pass", all}, {"criteria", table}});
    return all ? kOk : kAcceptanceFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wavefronts of a delayed reaction-diffusion equation with a piecewise linear birth function"};
    app.set_help_flag("--help", "print help");  // -h would clash with --h
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--model", f.model, "birth function: JSON file or inline JSON {k1,k2,k3,theta,kappa}");
    app.add_option("--config", f.config, "JSON run configuration");
    app.add_option("--h", f.h, "delay h (default 2)");
    app.add_option("--c", f.c, "wave speed");
    app.add_option("--c-range", f.c_range, "speed grid lo:hi:n");
    app.add_option("--out-dir", f.out_dir, "directory for reports (default .)");
    app.add_option("--tol", f.tol, "fixed-point tolerance (default 1e-8 g(theta))");
    app.add_option("--grid-dt", f.grid_dt, "target profile grid step");
    app.add_flag("--quiet", f.quiet, "no report on stdout");

    auto* spectrum = app.add_subcommand("spectrum", "characteristic roots and region membership at --c");
    auto* speeds = app.add_subcommand("speeds", "minimal and critical speeds");
    auto* region = app.add_subcommand("region", "admissible-region membership at --c or over --c-range");
    auto* profile = app.add_subcommand("profile", "solve, classify and write the wave profile at --c");
    auto* classify_cmd = app.add_subcommand("classify", "shape report of the profile at --c (no CSV output)");
    auto* ga = app.add_subcommand("ga-check", "global attractivity of the fixed point (g^2, and sigma at --c)");
    auto* pde = app.add_subcommand("pde", "direct simulation of the delayed PDE");
    pde->add_flag("--seed-profile", f.seed_profile, "start from the solved profile at --c instead of step data");
    pde->add_option("--length", f.pde_length, "domain length");
    pde->add_option("--dx", f.pde_dx, "space step");
    pde->add_option("--dt", f.pde_dt, "time step");
    pde->add_option("--t-end", f.pde_t_end, "final time");
    pde->add_option("--x0", f.pde_x0, "initial front position (default 50)");
    pde->add_option("--probe-stride", f.probe_stride, "grid points between snapshot columns (default 100)");
    auto* sweep = app.add_subcommand("sweep", "spectrum and gamma over --c-range, in parallel");
    sweep->add_flag("--profiles", f.sweep_profiles, "also solve and classify each profile");
    auto* replicate = app.add_subcommand("replicate-paper", "run the acceptance suite on the reference model");
    replicate->add_option("--only", f.criteria, "criterion ids to run, e.g. 1,3")->delimiter(',');
    auto* verify = app.add_subcommand("verify-hypotheses", "UM, FC, sub-tangency, GA and region membership");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalidConfig;
    }

    try {
        const RunConfig rc = resolve(f);
        if (*spectrum) return cmd_spectrum(rc);
        if (*speeds) return cmd_speeds(rc);
        if (*region) return cmd_region(rc);
        if (*profile) return cmd_profile(rc, true);
        if (*classify_cmd) return cmd_profile(rc, false);
        if (*ga) return cmd_ga_check(rc);
        if (*pde) return cmd_pde(rc, f);
        if (*sweep) return cmd_sweep(rc, f.sweep_profiles);
        if (*replicate) return cmd_replicate(rc, f.criteria);
        if (*verify) return cmd_verify(rc);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::invalid_config ? kInvalidConfig : kSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolverFailure;
    }
    return kInvalidConfig;
}
