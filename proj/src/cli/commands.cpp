#include "cli/commands.hpp"

#include "mipt/errors.hpp"
#include "mipt/evolve.hpp"
#include "mipt/largen.hpp"
#include "mipt/mc_oracle.hpp"
#include "mipt/model.hpp"
#include "mipt/riccati.hpp"
#include "mipt/spectral.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <thread>

namespace mipt::cli {

namespace {

// --- helpers ---

/// Runs f(0..n-1) on up to `jobs` threads; results (and the first failure,
/// by index) are independent of scheduling.
template <class F>
auto parallel_map(std::size_t n, int jobs, F f) -> std::vector<decltype(f(std::size_t{}))> {
    using R = decltype(f(std::size_t{}));
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int k = static_cast<int>(std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(n, 1)));
    if (k <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < k; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::vector<R> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (errors[i]) std::rethrow_exception(errors[i]);
        out.push_back(std::move(*slots[i]));
    }
    return out;
}

ModelParams read_params(ConfigReader& c) {
    const int N = c.integer("N");
    const int d = c.integer("d", 2);
    const double alpha = c.real("alpha");
    const double J = c.real("J", 1.0);
    return make_params(N, d, alpha, J);
}

// Continuum quantities do not depend on N.
ModelParams continuum_params(int d, double alpha, double J) { return make_params(2, d, alpha, J); }

InitialKind read_init(ConfigReader& c, const std::string& fallback) {
    return parse_initial_kind(c.text("init", fallback));
}

Cell opt(const std::optional<double>& v) {
    if (v) return *v;
    return std::string();
}

std::vector<double> read_record_times(ConfigReader& c, double& t_max) {
    if (!c.has("record_times")) {
        t_max = c.real("t_max");
        return c.reals("record_times", {t_max});
    }
    std::vector<double> times = c.reals("record_times");
    if (times.empty()) throw ConfigError("record_times is empty");
    double mx = 0.0;
    for (double t : times) mx = std::max(mx, t);
    t_max = c.real("t_max", mx);
    return times;
}

// --- commands ---

Table cmd_coeffs(ConfigReader& c, int) {
    const ModelParams p = read_params(c);
    const TridiagonalGenerator g = build_generator(p);
    Table t{{"n", "x", "a", "b", "c_prev"}, {}};
    for (int n = 0; n <= p.num_sites; ++n) {
        t.add_row({static_cast<long long>(n), static_cast<double>(n) / p.num_sites, g.diag[n], g.upper[n], g.lower[n]});
    }
    return t;
}

Table cmd_spectrum(ConfigReader& c, int) {
    const ModelParams p = read_params(c);
    const InitialKind init = read_init(c, "pure");
    const std::string method_name = c.text("method", "auto");
    EigenMethod method;
    if (method_name == "auto") {
        method = EigenMethod::automatic;
    } else if (method_name == "ql") {
        method = EigenMethod::ql;
    } else if (method_name == "bisection") {
        method = EigenMethod::bisection;
    } else {
        throw ConfigError("method must be auto, ql or bisection");
    }
    const int modes = c.integer("modes", 0);
    if (modes < 0) throw ConfigError("modes must be >= 0 (0 = all)");
    const TridiagonalGenerator g = build_generator(p);
    const SimilarityWeights w = similarity_weights(g);
    SpectralDecomposition dec = eigendecompose(hermitianize(g, p), method);
    project_initial(dec, w, initial_purity(init, p));
    Table t{{"index", "energy", "eta_sign", "log_abs_eta"}, {}};
    const std::size_t count = modes == 0 ? dec.size() : std::min<std::size_t>(modes, dec.size());
    for (std::size_t a = 0; a < count; ++a) {
        t.add_row({static_cast<long long>(a), dec.energies[a], static_cast<long long>(dec.eta_sign[a]),
                   dec.eta_sign[a] == 0 ? Cell(std::string()) : Cell(dec.log_eta[a])});
    }
    return t;
}

Table cmd_gap_scan(ConfigReader& c, int jobs) {
    const int d = c.integer("d", 2);
    const double J = c.real("J", 1.0);
    const std::vector<double> alphas = c.reals("alpha");
    const std::vector<int> sizes = c.integers("N");
    std::vector<std::pair<double, int>> points;
    for (double a : alphas) {
        if (!(a > 0.0)) throw ConfigError("gap-scan needs alpha > 0 (the similarity transform is singular at 0)");
        for (int n : sizes) points.emplace_back(a, n);
    }
    const auto results = parallel_map(points.size(), jobs, [&](std::size_t i) {
        const ModelParams p = make_params(points[i].second, d, points[i].first, J);
        const LowModes m = low_modes(hermitianize(build_generator(p), p));
        return std::pair<double, double>(m.e0, m.e1);
    });
    Table t{{"alpha", "N", "E0", "E1", "gap"}, {}};
    for (std::size_t i = 0; i < points.size(); ++i) {
        t.add_row({points[i].first, static_cast<long long>(points[i].second), results[i].first,
                   results[i].second, results[i].second - results[i].first});
    }
    return t;
}

void append_purity_rows(Table& t, const PurityVector& pv, double time, bool with_log) {
    const std::vector<double> s = entropy_density(pv);
    const int N = pv.num_sites();
    for (int n = 0; n <= N; ++n) {
        std::vector<Cell> row{time, static_cast<long long>(n), static_cast<double>(n) / N};
        if (with_log) row.emplace_back(pv.log_purity(n));
        row.emplace_back(s[n]);
        t.add_row(std::move(row));
    }
}

Table cmd_evolve(ConfigReader& c, int) {
    const ModelParams p = read_params(c);
    const InitialKind init = read_init(c, "pure");
    const std::string method = c.text("method", "rk4");
    double t_max = 0.0;
    const std::vector<double> times = read_record_times(c, t_max);
    const PurityVector p0 = initial_purity(init, p);
    const TridiagonalGenerator g = build_generator(p);
    Table t{{"t", "n", "x", "log_purity", "s"}, {}};
    if (method == "rk4") {
        EvolveConfig cfg;
        cfg.dt = c.real("dt", 0.0);
        cfg.t_max = t_max;
        cfg.renorm_every = c.integer("renorm_every", 1);
        cfg.record_times = times;
        const EvolveConfig resolved = resolve_config(g, p, cfg);
        c.set("dt", resolved.dt);
        for (const PurityVector& pv : evolve_record(g, p, p0, resolved)) append_purity_rows(t, pv, pv.time, true);
    } else if (method == "spectral") {
        const SimilarityWeights w = similarity_weights(g);
        SpectralDecomposition dec = eigendecompose(hermitianize(g, p));
        project_initial(dec, w, p0);
        std::vector<double> sorted = times;
        std::sort(sorted.begin(), sorted.end());
        for (double time : sorted) append_purity_rows(t, propagate(dec, w, time), time, true);
    } else {
        throw ConfigError("method must be rk4 or spectral");
    }
    return t;
}

Table cmd_entropy_curve(ConfigReader& c, int) {
    const ModelParams p = read_params(c);
    const InitialKind init = read_init(c, "pure");
    const bool stationary = c.flag("stationary");
    const PurityVector p0 = initial_purity(init, p);
    const TridiagonalGenerator g = build_generator(p);
    Table t{{"t", "n", "x", "s"}, {}};
    if (stationary) {
        const double window = c.real("window_time", static_cast<double>(p.num_sites) / p.coupling);
        if (!(window >= 0.0)) throw ConfigError("window_time must be >= 0");
        const SimilarityWeights w = similarity_weights(g);
        LowModes m = low_modes(hermitianize(g, p));
        project_low_modes(m, w, p0);
        const std::vector<double> s = stationary_entropy(m, w, p, window);
        for (int n = 0; n <= p.num_sites; ++n) {
            t.add_row({std::string("inf"), static_cast<long long>(n), static_cast<double>(n) / p.num_sites, s[n]});
        }
        return t;
    }
    double t_max = 0.0;
    EvolveConfig cfg;
    cfg.record_times = read_record_times(c, t_max);
    cfg.t_max = t_max;
    cfg.dt = c.real("dt", 0.0);
    const EvolveConfig resolved = resolve_config(g, p, cfg);
    c.set("dt", resolved.dt);
    const EntropySeries series = entropy_curve_series(g, p, p0, resolved);
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        for (int n = 0; n <= p.num_sites; ++n) {
            t.add_row({series.times[k], static_cast<long long>(n), static_cast<double>(n) / p.num_sites,
                       series.s[k][n]});
        }
    }
    return t;
}

Table cmd_largen(ConfigReader& c, int) {
    const int d = c.integer("d", 2);
    const double alpha = c.real("alpha");
    const double J = c.real("J", 1.0);
    const InitialKind init = read_init(c, "pure");
    const int grid = c.integer("grid_points", 1001);
    const ModelParams p = continuum_params(d, alpha, J);
    const ContinuumProfile prof = stationary_entropy_curve(p, init, grid);
    Table t{{"x", "V", "tau", "D", "A_L", "A_R", "s_inf", "dA_L"}, {}};
    for (std::size_t i = 0; i < prof.x.size(); ++i) {
        const double x = prof.x[i];
        const bool endpoint = x == 0.0 || x == 1.0;
        t.add_row({x, prof.V[i], prof.tau[i], prof.D[i], prof.A_L[i], prof.A_R[i], prof.s_inf[i],
                   endpoint ? Cell(std::string()) : Cell(action_left_derivative(x, p))});
    }
    return t;
}

Table cmd_saddle(ConfigReader& c, int) {
    const std::vector<int> dims = c.integers("d", {2});
    const std::vector<double> alphas = c.reals("alpha");
    const double J = c.real("J", 1.0);
    Table t{{"d", "alpha", "phase", "alpha_c", "epsilon0", "x_V", "x_L", "x_L_exact", "residual_entropy",
             "cusp_slope", "curvature_smooth"},
            {}};
    for (int d : dims) {
        for (double a : alphas) {
            const ModelParams p = continuum_params(d, a, J);
            const CriticalObservables o = critical_observables(p);
            const bool smooth = o.phase == Phase::smooth;
            const Cell none = std::string();
            t.add_row({static_cast<long long>(d), a, std::string(to_string(o.phase)), o.alpha_c, o.epsilon0,
                       o.x_V_left, smooth ? none : Cell(o.x_L), smooth ? none : Cell(a / (d - 1.0)),
                       smooth ? none : Cell(o.residual_entropy), smooth ? none : Cell(o.cusp_slope),
                       opt(o.curvature_smooth)});
        }
    }
    return t;
}

Table cmd_riccati(ConfigReader& c, int jobs) {
    const int d = c.integer("d", 2);
    const std::vector<double> alphas = c.reals("alpha");
    const double J = c.real("J", 1.0);
    const double dt = c.real("dt", 1e-3);
    const bool series = c.flag("series");
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    if (!series) {
        const auto rows = parallel_map(alphas.size(), jobs, [&](std::size_t i) {
            const ModelParams p = continuum_params(d, alphas[i], J);
            const RiccatiCoefficients k = riccati_coefficients(p);
            std::optional<double> tc_num, u_inf;
            if (k.t_c) {
                tc_num = integrate_u(p, 2.0 * *k.t_c, dt).t_c_estimate;
            } else {
                u_inf = u_infinity(k);
            }
            return std::vector<Cell>{static_cast<long long>(d), alphas[i], std::string(to_string(k.phase)),
                                     k.a_tilde, k.b_tilde, k.u_tilde, k.t0, opt(k.t_c), opt(tc_num), opt(u_inf)};
        });
        Table t{{"d", "alpha", "phase", "a_tilde", "b_tilde", "u_tilde", "t0", "t_c", "t_c_numeric", "u_inf"}, {}};
        for (const auto& r : rows) t.add_row(r);
        return t;
    }

    const double t_max = c.real("t_max", 10.0 / J);
    const std::vector<double> times = c.reals("record_times", [&] {
        std::vector<double> v;
        for (int i = 0; i <= 100; ++i) v.push_back(t_max * i / 100.0);
        return v;
    }());
    const int N = c.has("N") ? c.integer("N") : 0;
    const int window = N > 0 ? c.integer("fit_window", 10) : 0;
    Table t{{"alpha", "t", "u_analytic", "u_integrated", "u_pde"}, {}};
    const auto blocks = parallel_map(alphas.size(), jobs, [&](std::size_t i) {
        const ModelParams cont = continuum_params(d, alphas[i], J);
        const RiccatiCoefficients k = riccati_coefficients(cont);
        std::vector<double> pde(times.size(), NAN);
        if (N > 0) {
            const ModelParams p = make_params(N, d, alphas[i], J);
            EvolveConfig cfg;
            cfg.record_times = times;
            cfg.fit_window = window;
            const CuspTrace tr = trace_cusp(build_generator(p), p, initial_purity(InitialKind::pure, p), cfg);
            // trace times are sorted; map back to the requested order
            std::multimap<double, double> by_time;
            for (std::size_t j = 0; j < tr.times.size(); ++j) by_time.emplace(tr.times[j], tr.u[j]);
            for (std::size_t j = 0; j < times.size(); ++j) pde[j] = by_time.find(times[j])->second;
        }
        std::vector<std::vector<Cell>> rows;
        for (std::size_t j = 0; j < times.size(); ++j) {
            const double tt = times[j];
            std::optional<double> ua, ui;
            if (!k.t_c || tt < *k.t_c) ua = analytic_u(tt, k);
            const RiccatiSeries s = integrate_u(cont, tt, dt);
            if (!s.diverged) ui = s.u.back();
            rows.push_back({alphas[i], tt, opt(ua), opt(ui), N > 0 ? Cell(pde[j]) : Cell(std::string())});
        }
        return rows;
    });
    for (const auto& block : blocks) {
        for (const auto& r : block) t.add_row(r);
    }
    return t;
}

Table cmd_mc_validate(ConfigReader& c, int jobs) {
    const ModelParams p = read_params(c);
    const InitialKind init = read_init(c, "pure");
    TrajectoryConfig cfg;
    cfg.record_times = c.reals("t", {1.0});
    cfg.n_traj = c.integer64("n_traj", 10000);
    cfg.seed = static_cast<std::uint64_t>(c.integer64("seed", 0));
    cfg.dt = c.real("dt", 1e-3);
    cfg.n_batches = c.integer("n_batches", 20);
    cfg.jobs = jobs;
    cfg.t_max = 0.0;
    for (double t : cfg.record_times) cfg.t_max = std::max(cfg.t_max, t);
    const MCEstimate est = estimate_purity(p, cfg, init);

    // Master-equation reference at the (step-rounded) record times.
    const TridiagonalGenerator g = build_generator(p);
    const PurityVector p0 = initial_purity(init, p);
    std::vector<PurityVector> ref;
    if (p.meas_ratio > 0.0) {
        const SimilarityWeights w = similarity_weights(g);
        SpectralDecomposition dec = eigendecompose(hermitianize(g, p));
        project_initial(dec, w, p0);
        for (double t : est.times) ref.push_back(propagate(dec, w, t));
    } else {
        EvolveConfig ec;
        ec.record_times = est.times;
        ec.t_max = est.times.back();
        ref = evolve_record(g, p, p0, ec);
    }

    Table t{{"t", "n", "mc_mean", "mc_se", "ode_value", "z_score", "mc_entropy", "mc_entropy_se", "ode_entropy"}, {}};
    for (std::size_t k = 0; k < est.times.size(); ++k) {
        for (int n = 0; n <= p.num_sites; ++n) {
            const double ode = std::exp(ref[k].log_purity(n));
            const double se = est.se[k][n];
            const Cell z = se > 0.0 ? Cell((est.mean[k][n] - ode) / se) : Cell(std::string());
            const double ode_s = -(ref[k].log_purity(n) - ref[k].log_purity(0));
            t.add_row({est.times[k], static_cast<long long>(n), est.mean[k][n], se, ode, z, est.entropy[k][n],
                       est.entropy_se[k][n], ode_s});
        }
    }
    return t;
}

Table cmd_sweep(ConfigReader& c, int jobs) {
    const int d = c.integer("d", 2);
    const double J = c.real("J", 1.0);
    const std::vector<double> alphas = c.reals("alpha");
    const std::vector<int> sizes = c.integers("N");
    const InitialKind init = read_init(c, "one_mixed");
    if (init == InitialKind::max_mixed) throw ConfigError("sweep supports init pure or one_mixed");
    // negative: window N/J for each N
    const double window = c.real("window_time", -1.0);
    std::vector<std::pair<double, int>> points;
    for (double a : alphas) {
        if (!(a > 0.0)) throw ConfigError("sweep needs alpha > 0");
        for (int n : sizes) points.emplace_back(a, n);
    }
    const auto rows = parallel_map(points.size(), jobs, [&](std::size_t i) {
        const ModelParams p = make_params(points[i].second, d, points[i].first, J);
        const TridiagonalGenerator g = build_generator(p);
        const SimilarityWeights w = similarity_weights(g);
        LowModes m = low_modes(hermitianize(g, p));
        project_low_modes(m, w, initial_purity(init, p));
        const std::vector<double> s = stationary_entropy(m, w, p, window);
        const int N = p.num_sites;
        const int half = N / 2;
        const double residual = residual_entropy(p, init);
        return std::vector<Cell>{points[i].first, static_cast<long long>(N), std::string(to_string(phase_of(p))),
                                 s[N] * N, residual, s[half],
                                 stationary_entropy_at(static_cast<double>(half) / N, p), m.gap()};
    });
    Table t{{"alpha", "N", "phase", "S_N", "S_N_continuum", "s_half", "s_half_continuum", "gap"}, {}};
    for (const auto& r : rows) t.add_row(r);
    return t;
}

using Runner = Table (*)(ConfigReader&, int);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> table = {
        {"coeffs", cmd_coeffs},     {"spectrum", cmd_spectrum},       {"gap-scan", cmd_gap_scan},
        {"evolve", cmd_evolve},     {"entropy-curve", cmd_entropy_curve}, {"largen", cmd_largen},
        {"saddle", cmd_saddle},     {"riccati", cmd_riccati},         {"mc-validate", cmd_mc_validate},
        {"sweep", cmd_sweep},
    };
    return table;
}

OptionSpec opt_spec(const std::string& flag, const std::string& help, bool is_switch = false) {
    std::string key = flag;
    for (char& ch : key) {
        if (ch == '-') ch = '_';
    }
    return {flag, key, help, is_switch};
}

} // namespace

// --- public interface ---

const std::vector<CommandInfo>& command_table() {
    static const std::vector<CommandInfo> table = [] {
        const auto N = opt_spec("N", "number of sites");
        const auto d = opt_spec("d", "local dimension (default 2)");
        const auto alpha = opt_spec("alpha", "measurement ratio alpha = lambda/(dJ)");
        const auto alphas = opt_spec("alpha", "alpha value, list a,b,c or range start:stop:step");
        const auto J = opt_spec("J", "coupling J (default 1)");
        const auto init = opt_spec("init", "initial state: pure | one_mixed | max_mixed");
        const auto dt = opt_spec("dt", "time step");
        const auto t_max = opt_spec("t-max", "final time");
        const auto rec = opt_spec("record-times", "times to record (list or range)");
        return std::vector<CommandInfo>{
            {"coeffs", "master-equation coefficients a_n, b_n, c_{n-1}", {N, d, alpha, J}},
            {"spectrum",
             "eigenvalues of the symmetrized generator and initial-state overlaps",
             {N, d, alpha, J, init, opt_spec("method", "auto | ql | bisection"),
              opt_spec("modes", "number of lowest modes to list (0 = all)")}},
            {"gap-scan", "E_0, E_1 and the gap over an (alpha, N) grid",
             {d, alphas, opt_spec("N", "sizes, list or range"), J}},
            {"evolve", "purity vector P_n(t) by RK4 or exact spectral propagation",
             {N, d, alpha, J, init, dt, t_max, rec, opt_spec("method", "rk4 | spectral"),
              opt_spec("renorm-every", "RK4 steps between renormalizations")}},
            {"entropy-curve", "entropy density s(x, t) at record times, or the long-time curve",
             {N, d, alpha, J, init, dt, t_max, rec, opt_spec("stationary", "long-time curve from the low modes", true),
              opt_spec("window-time", "observation window for --stationary (default N/J)")}},
            {"largen", "continuum profiles V, tau, D, A_L, A_R and s_inf on a grid",
             {d, alpha, J, init, opt_spec("grid-points", "number of grid points (default 1001)")}},
            {"saddle", "closed-form critical observables and the saddle point x_L",
             {opt_spec("d", "local dimension(s)"), alphas, J}},
            {"riccati", "Riccati coefficients, t_c and u(infinity); --series for u(t)",
             {d, alphas, J, dt, opt_spec("series", "emit u(t) series instead of the summary", true), t_max, rec,
              opt_spec("N", "also trace u(t) from the finite-N master equation"),
              opt_spec("fit-window", "points in the curvature fit (default 10)")}},
            {"mc-validate", "Monte Carlo trajectories versus the master equation",
             {N, d, alpha, J, init, opt_spec("t", "record time(s)"), opt_spec("n-traj", "number of trajectories"),
              opt_spec("seed", "64-bit seed"), dt, opt_spec("n-batches", "batches for standard errors")}},
            {"sweep", "long-time S_N and s(1/2) over an (alpha, N) grid",
             {d, alphas, opt_spec("N", "sizes, list or range"), J, init,
              opt_spec("window-time", "observation window (negative: N/J)")}},
        };
    }();
    return table;
}

Table run_command(const std::string& command, const json& raw, int jobs, json& resolved) {
    const auto it = runners().find(command);
    if (it == runners().end()) throw ConfigError("unknown command '" + command + "'");
    json body = raw;
    body.erase("command");
    ConfigReader reader(body);
    const std::string format = reader.text("format", "csv");
    if (format != "csv" && format != "json") throw ConfigError("format must be csv or json");
    Table table = it->second(reader, jobs);
    reader.finish();
    resolved = reader.resolved();
    resolved["command"] = command;
    return table;
}

std::string run_to_text(const json& raw_with_command, int jobs) {
    if (!raw_with_command.is_object() || !raw_with_command.contains("command") ||
        !raw_with_command["command"].is_string()) {
        throw ConfigError("configuration lacks a \"command\" entry");
    }
    json resolved;
    const Table table = run_command(raw_with_command["command"].get<std::string>(), raw_with_command, jobs, resolved);
    return render(table, resolved, resolved["format"].get<std::string>());
}

int resolve_jobs(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("MIPT_LAB_JOBS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1 || v > 4096) {
            throw ConfigError("MIPT_LAB_JOBS must be a positive integer");
        }
        return static_cast<int>(v);
    }
    return 1;
}

} // namespace mipt::cli
