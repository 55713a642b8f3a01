#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mipt/errors.hpp"
#include "mipt/evolve.hpp"
#include "mipt/spectral.hpp"
#include "oracles.hpp"

#include <cmath>
#include <limits>

using namespace mipt;

namespace {

PurityVector run(const ModelParams& p, InitialKind init, double t, double dt = 0.0) {
    EvolveConfig cfg;
    cfg.t_max = t;
    cfg.dt = dt;
    auto g = build_generator(p);
    return evolve_record(g, p, initial_purity(init, p), cfg).back();
}

} // namespace

TEST_CASE("entropy density of simple profiles") {
    PurityVector p;
    p.values = {1.0, 0.5, 0.25};
    auto s = entropy_density(p);
    CHECK(s[0] == 0.0);
    CHECK(s[1] == doctest::Approx(std::log(2.0) / 2.0));
    CHECK(s[2] == doctest::Approx(std::log(2.0)));
}

TEST_CASE("unitary-only evolution conserves boundary purities") {
    auto p = make_params(30, 2, 0.0);
    EvolveConfig cfg;
    cfg.t_max = 3.0;
    cfg.record_times = {0.5, 1.0, 3.0};
    auto rec = evolve_record(build_generator(p), p, initial_purity(InitialKind::one_mixed, p), cfg);
    for (const auto& r : rec) {
        CHECK(std::abs(r.log_purity(0)) < 1e-12);
        CHECK(std::abs(r.log_purity(30) - std::log(0.5)) < 1e-12);
    }
}

TEST_CASE("pure initial states stay reflection symmetric and non-negative") {
    auto p = make_params(50, 3, 0.3);
    auto r = run(p, InitialKind::pure, 1.5);
    auto s = entropy_density(r);
    for (int n = 0; n <= 50; ++n) {
        CHECK(std::abs(s[n] - s[50 - n]) < 1e-10);
        CHECK(s[n] >= -1e-12);
        CHECK(r.values[n] > 0.0);
    }
}

TEST_CASE("RK4 agrees with spectral propagation and the dense exponential") {
    auto p = make_params(50, 2, 0.4);
    auto g = build_generator(p);
    auto p0 = initial_purity(InitialKind::one_mixed, p);
    auto rk = run(p, InitialKind::one_mixed, 2.0, 0.25 * max_stable_dt(g, p));

    auto w = similarity_weights(g);
    auto dec = eigendecompose(hermitianize(g, p));
    project_initial(dec, w, p0);
    auto sp = propagate(dec, w, 2.0);

    auto ref = oracle::entropy_from(oracle::dense_propagate(oracle::dense_generator(50, 2, 0.4), 1.0, 2.0,
                                                            Eigen::Map<Eigen::VectorXd>(p0.values.data(), 51)));
    auto s_rk = entropy_density(rk), s_sp = entropy_density(sp);
    for (int n = 0; n <= 50; ++n) {
        CHECK(std::abs(s_rk[n] - s_sp[n]) < 1e-6);
        CHECK(std::abs(s_rk[n] - ref[n]) < 1e-6);
    }
}

TEST_CASE("RK4 converges at fourth order") {
    auto p = make_params(20, 2, 0.4);
    auto p0 = initial_purity(InitialKind::one_mixed, p);
    auto ref = oracle::dense_propagate(oracle::dense_generator(20, 2, 0.4), 1.0, 0.5,
                                       Eigen::Map<Eigen::VectorXd>(p0.values.data(), 21));
    auto err = [&](double dt) {
        auto r = run(p, InitialKind::one_mixed, 0.5, dt);
        double e = 0.0;
        for (int n = 0; n <= 20; ++n) e = std::max(e, std::abs(r.log_purity(n) - std::log(ref[n])));
        return e;
    };
    const double dt = max_stable_dt(build_generator(p), p);
    const double ratio = err(dt) / err(dt / 2.0);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("time step bounds and configuration") {
    auto p = make_params(20, 2, 0.4, 2.0);
    auto g = build_generator(p);
    const double bound = max_stable_dt(g, p);
    CHECK(bound == doctest::Approx(rk4_stability_bound / (2.0 * g.max_abs_diag())));
    EvolveConfig cfg;
    cfg.t_max = 1.0;
    cfg.dt = 2.0 * bound;
    CHECK_THROWS_AS(resolve_config(g, p, cfg), ParameterError);
    cfg.dt = 0.0;
    cfg.record_times = {0.7, 0.2};
    auto r = resolve_config(g, p, cfg);
    CHECK(r.dt == doctest::Approx(bound));
    CHECK(r.record_times.front() == 0.2);
}

TEST_CASE("non-finite states are reported with the failure time") {
    auto p = make_params(10, 2, 0.4);
    auto g = build_generator(p);
    auto state = initial_purity(InitialKind::pure, p);
    state.values[4] = std::numeric_limits<double>::quiet_NaN();
    EvolveConfig cfg;
    cfg.t_max = 0.1;
    CHECK_THROWS_AS(advance(g, p, state, 0.1, resolve_config(g, p, cfg)), IntegrationFailure);
}

TEST_CASE("purity ratios beyond double range are reported, not truncated") {
    // d^{-n} for n near 1200 underflows; the linear-scale RK4 state cannot hold it.
    auto p = make_params(1200, 2, 0.3);
    EvolveConfig cfg;
    cfg.t_max = 1e-3;
    CHECK_THROWS_AS(evolve_record(build_generator(p), p, initial_purity(InitialKind::max_mixed, p), cfg),
                    IntegrationFailure);
}

TEST_CASE("cusp curvature of synthetic profiles") {
    const int N = 200;
    std::vector<double> quad(N + 1), flat(N + 1, 0.3);
    for (int n = 0; n <= N; ++n) {
        const double x = double(n) / N;
        quad[n] = 0.4 - 3.0 * (x - 0.5) * (x - 0.5);
    }
    CHECK(cusp_curvature(quad, 10) == doctest::Approx(6.0).epsilon(1e-9));
    CHECK(std::abs(cusp_curvature(flat, 10)) < 1e-9);
    CHECK(cusp_window_start(200, 10) == 95);
    std::vector<double> odd(202, 0.0);
    CHECK_THROWS_AS(cusp_curvature(odd, 10), UnsupportedGrid);
    std::vector<double> tiny(9, 0.0);
    CHECK_THROWS_AS(cusp_curvature(tiny, 10), UnsupportedGrid);
}

TEST_CASE("cusp trace starts flat for pure states") {
    auto p = make_params(100, 2, 0.3);
    EvolveConfig cfg;
    cfg.t_max = 1.0;
    cfg.record_times = {0.0, 0.5, 1.0};
    auto tr = trace_cusp(build_generator(p), p, initial_purity(InitialKind::pure, p), cfg);
    REQUIRE(tr.u.size() == 3);
    CHECK(std::abs(tr.u[0]) < 1e-12);
    CHECK(tr.u[2] > tr.u[1]);
}

TEST_CASE("entropy series starts at the initial profile") {
    auto p = make_params(16, 2, 0.2);
    EvolveConfig cfg;
    cfg.t_max = 0.4;
    cfg.record_times = {0.0, 0.4};
    auto p0 = initial_purity(InitialKind::max_mixed, p);
    auto series = entropy_curve_series(build_generator(p), p, p0, cfg);
    auto s0 = entropy_density(p0);
    for (int n = 0; n <= 16; ++n) CHECK(series.s[0][n] == doctest::Approx(s0[n]));
}

TEST_CASE("Page curve for purely unitary dynamics") {
    auto r = run(make_params(200, 2, 0.0), InitialKind::pure, 50.0);
    auto s = entropy_density(r);
    double worst = 0.0;
    for (int n = 0; n <= 200; ++n)
        worst = std::max(worst, std::abs(s[n] - std::min(n, 200 - n) / 200.0 * std::log(2.0)));
    CHECK(worst < 0.02);
}
