#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mipt/errors.hpp"
#include "mipt/largen.hpp"
#include "mipt/riccati.hpp"
#include "mipt/spectral.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace mipt;

TEST_CASE("hopping and potential") {
    auto p = make_params(10, 2, 0.25);
    CHECK(hopping(0.5, p) == doctest::Approx(0.375));
    CHECK(potential(0.5, p) == doctest::Approx(1.125));
    CHECK(hopping(0.0, p) == 0.0);
    CHECK(potential(0.0, p) == doctest::Approx(2.0 * 2.5 * 0.25));
    auto q = make_params(10, 3, 0.4, 2.0);
    for (double x : {0.1, 0.27, 0.5}) {
        CHECK(potential(x, q) == doctest::Approx(potential(1.0 - x, q)));
        CHECK(hopping(x, q) == doctest::Approx(hopping(1.0 - x, q)));
    }
    CHECK(hopping(0.5, q) == doctest::Approx(2.0 * (1.0 + 2.0 * 0.4) / 4.0));
    CHECK_THROWS_AS(potential(1.2, p), std::domain_error);
}

TEST_CASE("phase classification and critical coupling") {
    CHECK(critical_alpha(2) == 0.5);
    CHECK(critical_alpha(5) == 2.0);
    CHECK(phase_of(make_params(4, 2, 0.3)) == Phase::cusp);
    CHECK(phase_of(make_params(4, 2, 0.5)) == Phase::critical);
    CHECK(phase_of(make_params(4, 2, 0.7)) == Phase::smooth);
    CHECK(to_string(Phase::smooth) == "smooth");
}

TEST_CASE("dfunc closed form") {
    auto p = make_params(10, 2, 0.5);
    CHECK(dfunc(0.5, p) == doctest::Approx(0.2157616).epsilon(1e-7));
    CHECK(std::abs(dfunc_quadrature(0.5, p) - dfunc(0.5, p)) < 1e-10);
    CHECK(dfunc(0.0, p) == 0.0);
    CHECK(std::abs(dfunc(1.0, p)) < 1e-14);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const double x = u(rng);
        CHECK(std::abs(dfunc(x, p) - dfunc(1.0 - x, p)) < 1e-12);
    }
    auto p0 = make_params(10, 2, 0.0);
    CHECK(dfunc(0.3, p0) == 0.0);
}

TEST_CASE("dfunc closed form against quadrature on a fine grid") {
    for (double alpha : {0.1, 0.7, 2.0}) {
        auto p = make_params(10, 3, alpha);
        double worst = 0.0;
        for (int i = 0; i <= 1000; ++i) {
            const double x = i / 1000.0;
            worst = std::max(worst, std::abs(dfunc(x, p) - dfunc_quadrature(x, p)));
        }
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("dfunc derivative matches a central difference") {
    auto p = make_params(10, 2, 0.3);
    const double h = 1e-6;
    for (double x : {0.1, 0.4, 0.77})
        CHECK(dfunc_derivative(x, p) == doctest::Approx((dfunc(x + h, p) - dfunc(x - h, p)) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("ground energy") {
    auto g = ground_energy(make_params(10, 2, 0.25));
    CHECK(g.epsilon0 == doctest::Approx(1.09375).epsilon(1e-9));
    CHECK(g.x_V_left == doctest::Approx(0.1181187).epsilon(1e-6));
    CHECK(g.phase == Phase::cusp);
    auto s = ground_energy(make_params(10, 2, 1.0));
    CHECK(s.epsilon0 == doctest::Approx(4.125));
    CHECK(s.x_V_left == 0.5);
    CHECK(s.phase == Phase::smooth);
}

TEST_CASE("ground energy equals the minimum of the potential") {
    for (int d : {2, 3, 5}) {
        for (double frac : {0.1, 0.5, 0.9, 1.3}) {
            auto p = make_params(10, d, frac * critical_alpha(d), 1.5);
            auto V = [&](double x) { return potential(x, p); };
            double best = 1e300, arg = 0.0;
            for (int i = 0; i <= 200000; ++i) {
                const double x = 0.5 * i / 200000.0;
                if (V(x) < best) { best = V(x); arg = x; }
            }
            const double refined = oracle::golden_min(V, std::max(0.0, arg - 1e-5), std::min(0.5, arg + 1e-5));
            auto g = ground_energy(p);
            CHECK(std::abs(g.epsilon0 - V(refined)) < 1e-9);
            CHECK(std::abs(g.x_V_left - refined) < 1e-6);
        }
    }
}

TEST_CASE("Hamilton-Jacobi residual of the left action") {
    for (double alpha : {0.1, 0.3, 0.45, 0.7, 1.5}) {
        auto p = make_params(10, 2, alpha);
        double worst = 0.0;
        for (int i = 1; i < 200; ++i) worst = std::max(worst, std::abs(hamilton_jacobi_residual(i / 200.0, p)));
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("left action limits and minimum") {
    auto p = make_params(10, 2, 1e-8);
    for (double x : {0.1, 0.5, 0.9}) CHECK(std::abs(action_left(x, p) - x * std::log(2.0)) < 1e-3);

    auto q = make_params(10, 2, 0.3);
    CHECK(action_left(0.0, q) == 0.0);
    const double xv = ground_energy(q).x_V_left;
    const double at_min = action_left(xv, q);
    for (int i = 0; i <= 100; ++i) CHECK(action_left(i / 100.0, q) >= at_min - 1e-12);
    for (double x : {0.2, 0.6}) CHECK(action_right(x, q) == doctest::Approx(action_left(1.0 - x, q)));

    std::vector<double> xs = {0.05, 0.3, 0.95};
    auto grid = action_left_grid(xs, q);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(grid[i] == doctest::Approx(action_left(xs[i], q)).epsilon(1e-9));

    // Derivative of the accumulated action against a Simpson integral of the integrand.
    const double simp = oracle::simpson([&](double x) { return action_left_derivative(x, q); }, 0.2, 0.6, 2000);
    CHECK(std::abs((action_left(0.6, q) - action_left(0.2, q)) - simp) < 1e-9);
}

TEST_CASE("left action reproduces the finite-size ground state") {
    const int N = 2000;
    auto p = make_params(N, 2, 0.7);
    auto lm = low_modes(hermitianize(build_generator(p), p));
    auto profile = ground_state_log_profile(lm, similarity_weights(build_generator(p)), false);
    std::vector<double> xs;
    for (int n = 0; n <= N; n += 20) xs.push_back(double(n) / N);
    auto A = action_left_grid(xs, p);
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::abs(profile[i * 20] - A[i]));
    CHECK(worst < 0.01);
}

TEST_CASE("continuum entropy curve") {
    auto p = make_params(10, 2, 0.1);
    auto c = stationary_entropy_curve(p, InitialKind::pure, 201);
    CHECK(c.x.size() == 201);
    CHECK(std::abs(c.s_inf.front()) < 1e-12);
    CHECK(std::abs(c.s_inf.back()) < 1e-9);
    for (std::size_t i = 0; i < c.x.size(); ++i) CHECK(std::abs(c.s_inf[i] - c.s_inf[200 - i]) < 1e-9);
    CHECK(stationary_entropy_at(0.3, p) == doctest::Approx(c.s_inf[60]).epsilon(1e-9));

    // Only differences of the actions enter the entropy, so a common shift is inert.
    const double shift = 3.7;
    for (std::size_t i = 0; i < c.x.size(); i += 25) {
        const double shifted = c.D[i] + std::min(c.A_L[i] + shift, c.A_R[i] + shift) -
                               (c.D[0] + std::min(c.A_L[0] + shift, c.A_R[0] + shift));
        CHECK(shifted == doctest::Approx(c.s_inf[i]).epsilon(1e-12));
    }

    auto page = stationary_entropy_curve(make_params(10, 2, 1e-9), InitialKind::pure, 101);
    for (std::size_t i = 0; i < page.x.size(); ++i)
        CHECK(std::abs(page.s_inf[i] - std::min(page.x[i], 1.0 - page.x[i]) * std::log(2.0)) < 1e-3);

    CHECK_THROWS(stationary_entropy_curve(p, InitialKind::max_mixed));
}

TEST_CASE("saddle points") {
    CHECK(saddle_points(make_params(10, 2, 0.3)).x_L == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(saddle_points(make_params(10, 2, 0.3)).x_R == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(saddle_points(make_params(10, 3, 0.5)).x_L == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(std::abs(saddle_points(make_params(10, 2, 0.4999)).x_L - 0.5) < 1e-3);
    CHECK(saddle_points(make_params(10, 2, 0.5)).x_L == 0.5);
    CHECK_THROWS_AS(saddle_points(make_params(10, 2, 0.7)), PhaseError);
}

TEST_CASE("residual entropy") {
    auto p = make_params(10, 2, 0.3);
    CHECK(residual_entropy(p, InitialKind::one_mixed) == doctest::Approx(0.268264).epsilon(1e-6));
    CHECK(residual_entropy(p, [](double x) { return 1.0 - x / 2.0; }) == doctest::Approx(0.268264).epsilon(1e-6));
    CHECK(residual_entropy(make_params(10, 2, 1e-9), InitialKind::one_mixed) == doctest::Approx(std::log(2.0)).epsilon(1e-6));
    CHECK(residual_entropy(p, InitialKind::pure) == 0.0);
    for (int d : {2, 3}) {
        const double ac = critical_alpha(d);
        const double delta = 1e-3;
        const double near = residual_entropy(make_params(10, d, ac - delta), InitialKind::one_mixed);
        CHECK(near == doctest::Approx(4.0 / (d + 1) * delta).epsilon(1e-2));
    }
}

TEST_CASE("cusp slope, smooth curvature and harmonic gap") {
    CHECK(cusp_slope(make_params(10, 2, 0.2)) == doctest::Approx(0.356675).epsilon(1e-6));
    CHECK_THROWS_AS(cusp_slope(make_params(10, 2, 0.7)), PhaseError);
    CHECK_THROWS_AS(curvature_smooth(make_params(10, 2, 0.3)), PhaseError);
    for (double alpha : {0.51, 0.7, 1.2}) {
        auto p = make_params(10, 2, alpha);
        CHECK(std::abs(curvature_smooth(p) + u_infinity(riccati_coefficients(p))) < 1e-9);
    }
    CHECK(curvature_smooth(make_params(10, 2, 0.7)) == doctest::Approx(-0.440184).epsilon(1e-6));
    CHECK(harmonic_gap(make_params(10, 2, 1.0)) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-12));

    auto obs = critical_observables(make_params(10, 2, 0.3));
    CHECK(obs.x_L == doctest::Approx(0.3));
    CHECK(obs.residual_entropy == doctest::Approx(0.268264).epsilon(1e-6));
    CHECK_FALSE(obs.curvature_smooth.has_value());
}
