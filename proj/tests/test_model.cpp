#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mipt/errors.hpp"
#include "mipt/model.hpp"
#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <random>

using namespace mipt;

TEST_CASE("generator matches hand-computed rates") {
    auto g = build_generator(make_params(2, 2, 0.5));
    CHECK(g.diag[1] == doctest::Approx(-6.25).epsilon(1e-15));
    CHECK(g.upper[1] == doctest::Approx(1.0));
    CHECK(g.lower[1] == doctest::Approx(1.0)); // c_0

    auto g4 = build_generator(make_params(4, 2, 0.25));
    CHECK(g4.diag[2] == doctest::Approx(-7.5));
    CHECK(g4.upper[2] == doctest::Approx(1.5));
    CHECK(g4.lower[2] == doctest::Approx(1.5)); // c_1
}

TEST_CASE("generator agrees with the dense oracle") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int N = 2 + int(rng() % 60);
        const int d = 2 + int(rng() % 4);
        const double alpha = ua(rng);
        auto g = build_generator(make_params(N, d, alpha));
        auto m = oracle::dense_generator(N, d, alpha);
        for (int n = 0; n <= N; ++n) {
            CHECK(g.diag[n] == doctest::Approx(m(n, n)).epsilon(1e-14));
            if (n < N) CHECK(g.upper[n] == doctest::Approx(m(n, n + 1)).epsilon(1e-14));
            if (n > 0) CHECK(g.lower[n] == doctest::Approx(m(n, n - 1)).epsilon(1e-14));
        }
        CHECK(g.upper[N] == 0.0);
        CHECK(g.lower[0] == 0.0);

        Eigen::VectorXd v = Eigen::VectorXd::Random(N + 1);
        std::vector<double> vv(v.data(), v.data() + v.size());
        auto out = g.apply(vv);
        Eigen::VectorXd ref = m * v;
        for (int n = 0; n <= N; ++n) CHECK(out[n] == doctest::Approx(ref[n]).epsilon(1e-12));
    }
}

TEST_CASE("reflection covariance and sign structure") {
    for (double alpha : {0.0, 0.1, 0.5, 1.3}) {
        for (int N : {2, 7, 40}) {
            auto g = build_generator(make_params(N, 3, alpha));
            for (int n = 0; n <= N; ++n) {
                CHECK(g.diag[n] == g.diag[N - n]);
                CHECK(g.upper[n] == doctest::Approx(g.lower[N - n]).epsilon(1e-15));
                if (alpha > 0) {
                    CHECK(g.diag[n] < 0.0);
                    if (n < N) CHECK(g.upper[n] > 0.0);
                    if (n > 0) CHECK(g.lower[n] > 0.0);
                }
            }
        }
    }
}

TEST_CASE("unitary-only boundaries conserve purity") {
    auto g = build_generator(make_params(12, 2, 0.0));
    CHECK(g.diag[0] == 0.0);
    CHECK(g.upper[0] == 0.0);
    CHECK(g.diag[12] == 0.0);
    CHECK(g.lower[12] == 0.0);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(make_params(1, 2, 0.3), ParameterError);
    CHECK_THROWS_AS(make_params(4, 1, 0.3), ParameterError);
    CHECK_THROWS_AS(make_params(4, 2, -0.1), ParameterError);
    CHECK_THROWS_AS(make_params(4, 2, std::numeric_limits<double>::quiet_NaN()), ParameterError);
    CHECK_THROWS_AS(make_params(4, 2, 0.3, 0.0), ParameterError);
    CHECK_THROWS_AS(make_params(4, 2, 0.3, -1.0), ParameterError);
    CHECK(make_params(4, 3, 0.3).critical_alpha() == 1.0);
}

TEST_CASE("initial purity profiles") {
    auto p = make_params(4, 2, 0.3);
    auto pure = initial_purity(InitialKind::pure, p);
    for (double v : pure.values) CHECK(v == 1.0);

    auto one = initial_purity(InitialKind::one_mixed, p);
    CHECK(one.values[0] == 1.0);
    CHECK(one.values[2] == doctest::Approx(0.75));
    CHECK(one.values[4] == doctest::Approx(0.5));

    auto mx = initial_purity(InitialKind::max_mixed, p);
    CHECK(mx.values[3] == doctest::Approx(0.125));

    auto r = reflect(one);
    CHECK(r.values[0] == doctest::Approx(0.5));
    CHECK(r.values[4] == 1.0);

    CHECK(parse_initial_kind("one-mixed") == InitialKind::one_mixed);
    CHECK(to_string(InitialKind::max_mixed) == "max_mixed");
    CHECK_THROWS_AS(parse_initial_kind("thermal"), ParameterError);
}

TEST_CASE("renormalisation preserves log purities") {
    auto p = initial_purity(InitialKind::max_mixed, make_params(10, 3, 0.2));
    for (double& v : p.values) v *= 1e-200;
    std::vector<double> before;
    for (std::size_t n = 0; n < p.values.size(); ++n) before.push_back(p.log_purity(n));
    p.renormalize();
    CHECK(p.values[0] == 1.0);
    for (std::size_t n = 0; n < p.values.size(); ++n)
        CHECK(p.log_purity(n) == doctest::Approx(before[n]).epsilon(1e-14));
}
