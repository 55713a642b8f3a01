#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mipt/errors.hpp"
#include "mipt/largen.hpp"
#include "mipt/spectral.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

using namespace mipt;

namespace {

struct Setup {
    ModelParams params;
    TridiagonalGenerator gen;
    SimilarityWeights weights;
    SymmetricTridiagonal h;
};

Setup setup(int N, int d, double alpha, double J = 1.0) {
    Setup s;
    s.params = make_params(N, d, alpha, J);
    s.gen = build_generator(s.params);
    s.weights = similarity_weights(s.gen);
    s.h = hermitianize(s.gen, s.params);
    return s;
}

} // namespace

TEST_CASE("similarity weights on small chains") {
    auto w = similarity_weights(build_generator(make_params(3, 2, 0.5)));
    CHECK(w.log_lambda[0] == 0.0);
    CHECK(std::exp(w.log_lambda[1]) == doctest::Approx(0.881917).epsilon(1e-6));

    auto w2 = similarity_weights(build_generator(make_params(2, 2, 0.5)));
    CHECK(w2.log_lambda[1] == doctest::Approx(0.0));
    CHECK(w2.log_lambda[2] == doctest::Approx(0.0));

    CHECK_THROWS_AS(similarity_weights(build_generator(make_params(6, 2, 0.0))), DegenerateSimilarity);
    auto p0 = make_params(6, 2, 0.0);
    CHECK_THROWS_AS(hermitianize(build_generator(p0), p0), DegenerateSimilarity);
}

TEST_CASE("hermitianized matrix on a two-site chain") {
    auto s = setup(2, 2, 0.5);
    CHECK(s.h.diag[1] == doctest::Approx(6.25));
    CHECK(s.h.offdiag[0] == doctest::Approx(-1.0));
    CHECK(s.h.offdiag[1] == doctest::Approx(-1.0));
}

TEST_CASE("similarity identity holds entrywise") {
    // H = S^{-1} (-J M) S with S = diag(Lambda); entries compared in log-safe form.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ua(0.05, 1.5), uj(0.3, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
        const int N = 2 + int(rng() % 199);
        const int d = 2 + int(rng() % 3);
        auto s = setup(N, d, ua(rng), uj(rng));
        const double J = s.params.coupling;
        auto m = oracle::dense_generator(N, d, s.params.meas_ratio);
        const auto& ll = s.weights.log_lambda;
        double worst = 0.0;
        for (int n = 0; n <= N; ++n) {
            worst = std::max(worst, std::abs(-J * m(n, n) - s.h.diag[n]) / std::abs(s.h.diag[n]));
            if (n < N) {
                const double up = -J * m(n, n + 1) * std::exp(ll[n + 1] - ll[n]);
                const double lo = -J * m(n + 1, n) * std::exp(ll[n] - ll[n + 1]);
                worst = std::max(worst, std::abs(up - s.h.offdiag[n]) / std::abs(s.h.offdiag[n]));
                worst = std::max(worst, std::abs(lo - s.h.offdiag[n]) / std::abs(s.h.offdiag[n]));
            }
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("spectrum of H equals J times the spectrum of -M") {
    auto s = setup(30, 3, 0.4, 1.7);
    auto m = oracle::dense_generator(30, 3, 0.4);
    Eigen::EigenSolver<Eigen::MatrixXd> es(-1.7 * m);
    std::vector<double> ref;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        CHECK(std::abs(es.eigenvalues()[i].imag()) < 1e-8);
        ref.push_back(es.eigenvalues()[i].real());
    }
    std::sort(ref.begin(), ref.end());
    auto dec = eigendecompose(s.h);
    for (std::size_t k = 0; k < ref.size(); ++k)
        CHECK(dec.energies[k] == doctest::Approx(ref[k]).epsilon(1e-9));
}

TEST_CASE("decomposition against a dense symmetric solver") {
    auto s = setup(100, 2, 0.7);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(s.h.dense());
    for (auto method : {EigenMethod::ql, EigenMethod::bisection}) {
        auto dec = eigendecompose(s.h, method);
        const double scale = s.h.norm_inf();
        for (std::size_t k = 0; k < dec.size(); ++k) {
            CHECK(std::abs(dec.energies[k] - ref.eigenvalues()[k]) < 1e-12 * scale);
            Eigen::VectorXd v = dec.vectors.col(k);
            CHECK((s.h.apply(v) - dec.energies[k] * v).norm() < 1e-10 * scale);
        }
        const auto m = dec.vectors.cols();
        CHECK((dec.vectors.transpose() * dec.vectors - Eigen::MatrixXd::Identity(m, m)).norm() < 1e-10);
        CHECK(std::abs(gap(dec) - (ref.eigenvalues()[1] - ref.eigenvalues()[0])) < 1e-9);
        CHECK(dec.vectors.col(0).minCoeff() > 0.0);
    }
}

TEST_CASE("low modes agree with the full decomposition") {
    for (int N : {60, 61}) {
        auto s = setup(N, 2, 0.4);
        auto dec = eigendecompose(s.h, EigenMethod::ql);
        auto lm = low_modes(s.h);
        CHECK(lm.e0 == doctest::Approx(dec.energies[0]).epsilon(1e-12));
        CHECK(lm.e1 == doctest::Approx(dec.energies[1]).epsilon(1e-12));
        Eigen::VectorXd p0 = lm.phi0.to_dense(), p1 = lm.phi1.to_dense();
        CHECK(std::abs(std::abs(p0.dot(dec.vectors.col(0))) - 1.0) < 1e-9);
        CHECK(std::abs(std::abs(p1.dot(dec.vectors.col(1))) - 1.0) < 1e-9);
        for (int n = 0; n <= N; ++n) {
            CHECK(p0[n] == doctest::Approx(p0[N - n]).epsilon(1e-9));
            CHECK(p1[n] == doctest::Approx(-p1[N - n]).epsilon(1e-9));
        }
    }
}

TEST_CASE("projection of an eigenmode yields a unit coefficient") {
    auto s = setup(10, 2, 0.6);
    auto dec = eigendecompose(s.h);
    PurityVector p;
    p.values.resize(11);
    for (int n = 0; n <= 10; ++n) p.values[n] = std::exp(s.weights.log_lambda[n]) * dec.vectors(n, 0);
    project_initial(dec, s.weights, p);
    CHECK(dec.eta(0) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t a = 1; a < dec.size(); ++a) CHECK(std::abs(dec.eta(a)) < 1e-12);
}

TEST_CASE("spectral propagation matches the dense matrix exponential") {
    auto s = setup(40, 2, 0.4, 1.3);
    auto m = oracle::dense_generator(40, 2, 0.4);
    auto p0 = initial_purity(InitialKind::one_mixed, s.params);
    auto dec = eigendecompose(s.h);
    project_initial(dec, s.weights, p0);

    auto at0 = propagate(dec, s.weights, 0.0);
    for (int n = 0; n <= 40; ++n) CHECK(at0.log_purity(n) == doctest::Approx(std::log(p0.values[n])).epsilon(1e-10));

    Eigen::VectorXd v0 = Eigen::Map<Eigen::VectorXd>(p0.values.data(), 41);
    for (double t : {0.05, 0.5, 2.0}) {
        auto ref = oracle::dense_propagate(m, 1.3, t, v0);
        auto got = propagate(dec, s.weights, t);
        for (int n = 0; n <= 40; ++n)
            CHECK(got.log_purity(n) == doctest::Approx(std::log(ref[n])).epsilon(1e-9));
    }
}

TEST_CASE("semigroup property and reflection symmetry") {
    auto s = setup(80, 2, 0.45);
    auto p0 = initial_purity(InitialKind::pure, s.params);
    auto dec = eigendecompose(s.h);
    project_initial(dec, s.weights, p0);
    auto direct = propagate(dec, s.weights, 3.0);

    auto mid = propagate(dec, s.weights, 1.2);
    auto dec2 = dec;
    project_initial(dec2, s.weights, mid);
    auto twostep = propagate(dec2, s.weights, 1.8);
    for (int n = 0; n <= 80; ++n) {
        const double a = direct.log_purity(n) - direct.log_purity(0);
        const double b = twostep.log_purity(n) - twostep.log_purity(0);
        CHECK(std::abs(a - b) < 1e-9);
        CHECK(std::abs(a - (direct.log_purity(80 - n) - direct.log_purity(0))) < 1e-9);
    }
}

TEST_CASE("long-time state forgets the initial condition in the smooth phase") {
    auto s = setup(60, 2, 0.8);
    auto dec = eigendecompose(s.h);
    auto a = dec, b = dec;
    project_initial(a, s.weights, initial_purity(InitialKind::pure, s.params));
    project_initial(b, s.weights, initial_purity(InitialKind::max_mixed, s.params));
    auto sa = stationary_entropy(a, s.weights, s.params);
    auto sb = stationary_entropy(b, s.weights, s.params);
    for (std::size_t n = 0; n < sa.size(); ++n) CHECK(std::abs(sa[n] - sb[n]) < 1e-12);
}

TEST_CASE("stationary entropy of pure initial states closes at the boundary") {
    auto s = setup(200, 2, 0.3);
    auto lm = low_modes(s.h);
    project_low_modes(lm, s.weights, initial_purity(InitialKind::pure, s.params));
    auto sinf = stationary_entropy(lm, s.weights, s.params);
    CHECK(sinf.front() == 0.0);
    CHECK(std::abs(sinf.back()) < 1e-9);
}

TEST_CASE("low-mode and full stationary entropies coincide") {
    auto s = setup(120, 2, 0.35);
    auto p0 = initial_purity(InitialKind::one_mixed, s.params);
    auto lm = low_modes(s.h);
    project_low_modes(lm, s.weights, p0);
    auto dec = eigendecompose(s.h);
    project_initial(dec, s.weights, p0);
    for (double tw : {-1.0, 7.0, std::numeric_limits<double>::infinity()}) {
        auto a = stationary_entropy(lm, s.weights, s.params, tw);
        auto b = stationary_entropy(dec, s.weights, s.params, tw);
        for (std::size_t n = 0; n < a.size(); ++n) CHECK(std::abs(a[n] - b[n]) < 1e-9);
    }
}

TEST_CASE("left/right amplitude ratio tracks the initial profile at the saddle points") {
    auto s = setup(200, 2, 0.3);
    auto lm = low_modes(s.h);
    project_low_modes(lm, s.weights, initial_purity(InitialKind::one_mixed, s.params));
    auto sp = saddle_points(s.params);
    auto profile = [](double x) { return (1.0 - x) + x / 2.0; };
    const double expected = profile(sp.x_L) / profile(sp.x_R);
    CHECK(std::abs(eta_left_right_ratio(lm) / expected - 1.0) < 0.02);
}

TEST_CASE("gap closes exponentially in the cusp phase and saturates in the smooth phase") {
    double prev = 1e300;
    for (int N : {40, 80, 160}) {
        const double g = low_modes(setup(N, 2, 0.3).h).gap();
        CHECK(g < prev);
        prev = g;
    }
    CHECK(prev < 1e-6);

    // Richardson extrapolation of the finite-size gap towards the harmonic value.
    const double g1 = low_modes(setup(800, 2, 1.0).h).gap();
    const double g2 = low_modes(setup(1600, 2, 1.0).h).gap();
    CHECK(std::abs((2.0 * g2 - g1) - harmonic_gap(make_params(4, 2, 1.0))) < 1e-4);
}
