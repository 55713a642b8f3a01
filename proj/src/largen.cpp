#include "mipt/largen.hpp"

#include "mipt/errors.hpp"
#include "mipt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mipt {

namespace {

void check_unit_interval(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error(std::string(what) + ": x = " + std::to_string(x) + " outside [0, 1]");
    }
}

double xlogx(double x) { return x <= 0.0 ? 0.0 : x * std::log(x); }

// tau in units of J
double tau_unit(double x, double alpha) {
    const double f = x * (1.0 - x) * (1.0 - x + alpha) * (x + alpha);
    return f > 0.0 ? std::sqrt(f) : 0.0;
}

double v_unit(double x, double d, double alpha) {
    return d * (d + 1.0 - 1.0 / d) * alpha + (d + 1.0 / d) * x * (1.0 - x) - 2.0 * tau_unit(x, alpha);
}

struct WellData {
    double eps0;
    double x_v;
};

WellData well(const ModelParams& params) {
    const GroundEnergy g = ground_energy(params);
    return {g.epsilon0 / params.coupling, g.x_V_left};
}

double momentum(double x, double d, double alpha, const WellData& w) {
    const double t = tau_unit(x, alpha);
    if (t == 0.0 || x == w.x_v) return 0.0;
    const double excess = std::max(v_unit(x, d, alpha) - w.eps0, 0.0);
    const double p = 2.0 * std::asinh(std::sqrt(excess / (4.0 * t)));
    return x < w.x_v ? -p : p;
}

// int_a^b of the momentum, a <= b, split at x_V; endpoint singularities at 0 and 1.
double action_segment(double a, double b, double d, double alpha, const WellData& w, double tol) {
    if (a == b) return 0.0;
    const auto f = [&](double y) { return momentum(y, d, alpha, w); };
    if (a < w.x_v && w.x_v < b) {
        return integrate_endpoint_singular(f, a, w.x_v, 0.5 * tol).value +
               integrate_endpoint_singular(f, w.x_v, b, 0.5 * tol).value;
    }
    return integrate_endpoint_singular(f, a, b, tol).value;
}

} // namespace

Phase phase_of(const ModelParams& params) noexcept {
    const double ac = params.critical_alpha();
    if (params.meas_ratio < ac) return Phase::cusp;
    if (params.meas_ratio > ac) return Phase::smooth;
    return Phase::critical;
}

std::string_view to_string(Phase phase) noexcept {
    switch (phase) {
    case Phase::cusp: return "cusp";
    case Phase::smooth: return "smooth";
    case Phase::critical: return "critical";
    }
    return "cusp";
}

double critical_alpha(int local_dim) {
    if (local_dim < 2) throw ParameterError("local_dim d must be >= 2");
    return 0.5 * (local_dim - 1);
}

// --- continuum functions ---

double hopping(double x, const ModelParams& params) {
    check_unit_interval(x, "hopping");
    return params.coupling * tau_unit(x, params.meas_ratio);
}

double potential(double x, const ModelParams& params) {
    check_unit_interval(x, "potential");
    return params.coupling * v_unit(x, params.local_dim, params.meas_ratio);
}

double dfunc(double x, const ModelParams& params) {
    check_unit_interval(x, "dfunc");
    const double a = params.meas_ratio;
    if (a == 0.0 || x == 0.0 || x == 1.0) return 0.0;
    return -0.5 * (xlogx(x) + xlogx(1.0 - x) + xlogx(a) + xlogx(a + 1.0) - xlogx(a + 1.0 - x) -
                   xlogx(a + x));
}

double dfunc_derivative(double x, const ModelParams& params) {
    check_unit_interval(x, "dfunc_derivative");
    const double a = params.meas_ratio;
    if (a == 0.0) return 0.0;
    return 0.5 * (std::log((1.0 - x) * (x + a)) - std::log(x * (1.0 - x + a)));
}

double dfunc_quadrature(double x, const ModelParams& params, double abs_tol) {
    check_unit_interval(x, "dfunc_quadrature");
    if (params.meas_ratio == 0.0 || x == 0.0) return 0.0;
    const auto f = [&](double y) { return dfunc_derivative(y, params); };
    return integrate_endpoint_singular(f, 0.0, x, abs_tol).value;
}

GroundEnergy ground_energy(const ModelParams& params) {
    params.validate();
    const double d = params.local_dim;
    const double a = params.meas_ratio;
    GroundEnergy g;
    g.phase = phase_of(params);
    if (g.phase == Phase::cusp) {
        g.epsilon0 = a * (d * d + d - 1.0 - 1.0 / d - a / d);
        const double disc = 0.25 - (a * a + a) / (d * d - 1.0);
        g.x_V_left = 0.5 - std::sqrt(std::max(disc, 0.0));
    } else {
        g.epsilon0 = 0.25 * (d + 1.0 / d - 2.0) + a * (d * d + d - 2.0);
        g.x_V_left = 0.5;
    }
    g.epsilon0 *= params.coupling;
    return g;
}

// --- actions ---

double action_left_derivative(double x, const ModelParams& params) {
    check_unit_interval(x, "action_left_derivative");
    return momentum(x, params.local_dim, params.meas_ratio, well(params));
}

double action_left(double x, const ModelParams& params, double abs_tol) {
    check_unit_interval(x, "action_left");
    return action_segment(0.0, x, params.local_dim, params.meas_ratio, well(params), abs_tol);
}

double action_right(double x, const ModelParams& params, double abs_tol) {
    check_unit_interval(x, "action_right");
    return action_left(1.0 - x, params, abs_tol);
}

std::vector<double> action_left_grid(const std::vector<double>& xs, const ModelParams& params,
                                     double abs_tol) {
    const WellData w = well(params);
    std::vector<double> out(xs.size());
    double acc = 0.0;
    double prev = 0.0;
    const double per_segment = abs_tol / std::max<std::size_t>(xs.size(), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        check_unit_interval(xs[i], "action_left_grid");
        if (xs[i] < prev) throw ParameterError("action_left_grid: grid must be ascending");
        acc += action_segment(prev, xs[i], params.local_dim, params.meas_ratio, w, per_segment);
        out[i] = acc;
        prev = xs[i];
    }
    return out;
}

double hamilton_jacobi_residual(double x, const ModelParams& params) {
    check_unit_interval(x, "hamilton_jacobi_residual");
    const WellData w = well(params);
    const double p = momentum(x, params.local_dim, params.meas_ratio, w);
    const double t = tau_unit(x, params.meas_ratio);
    const double sh = std::sinh(0.5 * p);
    return params.coupling * (v_unit(x, params.local_dim, params.meas_ratio) - 4.0 * t * sh * sh - w.eps0);
}

// --- stationary curve ---

double stationary_entropy_at(double x, const ModelParams& params) {
    check_unit_interval(x, "stationary_entropy_at");
    const double a = x <= 0.5 ? action_left(x, params) : action_right(x, params);
    return dfunc(x, params) + a;
}

ContinuumProfile stationary_entropy_curve(const ModelParams& params, InitialKind init, int grid_points) {
    params.validate();
    if (params.meas_ratio <= 0.0) throw ParameterError("stationary_entropy_curve requires alpha > 0");
    if (grid_points < 2) throw ParameterError("grid_points must be >= 2");
    if (init == InitialKind::max_mixed) {
        throw ParameterError("stationary_entropy_curve: initial profile must be O(1) (pure or one_mixed)");
    }
    ContinuumProfile prof;
    const auto m = static_cast<std::size_t>(grid_points);
    prof.x.resize(m);
    for (std::size_t i = 0; i < m; ++i) prof.x[i] = static_cast<double>(i) / static_cast<double>(m - 1);
    prof.x.back() = 1.0;

    prof.A_L = action_left_grid(prof.x, params);
    prof.A_R.resize(m);
    prof.V.resize(m);
    prof.tau.resize(m);
    prof.D.resize(m);
    prof.s_inf.resize(m);
    // The grid is symmetric, so A_R(x_i) = A_L(1 - x_i) = A_L(x_{m-1-i}).
    for (std::size_t i = 0; i < m; ++i) {
        prof.A_R[i] = prof.A_L[m - 1 - i];
        prof.V[i] = potential(prof.x[i], params);
        prof.tau[i] = hopping(prof.x[i], params);
        prof.D[i] = dfunc(prof.x[i], params);
        const bool left = 2 * i <= m - 1;
        prof.s_inf[i] = prof.D[i] + (left ? prof.A_L[i] : prof.A_R[i]);
    }
    prof.observables = critical_observables(params);
    return prof;
}

// --- saddle points and closed forms ---

SaddlePoints saddle_points(const ModelParams& params) {
    params.validate();
    const Phase ph = phase_of(params);
    if (ph == Phase::smooth) throw PhaseError("saddle points exist only for alpha <= alpha_c");
    if (ph == Phase::critical) return {0.5, 0.5};
    const double d = params.local_dim;
    const double alpha = params.meas_ratio;
    const WellData w = well(params);
    const auto g = [&](double x) {
        return momentum(x, d, alpha, w) + 0.5 * (std::log(x * (1.0 - x) + alpha * x) -
                                                 std::log(x * (1.0 - x) + alpha * (1.0 - x)));
    };
    double lo = w.x_v;
    double hi = 0.5;
    if (alpha > 0.0) {
        const double glo = g(std::max(lo, 1e-300));
        const double ghi = g(hi);
        if (!(glo < 0.0 && ghi > 0.0)) {
            throw NumericalFailure("saddle_points: root not bracketed on (x_V, 1/2)");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (g(mid) < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    } else {
        lo = hi = 0.0;
    }
    const double x_l = 0.5 * (lo + hi);
    const double exact = alpha / (d - 1.0);
    if (std::abs(x_l - exact) > 1e-6) {
        throw NumericalFailure("saddle_points: bisection root " + std::to_string(x_l) +
                               " disagrees with alpha/(d-1) = " + std::to_string(exact));
    }
    return {x_l, 1.0 - x_l};
}

double residual_entropy(const ModelParams& params, const std::function<double(double)>& initial_profile) {
    if (phase_of(params) != Phase::cusp) return 0.0;
    const SaddlePoints sp = saddle_points(params);
    const double pl = initial_profile(sp.x_L);
    const double pr = initial_profile(sp.x_R);
    if (!(pl > 0.0 && pr > 0.0)) throw ParameterError("residual_entropy: initial profile must be positive");
    return std::log(pl / pr);
}

double residual_entropy(const ModelParams& params, InitialKind init) {
    const double d = params.local_dim;
    switch (init) {
    case InitialKind::pure:
        return residual_entropy(params, [](double) { return 1.0; });
    case InitialKind::one_mixed:
        return residual_entropy(params, [d](double x) { return 1.0 - x + x / d; });
    case InitialKind::max_mixed:
        break;
    }
    throw ParameterError("residual_entropy: initial profile must be O(1) (pure or one_mixed)");
}

double cusp_slope(const ModelParams& params) {
    params.validate();
    if (phase_of(params) == Phase::smooth) throw PhaseError("cusp_slope requires alpha <= alpha_c");
    return std::log(params.local_dim / (1.0 + 2.0 * params.meas_ratio));
}

double curvature_smooth(const ModelParams& params) {
    params.validate();
    if (phase_of(params) != Phase::smooth) throw PhaseError("curvature_smooth requires alpha > alpha_c");
    const double d = params.local_dim;
    const double a = params.meas_ratio;
    const double e = 1.0 + 2.0 * a;
    return 2.0 * std::sqrt((2.0 * a - d + 1.0) * (2.0 * d * a + d - 1.0)) / (e * std::sqrt(d)) - 4.0 * a / e;
}

double harmonic_gap(const ModelParams& params) {
    params.validate();
    if (phase_of(params) != Phase::smooth) throw PhaseError("harmonic_gap requires alpha > alpha_c");
    const double d = params.local_dim;
    const double k = 0.5 + params.meas_ratio;
    const double v2 = 4.0 * k + 1.0 / k - 2.0 * (d + 1.0 / d); // V''(1/2) / J
    const double t = 0.5 * k;                                  // tau(1/2) / J
    return params.coupling * std::sqrt(2.0 * t * v2);
}

CriticalObservables critical_observables(const ModelParams& params) {
    params.validate();
    CriticalObservables obs;
    const GroundEnergy g = ground_energy(params);
    obs.alpha_c = params.critical_alpha();
    obs.epsilon0 = g.epsilon0;
    obs.x_V_left = g.x_V_left;
    obs.phase = g.phase;
    if (g.phase == Phase::smooth) {
        obs.x_L = 0.5;
        obs.residual_entropy = 0.0;
        obs.cusp_slope = 0.0;
        obs.curvature_smooth = curvature_smooth(params);
    } else {
        obs.x_L = saddle_points(params).x_L;
        obs.residual_entropy = residual_entropy(params, InitialKind::one_mixed);
        obs.cusp_slope = cusp_slope(params);
    }
    return obs;
}

} // namespace mipt
