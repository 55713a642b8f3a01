#include "mipt/riccati.hpp"

#include "mipt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mipt {

RiccatiCoefficients riccati_coefficients(const ModelParams& params) {
    params.validate();
    const double d = params.local_dim;
    const double alpha = params.meas_ratio;
    const double J = params.coupling;
    const double e = 1.0 + 2.0 * alpha;

    RiccatiCoefficients c;
    c.coupling = J;
    c.phase = phase_of(params);
    c.a_tilde = alpha + 0.5;
    c.u_tilde = 4.0 * alpha / e;
    // b~ vanishes identically at alpha_c; avoid a rounding-level residue there.
    c.b_tilde = c.phase == Phase::critical ? 0.0 : (2.0 * d * d + 2.0) / d - (2.0 * e * e + 2.0) / e;

    const double a = c.a_tilde;
    switch (c.phase) {
    case Phase::cusp: {
        const double w = J * std::sqrt(a * c.b_tilde);
        c.t0 = std::atan(std::sqrt(a / c.b_tilde) * c.u_tilde) / w;
        c.t_c = c.t0 + std::numbers::pi / (2.0 * w);
        break;
    }
    case Phase::smooth: {
        const double bb = std::abs(c.b_tilde);
        const double z = c.u_tilde * std::sqrt(a / bb); // > 1 for every alpha > alpha_c
        c.t0 = -0.5 * std::log((z + 1.0) / (z - 1.0)) / (J * std::sqrt(a * bb));
        break;
    }
    case Phase::critical:
        c.t0 = 0.0;
        break;
    }
    return c;
}

double analytic_u(double t, const RiccatiCoefficients& c) {
    if (!(t >= 0.0)) throw ParameterError("analytic_u: t must be >= 0");
    const double J = c.coupling;
    const double a = c.a_tilde;
    switch (c.phase) {
    case Phase::cusp: {
        if (t >= *c.t_c) {
            throw DivergedError("analytic_u: t = " + std::to_string(t) + " is at or beyond t_c = " +
                                std::to_string(*c.t_c));
        }
        const double w = J * std::sqrt(a * c.b_tilde);
        return std::sqrt(c.b_tilde / a) * std::tan(w * (t - c.t0)) + c.u_tilde;
    }
    case Phase::smooth: {
        if (t == 0.0) return 0.0;
        const double bb = std::abs(c.b_tilde);
        const double w = J * std::sqrt(a * bb);
        return -std::sqrt(bb / a) / std::tanh(w * (t - c.t0)) + c.u_tilde;
    }
    case Phase::critical: {
        const double k = J * a * c.u_tilde * t;
        return c.u_tilde * k / (1.0 + k);
    }
    }
    return 0.0;
}

double u_infinity(const RiccatiCoefficients& c) {
    switch (c.phase) {
    case Phase::cusp: throw PhaseError("u(t) diverges at t_c for alpha < alpha_c");
    case Phase::smooth: return c.u_tilde - std::sqrt(std::abs(c.b_tilde) / c.a_tilde);
    case Phase::critical: return c.u_tilde;
    }
    return 0.0;
}

RiccatiSeries integrate_u(const ModelParams& params, double t_max, double dt, double u_cap) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("integrate_u: dt must be > 0");
    if (!(t_max >= 0.0)) throw ParameterError("integrate_u: t_max must be >= 0");
    const RiccatiCoefficients c = riccati_coefficients(params);
    const double J = c.coupling;
    const auto rhs = [&](double u) { return J * (c.a_tilde * (u - c.u_tilde) * (u - c.u_tilde) + c.b_tilde); };

    RiccatiSeries s;
    double t = 0.0;
    double u = 0.0;
    s.times.push_back(t);
    s.u.push_back(u);
    constexpr double pole_fraction = 0.02;
    while (t < t_max) {
        const double scale = J * c.a_tilde * std::abs(u - c.u_tilde);
        double h = std::min(dt, t_max - t);
        if (scale > 0.0) h = std::min(h, pole_fraction / scale);
        const double k1 = rhs(u);
        const double k2 = rhs(u + 0.5 * h * k1);
        const double k3 = rhs(u + 0.5 * h * k2);
        const double k4 = rhs(u + h * k3);
        u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = (t_max - t <= h) ? t_max : t + h;
        s.times.push_back(t);
        s.u.push_back(u);
        if (!std::isfinite(u) || u > u_cap) {
            s.diverged = true;
            s.t_cap = t;
            break;
        }
    }

    if (s.diverged) {
        // Least-squares line 1/u = p + q t over points with u in [u_cap/10, u_cap].
        // Times are taken relative to t_cap: the window is very narrow.
        const double t_ref = *s.t_cap;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int count = 0;
        for (std::size_t i = 0; i + 1 < s.u.size(); ++i) {
            if (s.u[i] >= 0.1 * u_cap && s.u[i] <= u_cap) {
                const double x = s.times[i] - t_ref;
                const double y = 1.0 / s.u[i];
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                ++count;
            }
        }
        if (count >= 2) {
            const double denom = count * sxx - sx * sx;
            const double q = (count * sxy - sx * sy) / denom;
            const double p = (sy - q * sx) / count;
            if (q < 0.0) s.t_c_estimate = t_ref - p / q;
        }
        if (!s.t_c_estimate) s.t_c_estimate = *s.t_cap;
    }
    return s;
}

} // namespace mipt
