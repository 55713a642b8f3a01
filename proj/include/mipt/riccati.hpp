// riccati.hpp — dynamics of the cusp curvature u(t) = -d^2 s/dx^2 at x = 1/2:
//
//     u' / J = a~ (u - u~)^2 + b~,   u(0) = 0,
//
// with a~ = alpha + 1/2, b~ = (2d^2+2)/d - (2e^2+2)/e, e = 1 + 2 alpha, and
// u~ = 4 alpha / e. For b~ > 0 (alpha < alpha_c) the solution is a shifted
// tangent that blows up at t_c; for b~ < 0 it relaxes to u~ - sqrt(|b~|/a~).

#pragma once

#include "mipt/largen.hpp"
#include "mipt/model.hpp"

#include <optional>
#include <vector>

namespace mipt {

struct RiccatiCoefficients {
    double a_tilde{0.5};
    double b_tilde{0.0};
    double u_tilde{0.0};
    double t0{0.0};             // units of 1/J
    std::optional<double> t_c;  // present iff phase == cusp
    Phase phase{Phase::cusp};
    double coupling{1.0};
};

RiccatiCoefficients riccati_coefficients(const ModelParams& params);

/// Closed-form u(t). DivergedError for t >= t_c in the cusp phase;
/// ParameterError for t < 0.
double analytic_u(double t, const RiccatiCoefficients& coeffs);

/// lim u(t) for t -> infinity: u~ - sqrt(|b~|/a~) (smooth), u~ (critical);
/// PhaseError in the cusp phase.
double u_infinity(const RiccatiCoefficients& coeffs);

inline constexpr double riccati_u_cap = 1e6;

struct RiccatiSeries {
    std::vector<double> times;
    std::vector<double> u;
    bool diverged{false};
    std::optional<double> t_cap;        // first time with u > u_cap
    std::optional<double> t_c_estimate; // 1/u extrapolated to zero
};

/// RK4 from u(0) = 0 with nominal step dt; near a pole the step shrinks in
/// proportion to 1/|u - u~| so the blow-up is resolved. Stops at t_max or
/// when u exceeds u_cap, in which case t_c is estimated by a linear fit of
/// 1/u against t over the last decade below the cap.
RiccatiSeries integrate_u(const ModelParams& params, double t_max, double dt,
                          double u_cap = riccati_u_cap);

} // namespace mipt
