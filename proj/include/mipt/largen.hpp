// largen.hpp — large-N continuum theory of the purity dynamics.
//
// With x = n/N the symmetrized generator becomes a one-dimensional
// tight-binding problem with (in units of J)
//
//     tau(x) = sqrt(x(1-x)(1-x+alpha)(x+alpha))
//     V(x)   = d(d+1-1/d) alpha + (d+1/d) x(1-x) - 2 tau(x)
//
// and the long-time entropy density is s(x) = D(x) + min{A_L(x), A_R(x)},
// where D comes from the similarity transform and A_L/A_R are the WKB
// actions of the wavepackets localized in the left/right potential wells.

#pragma once

#include "mipt/model.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace mipt {

enum class Phase { cusp, smooth, critical };

/// cusp for alpha < (d-1)/2, critical at equality, smooth above.
Phase phase_of(const ModelParams& params) noexcept;
std::string_view to_string(Phase phase) noexcept;

// --- continuum functions (std::domain_error for x outside [0, 1]) ---

double hopping(double x, const ModelParams& params);
double potential(double x, const ModelParams& params);

/// Closed form of D(x) = (1/2) int_0^x log[b(y)/c(y)] dy with the
/// convention 0 log 0 = 0; identically 0 at alpha = 0.
double dfunc(double x, const ModelParams& params);

/// dD/dx = (1/2) log[((1-x)(x+alpha)) / (x(1-x+alpha))].
double dfunc_derivative(double x, const ModelParams& params);

/// D(x) by adaptive quadrature of its derivative (reference implementation).
double dfunc_quadrature(double x, const ModelParams& params, double abs_tol = 1e-12);

struct GroundEnergy {
    double epsilon0{0.0}; // min_x V(x), units of J
    double x_V_left{0.5}; // left minimum of V; 1/2 in the smooth phase
    Phase phase{Phase::cusp};
};

GroundEnergy ground_energy(const ModelParams& params);

/// Local WKB momentum dA_L/dx = 2 sign(x - x_V) arcsinh sqrt((V - eps0) / (4 tau)).
double action_left_derivative(double x, const ModelParams& params);

/// A_L(x) = int_0^x dA_L/dx' dx' (gauge A_L(0) = 0), absolute tolerance abs_tol.
double action_left(double x, const ModelParams& params, double abs_tol = 1e-10);
double action_right(double x, const ModelParams& params, double abs_tol = 1e-10);

/// A_L on an ascending grid by accumulating integrals between neighbours.
std::vector<double> action_left_grid(const std::vector<double>& xs, const ModelParams& params,
                                     double abs_tol = 1e-10);

/// V(x) - 4 tau(x) sinh^2(p/2) - eps0 with p = dA_L/dx; zero by construction.
double hamilton_jacobi_residual(double x, const ModelParams& params);

struct CriticalObservables {
    double alpha_c{0.5};
    double epsilon0{0.0};
    double x_V_left{0.5};
    double x_L{0.5};
    double residual_entropy{0.0}; // for the one-qudit-mixed initial state
    double cusp_slope{0.0};
    std::optional<double> curvature_smooth;
    Phase phase{Phase::cusp};
};

struct ContinuumProfile {
    std::vector<double> x;
    std::vector<double> V;
    std::vector<double> tau;
    std::vector<double> D;
    std::vector<double> A_L;
    std::vector<double> A_R;
    std::vector<double> s_inf;
    CriticalObservables observables;
};

/// Evaluates every profile on a uniform grid of grid_points points on [0, 1].
/// The entropy density is the same for pure and one-qudit-mixed initial
/// states (their difference is O(1/N)); max_mixed is rejected.
ContinuumProfile stationary_entropy_curve(const ModelParams& params, InitialKind init,
                                          int grid_points = 1001);

/// s_inf(x) = D(x) + A_L(x) for x <= 1/2, D(x) + A_R(x) otherwise.
double stationary_entropy_at(double x, const ModelParams& params);

struct SaddlePoints {
    double x_L{0.5};
    double x_R{0.5};
};

/// Root of d(A_L - D)/dx on (x_V, 1/2) by bisection; verified against
/// alpha/(d-1) to 1e-6 (NumericalFailure otherwise). PhaseError in the smooth phase.
SaddlePoints saddle_points(const ModelParams& params);

/// log(P(x_L,0) / P(x_R,0)); 0 outside the cusp phase.
double residual_entropy(const ModelParams& params, const std::function<double(double)>& initial_profile);
double residual_entropy(const ModelParams& params, InitialKind init);

/// log(d / (1 + 2 alpha)); PhaseError for alpha > alpha_c.
double cusp_slope(const ModelParams& params);

/// d^2 s/dx^2 at x = 1/2 in the smooth phase; PhaseError for alpha <= alpha_c.
double curvature_smooth(const ModelParams& params);

double critical_alpha(int local_dim);

/// Harmonic estimate of the N -> infinity gap in the smooth phase,
/// J sqrt(2 tau(1/2) V''(1/2)); PhaseError for alpha <= alpha_c.
double harmonic_gap(const ModelParams& params);

CriticalObservables critical_observables(const ModelParams& params);

} // namespace mipt
