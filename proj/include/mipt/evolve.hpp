// evolve.hpp — direct RK4 integration of the purity master equation,
// entropy-curve readout and the cusp curvature u(t) = -d^2 s/dx^2 at x = 1/2.

#pragma once

#include "mipt/model.hpp"

#include <vector>

namespace mipt {

/// Explicit RK4 is used with dt * J * max|a_n| <= this bound. The RK4
/// stability interval on the negative real axis is ~2.78; 0.5 keeps the
/// truncation error well below 1e-8 per unit time for the smooth modes.
inline constexpr double rk4_stability_bound = 0.5;

struct EvolveConfig {
    double dt{0.0};            // <= 0 selects the stability bound itself
    double t_max{0.0};
    int renorm_every{1};
    std::vector<double> record_times; // empty: record t_max only
    int fit_window{10};
};

/// Largest admissible step for this generator.
double max_stable_dt(const TridiagonalGenerator& gen, const ModelParams& params);

/// Resolves dt <= 0 to max_stable_dt and rejects steps above the bound
/// (ParameterError) or invalid t_max / renorm_every / fit_window.
EvolveConfig resolve_config(const TridiagonalGenerator& gen, const ModelParams& params, EvolveConfig cfg);

/// One classical RK4 step of dP/dt = J M P (no renormalization).
void rk4_step(const TridiagonalGenerator& gen, double coupling, PurityVector& p, double dt);

/// Steps p forward to time t_end, renormalizing every cfg.renorm_every
/// steps. The last step is shortened to land exactly on t_end.
/// Throws IntegrationFailure on a non-finite or non-positive state.
void advance(const TridiagonalGenerator& gen, const ModelParams& params, PurityVector& p,
             double t_end, const EvolveConfig& cfg);

/// States at each record time (ascending; duplicates allowed).
std::vector<PurityVector> evolve_record(const TridiagonalGenerator& gen, const ModelParams& params,
                                        const PurityVector& p0, EvolveConfig cfg);

/// s_n = -(1/N) (log values_n - log values_0); s_0 = 0 exactly.
std::vector<double> entropy_density(const PurityVector& p);

/// First index of the fit window for a curve with num_sites sites.
/// Throws UnsupportedGrid for odd num_sites or a window that does not fit.
int cusp_window_start(int num_sites, int window);

/// Least-squares s ~ q0 + q1 (x - 1/2) + q2 (x - 1/2)^2 over `window`
/// consecutive points starting at cusp_window_start; returns -2 q2.
double cusp_curvature(const std::vector<double>& s, int window = 10);

struct CuspTrace {
    std::vector<double> times;
    std::vector<double> u;
    int fit_window{10};
};

CuspTrace trace_cusp(const TridiagonalGenerator& gen, const ModelParams& params,
                     const PurityVector& p0, const EvolveConfig& cfg);

struct EntropySeries {
    std::vector<double> times;
    std::vector<std::vector<double>> s; // s[k][n] at times[k]
};

EntropySeries entropy_curve_series(const TridiagonalGenerator& gen, const ModelParams& params,
                                   const PurityVector& p0, const EvolveConfig& cfg);

} // namespace mipt
