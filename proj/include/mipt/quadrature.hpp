// quadrature.hpp — globally adaptive Gauss–Kronrod (7/15) integration.

#pragma once

#include <functional>

namespace mipt {

struct QuadratureResult {
    double value{0.0};
    double error{0.0};
    int evaluations{0};
};

/// Globally adaptive GK15: repeatedly bisects the interval with the largest
/// error estimate until the total estimate is below max(abs_tol, rel_tol*|I|).
/// Throws NumericalFailure if max_intervals is exhausted first.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-12, double rel_tol = 0.0, int max_intervals = 4000);

/// For integrands with integrable (e.g. logarithmic) singularities at one or
/// both endpoints: each half of [a, b] is mapped by x = end -+ h u^2, which
/// turns a log singularity into u log u and restores fast convergence.
QuadratureResult integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                             double abs_tol = 1e-12, double rel_tol = 0.0,
                                             int max_intervals = 4000);

} // namespace mipt
