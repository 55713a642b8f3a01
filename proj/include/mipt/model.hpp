// model.hpp — model parameters, the purity master-equation generator and
// initial purity vectors.
//
// The averaged purity P_n of any n-site subsystem obeys
//
//     dP_n/dt = J (a_n P_n + b_n P_{n+1} + c_{n-1} P_{n-1}),   n = 0..N,
//
// with
//     a_n     = -(d + 1/d)(N-n)n/N - alpha N d (d + 1 - 1/d)
//     b_n     = (N-n)n/N + alpha (N-n)
//     c_{n-1} = (N-n)n/N + alpha n
//
// All coefficients are stored dimensionless (units of J).

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mipt {

struct ModelParams {
    int num_sites{2};       // N
    int local_dim{2};       // d
    double meas_ratio{0.0}; // alpha = lambda / (d J)
    double coupling{1.0};   // J

    /// Throws ParameterError naming the violated invariant.
    void validate() const;

    /// alpha_c = (d - 1) / 2.
    double critical_alpha() const noexcept { return 0.5 * (local_dim - 1); }
};

ModelParams make_params(int num_sites, int local_dim, double meas_ratio, double coupling = 1.0);

// Arrays are indexed 0..N inclusive. lower[n] holds c_{n-1}, the coefficient
// of P_{n-1} in the equation for P_n; lower[0] = 0 and upper[N] = 0.
struct TridiagonalGenerator {
    std::vector<double> diag;
    std::vector<double> upper;
    std::vector<double> lower;

    std::size_t size() const noexcept { return diag.size(); }
    int num_sites() const noexcept { return static_cast<int>(diag.size()) - 1; }

    /// out_n = a_n v_n + b_n v_{n+1} + c_{n-1} v_{n-1} (dimensionless, no J).
    void apply(std::span<const double> v, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> v) const;

    double max_abs_diag() const noexcept;
};

TridiagonalGenerator build_generator(const ModelParams& params);

enum class InitialKind { pure, one_mixed, max_mixed };

InitialKind parse_initial_kind(std::string_view name);
std::string_view to_string(InitialKind kind) noexcept;

// Physical purity is exp(log_scale) * values[n].
struct PurityVector {
    double log_scale{0.0};
    std::vector<double> values;
    double time{0.0};

    int num_sites() const noexcept { return static_cast<int>(values.size()) - 1; }
    double log_purity(std::size_t n) const;

    /// Divides by values[0] and folds the factor into log_scale.
    void renormalize();
};

PurityVector initial_purity(InitialKind kind, const ModelParams& params);

/// Entry n of the result is entry N-n of the input.
PurityVector reflect(const PurityVector& p);

} // namespace mipt
