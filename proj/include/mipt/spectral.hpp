// spectral.hpp — Hermitian form of the purity generator and exact
// propagation in its eigenbasis.
//
// With Lambda_{n+1}/Lambda_n = sqrt(c_n / b_n) the diagonal similarity
// S = diag(Lambda) symmetrizes the generator M:
//
//     H = S^{-1} (-J M) S,   H_nn = -J a_n,   H_{n-1,n} = -J sqrt(b_{n-1} c_{n-1}),
//
// so that P_n(t) = Lambda_n sum_a eta_a phi_{a,n} exp(-E_a t) with
// eta_a = sum_n phi_{a,n} P_n(0) / Lambda_n.

#pragma once

#include "mipt/model.hpp"
#include "mipt/tridiagonal_eigen.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mipt {

struct SimilarityWeights {
    std::vector<double> log_lambda; // log Lambda_n, log_lambda[0] = 0
};

/// Throws DegenerateSimilarity when any b_{m-1} or c_{m-1} vanishes (alpha = 0).
SimilarityWeights similarity_weights(const TridiagonalGenerator& gen);

SymmetricTridiagonal hermitianize(const TridiagonalGenerator& gen, const ModelParams& params);

enum class EigenMethod { automatic, ql, bisection };

/// Matrices up to this size use QL under EigenMethod::automatic.
inline constexpr std::size_t ql_size_limit = 5000;

struct SpectralDecomposition {
    std::vector<double> energies; // ascending
    Eigen::MatrixXd vectors;      // column a is phi_a
    // eta_a = eta_sign[a] * exp(log_eta[a]); empty until project_initial.
    std::vector<double> log_eta;
    std::vector<signed char> eta_sign;

    std::size_t size() const noexcept { return energies.size(); }
    bool has_eta() const noexcept { return !log_eta.empty(); }
    double eta(std::size_t a) const;
};

/// Full ascending spectrum with orthonormal eigenvectors. Every column has
/// its largest-magnitude entry positive; the ground state is then positive.
SpectralDecomposition eigendecompose(const SymmetricTridiagonal& h,
                                     EigenMethod method = EigenMethod::automatic);

/// Fills eta from the initial purity vector (log-stabilized sums).
void project_initial(SpectralDecomposition& decomp, const SimilarityWeights& weights,
                     const PurityVector& p0);

/// Exact purity at time t; log_scale absorbs the common exp(-E_0 t) decay
/// and values are renormalized so that values_0 = 1.
PurityVector propagate(const SpectralDecomposition& decomp, const SimilarityWeights& weights,
                       double t);

/// E_1 - E_0.
double gap(const SpectralDecomposition& decomp);

// --- low-lying modes of a persymmetric Hamiltonian ---
//
// H_{n,n} = H_{N-n,N-n} lets the problem split into a symmetric and an
// antisymmetric block of half size. E_0 is the bottom of the symmetric block
// and E_1 the bottom of the antisymmetric one; both vectors are obtained in
// signed-log form so that components far below the peak stay accurate.

struct LowModes {
    double e0{0.0};
    double e1{0.0};
    SignedLogVector phi0; // symmetric, positive
    SignedLogVector phi1; // antisymmetric, positive on the left half
    // Projections of an initial state onto phi0 / phi1 (signed log), set by project_low_modes.
    double log_eta0{0.0}, log_eta1{0.0};
    signed char eta0_sign{0}, eta1_sign{0};

    double gap() const noexcept { return e1 - e0; }
};

/// Throws ParameterError if h is not persymmetric to 1e-12 relative.
LowModes low_modes(const SymmetricTridiagonal& h);

void project_low_modes(LowModes& modes, const SimilarityWeights& weights, const PurityVector& p0);

/// Ratio eta_L / eta_R of the overlaps with the left/right localized states
/// (phi0 +- phi1)/sqrt(2).
double eta_left_right_ratio(const LowModes& modes);

/// Long-time entropy density s_n = -(1/N) log(P_n/P_0), keeping the two
/// lowest modes with the first excited one weighted by exp(-(E_1-E_0) t_w).
/// t_w is the observation window: long compared with every O(J) relaxation
/// but short compared with the tunnelling time ~ 1/(E_1-E_0). A negative
/// window selects the default N/J; infinity gives the strict t -> inf limit.
std::vector<double> stationary_entropy(const LowModes& modes, const SimilarityWeights& weights,
                                       const ModelParams& params, double window_time = -1.0);

/// Same rule evaluated from a full decomposition (eta must be present).
std::vector<double> stationary_entropy(const SpectralDecomposition& decomp,
                                       const SimilarityWeights& weights,
                                       const ModelParams& params, double window_time = -1.0);

/// -(1/N) log(Lambda_n phi_{0,n}) shifted so that entry 0 vanishes: the
/// ground-state log profile that the continuum action is compared with.
std::vector<double> ground_state_log_profile(const LowModes& modes, const SimilarityWeights& weights,
                                             bool include_similarity);

} // namespace mipt
