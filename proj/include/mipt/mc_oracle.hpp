// mc_oracle.hpp — brute-force trajectory simulation of the hybrid Brownian
// circuit on the full d^N Hilbert space, used as an independent statistical
// check of the purity master equation.
//
// Each step of length dt applies exp(-i H dt) with
//     H dt = sum_{i<j} sum_{a,b} g_{ij}^{ab} T_{ia} T_{jb},   g ~ N(0, J dt / (4 d^3 N)),
// and then, with probability p = N (d+1) lambda dt (lambda = alpha d J),
// the rank-one operator |psi><phi| on a uniformly chosen site with
// independent Haar-random single-qudit states psi, phi. The unnormalized
// density matrix sigma is tracked and tr(sigma_Q^2) is averaged over
// trajectories.

#pragma once

#include "mipt/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace mipt {

using ComplexMatrix = Eigen::MatrixXcd;

/// d^2 Hermitian d x d matrices with tr(T_a T_b) = d delta_ab and T_0 = I
/// (generalized Gell-Mann basis; I, sigma_x, sigma_y, sigma_z for d = 2).
std::vector<ComplexMatrix> pauli_basis(int d);

/// Hard cap on the number of sites for a given local dimension (d^N <= 1024).
int mc_site_cap(int d);

struct TrajectoryConfig {
    double dt{1e-3};
    double t_max{1.0};
    std::vector<double> record_times; // empty: t_max only; rounded to the step grid
    long n_traj{1000};
    std::uint64_t seed{0};
    int n_batches{20};
    int jobs{1};
    std::vector<int> site_order; // Q_n = first n entries; empty: 0, 1, ..., N-1
};

/// Variance of one coupling increment g = J_{ij}^{ab} dt: J dt / (2 d^3 N).
///
/// This is twice the naive discretisation of the white-noise correlator
/// J/(4 d^3 N) delta(t - t').  The purity master equation weights the
/// second-order (time-ordered) term of the Brownian expansion by the full
/// correlator, which is what an increment of this variance reproduces; the
/// naive normalisation relaxes purities at exactly half the master-equation rate.
double coupling_increment_variance(const ModelParams& params, double dt);

/// Measurement probability per step, N (d+1) alpha d J dt.
double measurement_probability(const ModelParams& params, double dt);

/// Throws ConfigError (dt too coarse: p > 0.1, size above the cap, ...).
void validate_trajectory_config(const ModelParams& params, const TrajectoryConfig& cfg);

/// Independent engine for trajectory traj_index (counter-based seeding).
std::mt19937_64 trajectory_engine(std::uint64_t seed, std::uint64_t traj_index);

/// The step Hamiltonian H (not H dt) of one dt-interval, dense d^N x d^N.
ComplexMatrix sample_step_hamiltonian(std::mt19937_64& rng, const ModelParams& params, double dt,
                                      const std::vector<ComplexMatrix>& basis);

/// exp(X) by scaling and squaring with a Taylor kernel.
ComplexMatrix expm(const ComplexMatrix& x);

/// Haar-random unit vector in C^d.
Eigen::VectorXcd haar_state(std::mt19937_64& rng, int d);

/// sigma <- K_site sigma K_site^dagger for a single-site operator K.
void apply_local(ComplexMatrix& sigma, const ComplexMatrix& k, int site, const ModelParams& params);

/// tr(sigma_Q^2) where Q is the set of sites with in_subset[site] true;
/// the empty set gives (tr sigma)^2.
double partial_purity(const ComplexMatrix& sigma, const std::vector<bool>& in_subset, int local_dim);

/// Initial density matrix; for one_mixed the mixed site is drawn from rng.
ComplexMatrix initial_density(InitialKind init, const ModelParams& params, std::mt19937_64& rng);

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<std::vector<double>> purity; // purity[k][n] = tr(sigma_{Q_n}^2) at times[k]
};

TrajectoryRecord run_trajectory(const ModelParams& params, const TrajectoryConfig& cfg,
                                std::uint64_t traj_index, InitialKind init);

struct MCEstimate {
    std::vector<double> times;
    std::vector<std::vector<double>> mean; // [k][n]
    std::vector<std::vector<double>> se;
    std::vector<std::vector<double>> entropy;    // -log(mean_n / mean_0)
    std::vector<std::vector<double>> entropy_se; // first-order propagation incl. covariance
    long n_traj{0};
    int n_batches{0};
};

/// Trajectory-parallel average with batch-means standard errors. The result
/// depends only on (params, cfg minus jobs, init).
MCEstimate estimate_purity(const ModelParams& params, const TrajectoryConfig& cfg, InitialKind init);

} // namespace mipt
