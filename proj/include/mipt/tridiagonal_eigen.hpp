// tridiagonal_eigen.hpp — eigensolvers for real symmetric tridiagonal matrices.
//
//   * implicit-shift QL (full spectrum, optional eigenvectors)
//   * Sturm-sequence bisection for individual eigenvalues
//   * twisted-factorization eigenvectors in signed-log form, which keep
//     full relative accuracy in components many decades below the peak
//   * inverse iteration (dense vectors) as the large-matrix fallback

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace mipt {

struct SymmetricTridiagonal {
    std::vector<double> diag;    // size m
    std::vector<double> offdiag; // size m-1, offdiag[i] couples i and i+1

    std::size_t size() const noexcept { return diag.size(); }
    double norm_inf() const noexcept;
    Eigen::MatrixXd dense() const;
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

// v_n = sign[n] * exp(log_abs[n]); sign 0 marks an exact zero.
struct SignedLogVector {
    std::vector<double> log_abs;
    std::vector<signed char> sign;

    std::size_t size() const noexcept { return log_abs.size(); }
    double value(std::size_t n) const;
    Eigen::VectorXd to_dense() const;

    /// Rescales so that sum_n v_n^2 = 1.
    void normalize();
};

/// Eigenvalues only, ascending. O(m^2).
std::vector<double> ql_eigenvalues(const SymmetricTridiagonal& t);

/// Eigenvalues ascending with eigenvectors as columns. O(m^3).
void ql_eigensystem(const SymmetricTridiagonal& t, std::vector<double>& values,
                    Eigen::MatrixXd& vectors);

/// Number of eigenvalues strictly below x.
std::size_t sturm_count(const SymmetricTridiagonal& t, double x);

/// k-th smallest eigenvalue (k = 0 is the lowest) by bisection to machine precision.
double bisect_eigenvalue(const SymmetricTridiagonal& t, std::size_t k);

/// Eigenvector for an accurate eigenvalue estimate, via the twisted
/// factorization. Normalized; the largest component is positive.
SignedLogVector twisted_eigenvector(const SymmetricTridiagonal& t, double eigenvalue);

/// Dense eigenvector by inverse iteration, orthogonalized against `against`.
Eigen::VectorXd inverse_iteration(const SymmetricTridiagonal& t, double eigenvalue,
                                  const std::vector<Eigen::VectorXd>& against = {});

} // namespace mipt
