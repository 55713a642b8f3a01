#include "mipt/tridiagonal_eigen.hpp"

#include "mipt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mipt {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxQlIterations = 60;

double pivot_floor(const SymmetricTridiagonal& t) {
    double emax = 1.0;
    for (double e : t.offdiag) emax = std::max(emax, e * e);
    return std::numeric_limits<double>::min() * emax;
}

void gershgorin(const SymmetricTridiagonal& t, double& lo, double& hi) {
    const std::size_t m = t.size();
    lo = std::numeric_limits<double>::infinity();
    hi = -lo;
    for (std::size_t i = 0; i < m; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(t.offdiag[i - 1]);
        if (i + 1 < m) r += std::abs(t.offdiag[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    const double pad = kEps * std::max(std::abs(lo), std::abs(hi)) * m + pivot_floor(t);
    lo -= pad;
    hi += pad;
}

// Implicit QL with Wilkinson-type shifts. e[i] couples i and i+1; e[m-1] is scratch.
void ql_implicit(std::vector<double>& d, std::vector<double> e, Eigen::MatrixXd* z) {
    const int n = static_cast<int>(d.size());
    e.resize(n, 0.0);
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= kEps * dd) break;
            }
            if (m != l) {
                if (iter++ == kMaxQlIterations) {
                    throw NumericalFailure("QL iteration did not converge", l);
                }
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                bool underflow = false;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        for (Eigen::Index k = 0; k < z->rows(); ++k) {
                            f = (*z)(k, i + 1);
                            (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
                            (*z)(k, i) = c * (*z)(k, i) - s * f;
                        }
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

// Banded LU with partial pivoting (the LAPACK gttrf/gtts2 scheme).
struct TridiagonalLU {
    std::vector<double> dl, d, du, du2;
    std::vector<int> pivot;

    TridiagonalLU(const SymmetricTridiagonal& t, double shift) {
        const std::size_t n = t.size();
        d.resize(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
        dl = t.offdiag;
        du = t.offdiag;
        du2.assign(n > 2 ? n - 2 : 0, 0.0);
        pivot.resize(n);
        std::iota(pivot.begin(), pivot.end(), 0);
        const double tiny = kEps * std::max(t.norm_inf(), 1e-300);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                if (d[i] == 0.0) d[i] = tiny;
                const double fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                const double fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                const double temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                pivot[i] = static_cast<int>(i + 1);
            }
        }
        for (double& v : d) {
            if (v == 0.0) v = tiny;
        }
    }

    void solve(Eigen::VectorXd& b) const {
        const std::size_t n = d.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (pivot[i] == static_cast<int>(i)) {
                b(i + 1) -= dl[i] * b(i);
            } else {
                const double temp = b(i);
                b(i) = b(i + 1);
                b(i + 1) = temp - dl[i] * b(i);
            }
        }
        b(n - 1) /= d[n - 1];
        if (n > 1) b(n - 2) = (b(n - 2) - du[n - 2] * b(n - 1)) / d[n - 2];
        for (std::size_t k = n; k-- > 2;) {
            const std::size_t i = k - 2;
            b(i) = (b(i) - du[i] * b(i + 1) - du2[i] * b(i + 2)) / d[i];
        }
    }
};

double log_sum_exp_sq(const SignedLogVector& v) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v.sign[i] != 0) mx = std::max(mx, v.log_abs[i]);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v.sign[i] != 0) acc += std::exp(2.0 * (v.log_abs[i] - mx));
    }
    return 2.0 * mx + std::log(acc);
}

} // namespace

double SymmetricTridiagonal::norm_inf() const noexcept {
    double best = 0.0;
    const std::size_t m = size();
    for (std::size_t i = 0; i < m; ++i) {
        double row = std::abs(diag[i]);
        if (i > 0) row += std::abs(offdiag[i - 1]);
        if (i + 1 < m) row += std::abs(offdiag[i]);
        best = std::max(best, row);
    }
    return best;
}

Eigen::MatrixXd SymmetricTridiagonal::dense() const {
    const auto m = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        h(i, i) = diag[i];
        if (i + 1 < m) {
            h(i, i + 1) = offdiag[i];
            h(i + 1, i) = offdiag[i];
        }
    }
    return h;
}

Eigen::VectorXd SymmetricTridiagonal::apply(const Eigen::VectorXd& v) const {
    const auto m = static_cast<Eigen::Index>(size());
    Eigen::VectorXd out(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double acc = diag[i] * v(i);
        if (i > 0) acc += offdiag[i - 1] * v(i - 1);
        if (i + 1 < m) acc += offdiag[i] * v(i + 1);
        out(i) = acc;
    }
    return out;
}

double SignedLogVector::value(std::size_t n) const {
    return sign[n] == 0 ? 0.0 : sign[n] * std::exp(log_abs[n]);
}

Eigen::VectorXd SignedLogVector::to_dense() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) v(i) = value(i);
    return v;
}

void SignedLogVector::normalize() {
    const double half = 0.5 * log_sum_exp_sq(*this);
    for (double& l : log_abs) l -= half;
}

std::vector<double> ql_eigenvalues(const SymmetricTridiagonal& t) {
    std::vector<double> d = t.diag;
    if (d.size() > 1) ql_implicit(d, t.offdiag, nullptr);
    std::sort(d.begin(), d.end());
    return d;
}

void ql_eigensystem(const SymmetricTridiagonal& t, std::vector<double>& values,
                    Eigen::MatrixXd& vectors) {
    const auto m = static_cast<Eigen::Index>(t.size());
    std::vector<double> d = t.diag;
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(m, m);
    if (m > 1) ql_implicit(d, t.offdiag, &z);

    std::vector<Eigen::Index> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return d[a] < d[b]; });
    values.resize(m);
    vectors.resize(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        values[k] = d[order[k]];
        vectors.col(k) = z.col(order[k]);
    }
}

std::size_t sturm_count(const SymmetricTridiagonal& t, double x) {
    const double pivmin = pivot_floor(t);
    std::size_t count = 0;
    double q = t.diag[0] - x;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < t.size(); ++i) {
        q = t.diag[i] - x - t.offdiag[i - 1] * t.offdiag[i - 1] / q;
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

double bisect_eigenvalue(const SymmetricTridiagonal& t, std::size_t k) {
    if (k >= t.size()) throw ParameterError("bisect_eigenvalue: index out of range");
    double lo, hi;
    gershgorin(t, lo, hi);
    const double pivmin = pivot_floor(t);
    for (int iter = 0; iter < 2000; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) + pivmin) break;
        if (sturm_count(t, mid) > k) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

SignedLogVector twisted_eigenvector(const SymmetricTridiagonal& t, double eigenvalue) {
    const std::size_t n = t.size();
    SignedLogVector v;
    v.log_abs.assign(n, 0.0);
    v.sign.assign(n, 1);
    if (n == 1) return v;

    const double tiny = kEps * std::max(t.norm_inf(), 1e-300);
    std::vector<double> dp(n), dm(n);
    double shift = eigenvalue;

    for (int refine = 0; refine < 4; ++refine) {
        dp[0] = t.diag[0] - shift;
        if (dp[0] == 0.0) dp[0] = tiny;
        for (std::size_t i = 1; i < n; ++i) {
            dp[i] = t.diag[i] - shift - t.offdiag[i - 1] * t.offdiag[i - 1] / dp[i - 1];
            if (dp[i] == 0.0) dp[i] = tiny;
        }
        dm[n - 1] = t.diag[n - 1] - shift;
        if (dm[n - 1] == 0.0) dm[n - 1] = tiny;
        for (std::size_t i = n - 1; i-- > 0;) {
            dm[i] = t.diag[i] - shift - t.offdiag[i] * t.offdiag[i] / dm[i + 1];
            if (dm[i] == 0.0) dm[i] = tiny;
        }

        std::size_t twist = 0;
        double best = std::numeric_limits<double>::infinity();
        double gamma_twist = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double gamma = dp[k] + dm[k] - (t.diag[k] - shift);
            if (std::abs(gamma) < best) {
                best = std::abs(gamma);
                twist = k;
                gamma_twist = gamma;
            }
        }

        v.log_abs[twist] = 0.0;
        v.sign[twist] = 1;
        for (std::size_t i = twist; i-- > 0;) {
            // dp_i v_i = -e_i v_{i+1}
            const double e = t.offdiag[i];
            if (e == 0.0 || v.sign[i + 1] == 0) {
                v.sign[i] = 0;
                v.log_abs[i] = -std::numeric_limits<double>::infinity();
                continue;
            }
            v.log_abs[i] = v.log_abs[i + 1] + std::log(std::abs(e)) - std::log(std::abs(dp[i]));
            v.sign[i] = static_cast<signed char>(v.sign[i + 1] * (e > 0 ? -1 : 1) * (dp[i] > 0 ? 1 : -1));
        }
        for (std::size_t i = twist + 1; i < n; ++i) {
            // dm_i v_i = -e_{i-1} v_{i-1}
            const double e = t.offdiag[i - 1];
            if (e == 0.0 || v.sign[i - 1] == 0) {
                v.sign[i] = 0;
                v.log_abs[i] = -std::numeric_limits<double>::infinity();
                continue;
            }
            v.log_abs[i] = v.log_abs[i - 1] + std::log(std::abs(e)) - std::log(std::abs(dm[i]));
            v.sign[i] = static_cast<signed char>(v.sign[i - 1] * (e > 0 ? -1 : 1) * (dm[i] > 0 ? 1 : -1));
        }

        // Rayleigh-quotient correction: with v_twist = 1, delta = gamma / |v|^2.
        const double delta = gamma_twist * std::exp(-log_sum_exp_sq(v));
        if (!std::isfinite(delta) || std::abs(delta) <= 4.0 * kEps * std::max(std::abs(shift), tiny)) break;
        shift += delta;
    }

    v.normalize();
    std::size_t peak = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (v.sign[i] != 0 && v.log_abs[i] > v.log_abs[peak]) peak = i;
    }
    if (v.sign[peak] < 0) {
        for (auto& s : v.sign) s = static_cast<signed char>(-s);
    }
    return v;
}

Eigen::VectorXd inverse_iteration(const SymmetricTridiagonal& t, double eigenvalue,
                                  const std::vector<Eigen::VectorXd>& against) {
    const auto n = static_cast<Eigen::Index>(t.size());
    const double scale = std::max(t.norm_inf(), 1e-300);
    // A small offset keeps the factorization away from exact singularity.
    const TridiagonalLU lu(t, eigenvalue + 10.0 * kEps * scale);

    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = 1.0 + 0.01 * std::sin(1.0 + 3.7 * static_cast<double>(i));
    x.normalize();
    for (int iter = 0; iter < 8; ++iter) {
        lu.solve(x);
        for (const auto& q : against) x -= q.dot(x) * q;
        const double nrm = x.norm();
        if (!std::isfinite(nrm) || nrm == 0.0) {
            throw NumericalFailure("inverse iteration broke down", -1);
        }
        x /= nrm;
        const double residual = (t.apply(x) - eigenvalue * x).lpNorm<Eigen::Infinity>();
        if (iter >= 2 && residual <= 1e-13 * scale) break;
    }
    Eigen::Index peak;
    x.cwiseAbs().maxCoeff(&peak);
    if (x(peak) < 0.0) x = -x;
    return x;
}

} // namespace mipt
