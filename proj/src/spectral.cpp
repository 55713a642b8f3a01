#include "mipt/spectral.hpp"

#include "mipt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mipt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Sum of sign_i * exp(log_i), returned as (log|sum|, sign).
struct SignedLog {
    double log_abs{kNegInf};
    signed char sign{0};
};

SignedLog signed_log_sum(const std::vector<double>& logs, const std::vector<signed char>& signs) {
    double mx = kNegInf;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        if (signs[i] != 0) mx = std::max(mx, logs[i]);
    }
    if (mx == kNegInf) return {};
    double acc = 0.0;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        if (signs[i] != 0) acc += signs[i] * std::exp(logs[i] - mx);
    }
    if (acc == 0.0) return {};
    return {mx + std::log(std::abs(acc)), static_cast<signed char>(acc > 0 ? 1 : -1)};
}

SignedLog signed_log_of(double x) {
    if (x == 0.0) return {};
    return {std::log(std::abs(x)), static_cast<signed char>(x > 0 ? 1 : -1)};
}

SignedLog project(const std::vector<double>& log_phi, const std::vector<signed char>& sign_phi,
                  const SimilarityWeights& weights, const PurityVector& p0) {
    const std::size_t m = p0.values.size();
    if (log_phi.size() != m || weights.log_lambda.size() != m) {
        throw ParameterError("project_initial: dimension mismatch");
    }
    std::vector<double> logs(m);
    std::vector<signed char> signs(m);
    for (std::size_t n = 0; n < m; ++n) {
        const SignedLog p = signed_log_of(p0.values[n]);
        logs[n] = log_phi[n] + p.log_abs + p0.log_scale - weights.log_lambda[n];
        signs[n] = static_cast<signed char>(sign_phi[n] * p.sign);
    }
    return signed_log_sum(logs, signs);
}

double resolve_window(double window_time, const ModelParams& params) {
    return window_time < 0.0 ? params.num_sites / params.coupling : window_time;
}

// log P_n (up to an n-independent constant) from two modes, then s_n.
std::vector<double> two_mode_entropy(const SimilarityWeights& weights, const ModelParams& params,
                                     double gap_value, double window_time,
                                     const SignedLog& eta0, const SignedLog& eta1,
                                     const std::vector<double>& log_phi0,
                                     const std::vector<signed char>& sign_phi0,
                                     const std::vector<double>& log_phi1,
                                     const std::vector<signed char>& sign_phi1) {
    const std::size_t m = weights.log_lambda.size();
    const double tw = resolve_window(window_time, params);
    double log_weight1;
    if (gap_value <= 0.0) {
        log_weight1 = 0.0;
    } else if (std::isinf(tw)) {
        log_weight1 = kNegInf;
    } else {
        log_weight1 = -gap_value * tw;
    }
    const bool keep1 = log_weight1 != kNegInf && eta1.sign != 0;

    std::vector<double> log_p(m);
    std::vector<double> logs(2);
    std::vector<signed char> signs(2);
    for (std::size_t n = 0; n < m; ++n) {
        logs[0] = eta0.log_abs + log_phi0[n];
        signs[0] = static_cast<signed char>(eta0.sign * sign_phi0[n]);
        if (keep1) {
            logs[1] = eta1.log_abs + log_phi1[n] + log_weight1;
            signs[1] = static_cast<signed char>(eta1.sign * sign_phi1[n]);
        } else {
            signs[1] = 0;
        }
        const SignedLog total = signed_log_sum(logs, signs);
        if (total.sign <= 0) {
            throw NumericalFailure("stationary purity is not positive", static_cast<std::ptrdiff_t>(n));
        }
        log_p[n] = weights.log_lambda[n] + total.log_abs;
    }
    const double inv_n = 1.0 / params.num_sites;
    std::vector<double> s(m);
    for (std::size_t n = 0; n < m; ++n) s[n] = -(log_p[n] - log_p[0]) * inv_n;
    s[0] = 0.0;
    return s;
}

void dense_to_signed_log(const Eigen::VectorXd& v, std::vector<double>& logs,
                         std::vector<signed char>& signs) {
    const auto m = static_cast<std::size_t>(v.size());
    logs.resize(m);
    signs.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const SignedLog s = signed_log_of(v(static_cast<Eigen::Index>(i)));
        logs[i] = s.log_abs;
        signs[i] = s.sign;
    }
}

} // namespace

// --- similarity transform ---

SimilarityWeights similarity_weights(const TridiagonalGenerator& gen) {
    const std::size_t m = gen.size();
    SimilarityWeights w;
    w.log_lambda.assign(m, 0.0);
    for (std::size_t n = 1; n < m; ++n) {
        const double c = gen.lower[n];     // c_{n-1}
        const double b = gen.upper[n - 1]; // b_{n-1}
        if (!(c > 0.0) || !(b > 0.0)) {
            throw DegenerateSimilarity(
                "similarity transform undefined: vanishing hopping coefficient (alpha = 0?)");
        }
        w.log_lambda[n] = w.log_lambda[n - 1] + 0.5 * (std::log(c) - std::log(b));
    }
    return w;
}

SymmetricTridiagonal hermitianize(const TridiagonalGenerator& gen, const ModelParams& params) {
    params.validate();
    if (params.meas_ratio == 0.0) {
        throw DegenerateSimilarity("hermitianize requires alpha > 0");
    }
    const std::size_t m = gen.size();
    const double J = params.coupling;
    SymmetricTridiagonal h;
    h.diag.resize(m);
    h.offdiag.resize(m - 1);
    for (std::size_t n = 0; n < m; ++n) h.diag[n] = -J * gen.diag[n];
    for (std::size_t n = 1; n < m; ++n) {
        const double prod = gen.upper[n - 1] * gen.lower[n];
        if (!(prod > 0.0)) throw DegenerateSimilarity("hermitianize: vanishing hopping coefficient");
        h.offdiag[n - 1] = -J * std::sqrt(prod);
    }
    return h;
}

// --- full decomposition ---

double SpectralDecomposition::eta(std::size_t a) const {
    return eta_sign[a] == 0 ? 0.0 : eta_sign[a] * std::exp(log_eta[a]);
}

SpectralDecomposition eigendecompose(const SymmetricTridiagonal& h, EigenMethod method) {
    const std::size_t m = h.size();
    if (m == 0) throw ParameterError("eigendecompose: empty matrix");
    for (double x : h.diag) {
        if (!std::isfinite(x)) throw ParameterError("eigendecompose: non-finite diagonal entry");
    }
    for (double x : h.offdiag) {
        if (!std::isfinite(x)) throw ParameterError("eigendecompose: non-finite off-diagonal entry");
    }

    SpectralDecomposition out;
    if (method == EigenMethod::automatic) {
        method = m <= ql_size_limit ? EigenMethod::ql : EigenMethod::bisection;
    }
    if (method == EigenMethod::ql) {
        ql_eigensystem(h, out.energies, out.vectors);
    } else {
        const auto mi = static_cast<Eigen::Index>(m);
        out.energies.resize(m);
        out.vectors.resize(mi, mi);
        const double cluster = 1e-3 * std::max(h.norm_inf(), 1e-300);
        for (std::size_t k = 0; k < m; ++k) {
            out.energies[k] = bisect_eigenvalue(h, k);
            std::vector<Eigen::VectorXd> against;
            for (std::size_t j = k; j-- > 0;) {
                if (out.energies[k] - out.energies[j] > cluster) break;
                against.emplace_back(out.vectors.col(static_cast<Eigen::Index>(j)));
            }
            out.vectors.col(static_cast<Eigen::Index>(k)) = inverse_iteration(h, out.energies[k], against);
        }
    }
    for (Eigen::Index a = 0; a < out.vectors.cols(); ++a) {
        Eigen::Index peak;
        out.vectors.col(a).cwiseAbs().maxCoeff(&peak);
        if (out.vectors(peak, a) < 0.0) out.vectors.col(a) *= -1.0;
    }
    return out;
}

void project_initial(SpectralDecomposition& decomp, const SimilarityWeights& weights,
                     const PurityVector& p0) {
    const std::size_t m = decomp.size();
    if (p0.values.size() != m) throw ParameterError("project_initial: dimension mismatch");
    decomp.log_eta.resize(m);
    decomp.eta_sign.resize(m);
    std::vector<double> logs;
    std::vector<signed char> signs;
    for (std::size_t a = 0; a < m; ++a) {
        dense_to_signed_log(decomp.vectors.col(static_cast<Eigen::Index>(a)), logs, signs);
        const SignedLog e = project(logs, signs, weights, p0);
        decomp.log_eta[a] = e.log_abs;
        decomp.eta_sign[a] = e.sign;
    }
}

PurityVector propagate(const SpectralDecomposition& decomp, const SimilarityWeights& weights,
                       double t) {
    if (!decomp.has_eta()) throw ParameterError("propagate: initial state not projected");
    if (!(t >= 0.0)) throw ParameterError("propagate: t must be >= 0");
    const std::size_t m = decomp.size();
    const double e0 = decomp.energies[0];

    std::vector<double> ref(m);
    double ref_max = kNegInf;
    for (std::size_t a = 0; a < m; ++a) {
        ref[a] = decomp.eta_sign[a] == 0 ? kNegInf : decomp.log_eta[a] - (decomp.energies[a] - e0) * t;
        ref_max = std::max(ref_max, ref[a]);
    }
    if (ref_max == kNegInf) throw NumericalFailure("propagate: initial state has no overlap", 0);

    Eigen::VectorXd coeff(static_cast<Eigen::Index>(m));
    for (std::size_t a = 0; a < m; ++a) {
        coeff(static_cast<Eigen::Index>(a)) =
            decomp.eta_sign[a] == 0 ? 0.0 : decomp.eta_sign[a] * std::exp(ref[a] - ref_max);
    }
    const Eigen::VectorXd sums = decomp.vectors * coeff;
    if (!(sums(0) > 0.0)) throw NumericalFailure("propagate: non-positive P_0", 0);

    PurityVector out;
    out.time = t;
    out.values.resize(m);
    const double ll0 = weights.log_lambda[0];
    for (std::size_t n = 0; n < m; ++n) {
        out.values[n] = std::exp(weights.log_lambda[n] - ll0) * (sums(static_cast<Eigen::Index>(n)) / sums(0));
    }
    out.values[0] = 1.0;
    out.log_scale = ll0 + ref_max + std::log(sums(0)) - e0 * t;
    return out;
}

double gap(const SpectralDecomposition& decomp) {
    if (decomp.size() < 2) return 0.0;
    return decomp.energies[1] - decomp.energies[0];
}

std::vector<double> stationary_entropy(const SpectralDecomposition& decomp,
                                       const SimilarityWeights& weights,
                                       const ModelParams& params, double window_time) {
    if (!decomp.has_eta()) throw ParameterError("stationary_entropy: initial state not projected");
    std::vector<double> l0, l1;
    std::vector<signed char> s0, s1;
    dense_to_signed_log(decomp.vectors.col(0), l0, s0);
    SignedLog eta1;
    if (decomp.size() > 1) {
        dense_to_signed_log(decomp.vectors.col(1), l1, s1);
        eta1 = {decomp.log_eta[1], decomp.eta_sign[1]};
    } else {
        l1 = l0;
        s1.assign(s0.size(), 0);
    }
    return two_mode_entropy(weights, params, gap(decomp), window_time,
                            {decomp.log_eta[0], decomp.eta_sign[0]}, eta1, l0, s0, l1, s1);
}

// --- persymmetric low modes ---

LowModes low_modes(const SymmetricTridiagonal& h) {
    const std::size_t m = h.size();
    if (m < 2) throw ParameterError("low_modes: need at least two sites");
    const double scale = std::max(h.norm_inf(), 1e-300);
    for (std::size_t i = 0; i < m; ++i) {
        if (std::abs(h.diag[i] - h.diag[m - 1 - i]) > 1e-12 * scale) {
            throw ParameterError("low_modes: matrix is not persymmetric");
        }
    }
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (std::abs(h.offdiag[i] - h.offdiag[m - 2 - i]) > 1e-12 * scale) {
            throw ParameterError("low_modes: matrix is not persymmetric");
        }
    }

    const std::size_t num_sites = m - 1;
    SymmetricTridiagonal even, odd;
    // left-half index range of each block and the factor mapping block
    // components onto the full vector
    std::size_t even_len, odd_len;
    bool center_site = num_sites % 2 == 0;
    if (center_site) {
        const std::size_t c = num_sites / 2;
        even_len = c + 1;
        odd_len = c;
        even.diag.assign(h.diag.begin(), h.diag.begin() + static_cast<std::ptrdiff_t>(c + 1));
        even.offdiag.assign(h.offdiag.begin(), h.offdiag.begin() + static_cast<std::ptrdiff_t>(c));
        even.offdiag[c - 1] *= std::sqrt(2.0);
        odd.diag.assign(h.diag.begin(), h.diag.begin() + static_cast<std::ptrdiff_t>(c));
        odd.offdiag.assign(h.offdiag.begin(), h.offdiag.begin() + static_cast<std::ptrdiff_t>(c - 1));
    } else {
        const std::size_t c = (num_sites - 1) / 2;
        even_len = odd_len = c + 1;
        even.diag.assign(h.diag.begin(), h.diag.begin() + static_cast<std::ptrdiff_t>(c + 1));
        even.offdiag.assign(h.offdiag.begin(), h.offdiag.begin() + static_cast<std::ptrdiff_t>(c));
        odd = even;
        even.diag[c] += h.offdiag[c];
        odd.diag[c] -= h.offdiag[c];
    }

    LowModes out;
    out.e0 = bisect_eigenvalue(even, 0);
    out.e1 = bisect_eigenvalue(odd, 0);
    const SignedLogVector psi0 = twisted_eigenvector(even, out.e0);
    const SignedLogVector psi1 = twisted_eigenvector(odd, out.e1);

    const double half_log2 = 0.5 * std::log(2.0);
    auto expand = [&](const SignedLogVector& psi, std::size_t len, bool antisymmetric) {
        SignedLogVector full;
        full.log_abs.assign(m, kNegInf);
        full.sign.assign(m, 0);
        for (std::size_t i = 0; i < len; ++i) {
            const bool is_center = center_site && i == num_sites / 2;
            if (is_center) {
                full.log_abs[i] = psi.log_abs[i];
                full.sign[i] = psi.sign[i];
                continue;
            }
            full.log_abs[i] = psi.log_abs[i] - half_log2;
            full.sign[i] = psi.sign[i];
            full.log_abs[num_sites - i] = psi.log_abs[i] - half_log2;
            full.sign[num_sites - i] = static_cast<signed char>(antisymmetric ? -psi.sign[i] : psi.sign[i]);
        }
        return full;
    };
    out.phi0 = expand(psi0, even_len, false);
    out.phi1 = expand(psi1, odd_len, true);
    return out;
}

void project_low_modes(LowModes& modes, const SimilarityWeights& weights, const PurityVector& p0) {
    const SignedLog e0 = project(modes.phi0.log_abs, modes.phi0.sign, weights, p0);
    const SignedLog e1 = project(modes.phi1.log_abs, modes.phi1.sign, weights, p0);
    modes.log_eta0 = e0.log_abs;
    modes.eta0_sign = e0.sign;
    modes.log_eta1 = e1.log_abs;
    modes.eta1_sign = e1.sign;
}

double eta_left_right_ratio(const LowModes& modes) {
    if (modes.eta0_sign == 0) throw NumericalFailure("eta_left_right_ratio: zero ground-state overlap", 0);
    if (modes.eta1_sign == 0) return 1.0;
    const double r = modes.eta0_sign * modes.eta1_sign * std::exp(modes.log_eta1 - modes.log_eta0);
    return (1.0 + r) / (1.0 - r);
}

std::vector<double> stationary_entropy(const LowModes& modes, const SimilarityWeights& weights,
                                       const ModelParams& params, double window_time) {
    if (modes.eta0_sign == 0 && modes.eta1_sign == 0) {
        throw ParameterError("stationary_entropy: initial state not projected");
    }
    return two_mode_entropy(weights, params, modes.gap(), window_time,
                            {modes.log_eta0, modes.eta0_sign}, {modes.log_eta1, modes.eta1_sign},
                            modes.phi0.log_abs, modes.phi0.sign, modes.phi1.log_abs, modes.phi1.sign);
}

std::vector<double> ground_state_log_profile(const LowModes& modes, const SimilarityWeights& weights,
                                             bool include_similarity) {
    const std::size_t m = modes.phi0.size();
    const double inv_n = 1.0 / static_cast<double>(m - 1);
    std::vector<double> out(m);
    for (std::size_t n = 0; n < m; ++n) {
        double l = modes.phi0.log_abs[n];
        if (include_similarity) l += weights.log_lambda[n];
        out[n] = -l * inv_n;
    }
    const double base = out[0];
    for (double& v : out) v -= base;
    return out;
}

} // namespace mipt
