#include "mipt/model.hpp"

#include "mipt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mipt {

void ModelParams::validate() const {
    if (num_sites < 2) {
        throw ParameterError("num_sites N must be >= 2 (got " + std::to_string(num_sites) + ")");
    }
    if (local_dim < 2) {
        throw ParameterError("local_dim d must be >= 2 (got " + std::to_string(local_dim) + ")");
    }
    if (!std::isfinite(meas_ratio) || meas_ratio < 0.0) {
        throw ParameterError("meas_ratio alpha must be finite and >= 0");
    }
    if (!std::isfinite(coupling) || coupling <= 0.0) {
        throw ParameterError("coupling J must be finite and > 0");
    }
}

ModelParams make_params(int num_sites, int local_dim, double meas_ratio, double coupling) {
    ModelParams p{num_sites, local_dim, meas_ratio, coupling};
    p.validate();
    return p;
}

void TridiagonalGenerator::apply(std::span<const double> v, std::span<double> out) const {
    const std::size_t m = size();
    for (std::size_t n = 0; n < m; ++n) {
        double acc = diag[n] * v[n];
        if (n + 1 < m) acc += upper[n] * v[n + 1];
        if (n > 0) acc += lower[n] * v[n - 1];
        out[n] = acc;
    }
}

std::vector<double> TridiagonalGenerator::apply(std::span<const double> v) const {
    std::vector<double> out(size());
    apply(v, out);
    return out;
}

double TridiagonalGenerator::max_abs_diag() const noexcept {
    double m = 0.0;
    for (double a : diag) m = std::max(m, std::abs(a));
    return m;
}

TridiagonalGenerator build_generator(const ModelParams& params) {
    params.validate();
    const int N = params.num_sites;
    const double d = params.local_dim;
    const double alpha = params.meas_ratio;
    const double Nd = N;
    const double meas_diag = alpha * Nd * d * (d + 1.0 - 1.0 / d);

    TridiagonalGenerator gen;
    gen.diag.resize(N + 1);
    gen.upper.resize(N + 1);
    gen.lower.resize(N + 1);
    for (int n = 0; n <= N; ++n) {
        // (N-n)n/N is exactly zero at both ends.
        const double hop = static_cast<double>(N - n) * n / Nd;
        gen.diag[n] = -(d + 1.0 / d) * hop - meas_diag;
        gen.upper[n] = hop + alpha * (N - n);
        gen.lower[n] = hop + alpha * n;
    }
    gen.upper[N] = 0.0;
    gen.lower[0] = 0.0;
    return gen;
}

InitialKind parse_initial_kind(std::string_view name) {
    if (name == "pure") return InitialKind::pure;
    if (name == "one_mixed" || name == "one-mixed") return InitialKind::one_mixed;
    if (name == "max_mixed" || name == "max-mixed") return InitialKind::max_mixed;
    throw ParameterError("unknown initial state kind '" + std::string(name) +
                         "' (expected pure, one_mixed or max_mixed)");
}

std::string_view to_string(InitialKind kind) noexcept {
    switch (kind) {
    case InitialKind::pure: return "pure";
    case InitialKind::one_mixed: return "one_mixed";
    case InitialKind::max_mixed: return "max_mixed";
    }
    return "pure";
}

double PurityVector::log_purity(std::size_t n) const {
    return log_scale + std::log(values.at(n));
}

void PurityVector::renormalize() {
    const double v0 = values.front();
    log_scale += std::log(v0);
    for (double& v : values) v /= v0;
    values.front() = 1.0;
}

PurityVector initial_purity(InitialKind kind, const ModelParams& params) {
    params.validate();
    const int N = params.num_sites;
    const double d = params.local_dim;
    PurityVector p;
    p.values.resize(N + 1);
    for (int n = 0; n <= N; ++n) {
        switch (kind) {
        case InitialKind::pure:
            p.values[n] = 1.0;
            break;
        case InitialKind::one_mixed:
            p.values[n] = static_cast<double>(N - n) / N + static_cast<double>(n) / (N * d);
            break;
        case InitialKind::max_mixed:
            p.values[n] = std::pow(d, -n);
            break;
        }
    }
    return p;
}

PurityVector reflect(const PurityVector& p) {
    PurityVector r = p;
    std::reverse(r.values.begin(), r.values.end());
    return r;
}

} // namespace mipt
