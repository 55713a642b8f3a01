#include "mipt/mc_oracle.hpp"

#include "mipt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <thread>

namespace mipt {

namespace {

using cd = std::complex<double>;

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

long ipow(long base, int exp) {
    long r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

long stride_of(int site, const ModelParams& params) {
    return ipow(params.local_dim, params.num_sites - 1 - site);
}

// All d^4 products T_a (x) T_b as d^2 x d^2 matrices, index a*d^2 + b.
std::vector<ComplexMatrix> pair_products(const std::vector<ComplexMatrix>& basis) {
    std::vector<ComplexMatrix> out;
    const auto d = basis.front().rows();
    out.reserve(basis.size() * basis.size());
    for (const auto& ta : basis) {
        for (const auto& tb : basis) {
            ComplexMatrix k(d * d, d * d);
            for (Eigen::Index i = 0; i < d; ++i) {
                for (Eigen::Index j = 0; j < d; ++j) {
                    k.block(i * d, j * d, d, d) = ta(i, j) * tb;
                }
            }
            out.push_back(std::move(k));
        }
    }
    return out;
}

// H dt for one step.
ComplexMatrix sample_step_generator(std::mt19937_64& rng, const ModelParams& params, double dt,
                                    const std::vector<ComplexMatrix>& products) {
    const int N = params.num_sites;
    const int d = params.local_dim;
    const long dim = ipow(d, N);
    const double sd = std::sqrt(coupling_increment_variance(params, dt));
    std::normal_distribution<double> normal(0.0, sd);

    ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix k(d * d, d * d);
    for (int i = 0; i < N; ++i) {
        for (int j = i + 1; j < N; ++j) {
            k.setZero();
            for (const auto& p : products) k += normal(rng) * p;
            const long si = stride_of(i, params);
            const long sj = stride_of(j, params);
            for (long x = 0; x < dim; ++x) {
                const long di = (x / si) % d;
                const long dj = (x / sj) % d;
                const long base = x - di * si - dj * sj;
                const long row = di * d + dj;
                for (long ti = 0; ti < d; ++ti) {
                    for (long tj = 0; tj < d; ++tj) {
                        a(x, base + ti * si + tj * sj) += k(row, ti * d + tj);
                    }
                }
            }
        }
    }
    return a;
}

} // namespace

// --- basis and sampling primitives ---

std::vector<ComplexMatrix> pauli_basis(int d) {
    if (d < 2) throw ParameterError("pauli_basis: d must be >= 2");
    const double scale = std::sqrt(d / 2.0); // Gell-Mann matrices have tr(l_a l_b) = 2 delta_ab
    std::vector<ComplexMatrix> basis;
    basis.reserve(static_cast<std::size_t>(d) * d);
    basis.push_back(ComplexMatrix::Identity(d, d));
    for (int j = 0; j < d; ++j) {
        for (int k = j + 1; k < d; ++k) {
            ComplexMatrix sym = ComplexMatrix::Zero(d, d);
            sym(j, k) = sym(k, j) = scale;
            basis.push_back(sym);
            ComplexMatrix asym = ComplexMatrix::Zero(d, d);
            asym(j, k) = cd(0.0, -scale);
            asym(k, j) = cd(0.0, scale);
            basis.push_back(asym);
        }
    }
    for (int l = 1; l < d; ++l) {
        ComplexMatrix diag = ComplexMatrix::Zero(d, d);
        const double norm = scale * std::sqrt(2.0 / (l * (l + 1.0)));
        for (int j = 0; j < l; ++j) diag(j, j) = norm;
        diag(l, l) = -l * norm;
        basis.push_back(diag);
    }
    return basis;
}

int mc_site_cap(int d) {
    int n = 0;
    long dim = 1;
    while (dim * d <= 1024) {
        dim *= d;
        ++n;
    }
    return n;
}

double coupling_increment_variance(const ModelParams& params, double dt) {
    const double d = params.local_dim;
    return params.coupling * dt / (2.0 * d * d * d * params.num_sites);
}

double measurement_probability(const ModelParams& params, double dt) {
    const double lambda = params.meas_ratio * params.local_dim * params.coupling;
    return params.num_sites * (params.local_dim + 1.0) * lambda * dt;
}

void validate_trajectory_config(const ModelParams& params, const TrajectoryConfig& cfg) {
    params.validate();
    if (params.num_sites > mc_site_cap(params.local_dim)) {
        throw ConfigError("Monte Carlo oracle is capped at N = " + std::to_string(mc_site_cap(params.local_dim)) +
                          " for d = " + std::to_string(params.local_dim));
    }
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt must be > 0");
    const double p = measurement_probability(params, cfg.dt);
    if (p > 0.1) {
        throw ConfigError("dt too large: measurement probability per step is " + std::to_string(p) +
                          " (must be <= 0.1)");
    }
    if (!(cfg.t_max >= 0.0) || !std::isfinite(cfg.t_max)) throw ConfigError("t_max must be finite and >= 0");
    for (double t : cfg.record_times) {
        if (!(t >= 0.0) || t > cfg.t_max * (1.0 + 1e-12)) {
            throw ConfigError("record times must lie in [0, t_max]");
        }
    }
    if (cfg.n_traj < 1) throw ConfigError("n_traj must be >= 1");
    if (cfg.n_batches < 2 || cfg.n_batches > cfg.n_traj) {
        throw ConfigError("n_batches must be in [2, n_traj]");
    }
    if (!cfg.site_order.empty()) {
        std::vector<int> sorted = cfg.site_order;
        std::sort(sorted.begin(), sorted.end());
        std::vector<int> expect(params.num_sites);
        std::iota(expect.begin(), expect.end(), 0);
        if (sorted != expect) throw ConfigError("site_order must be a permutation of 0..N-1");
    }
}

std::mt19937_64 trajectory_engine(std::uint64_t seed, std::uint64_t traj_index) {
    std::uint64_t state = seed;
    const std::uint64_t a = splitmix64(state);
    state = a ^ (traj_index * 0xD1B54A32D192ED03ULL);
    const std::uint64_t b = splitmix64(state);
    return std::mt19937_64(b ^ splitmix64(state));
}

ComplexMatrix sample_step_hamiltonian(std::mt19937_64& rng, const ModelParams& params, double dt,
                                      const std::vector<ComplexMatrix>& basis) {
    if (!(dt > 0.0)) throw ParameterError("sample_step_hamiltonian: dt must be > 0");
    return sample_step_generator(rng, params, dt, pair_products(basis)) / dt;
}

ComplexMatrix expm(const ComplexMatrix& x) {
    const Eigen::Index n = x.rows();
    const double norm = x.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const ComplexMatrix y = x / std::ldexp(1.0, squarings);
    const double theta = norm / std::ldexp(1.0, squarings);

    // Smallest order with theta^(m+1)/(m+1)! below double rounding.
    int order = 1;
    double tail = theta;
    while (order < 30) {
        tail *= theta / (order + 1);
        if (tail < 1e-17) break;
        ++order;
    }
    // Horner: I + y (I + y/2 (I + y/3 (...)))
    ComplexMatrix result = ComplexMatrix::Identity(n, n);
    ComplexMatrix tmp(n, n);
    for (int k = order; k >= 1; --k) {
        tmp.noalias() = y.lazyProduct(result);
        result = tmp / static_cast<double>(k);
        result.diagonal().array() += 1.0;
    }
    for (int s = 0; s < squarings; ++s) {
        tmp.noalias() = result.lazyProduct(result);
        result.swap(tmp);
    }
    return result;
}

Eigen::VectorXcd haar_state(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXcd v(d);
    for (int i = 0; i < d; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = cd(re, im);
    }
    return v / v.norm();
}

void apply_local(ComplexMatrix& sigma, const ComplexMatrix& k, int site, const ModelParams& params) {
    const int d = params.local_dim;
    const long dim = sigma.rows();
    const long s = stride_of(site, params);
    std::vector<cd> buf(d);
    // rows: sigma <- K sigma
    for (long c = 0; c < dim; ++c) {
        for (long x = 0; x < dim; ++x) {
            if ((x / s) % d != 0) continue;
            for (int i = 0; i < d; ++i) {
                cd acc = 0.0;
                for (int j = 0; j < d; ++j) acc += k(i, j) * sigma(x + j * s, c);
                buf[i] = acc;
            }
            for (int i = 0; i < d; ++i) sigma(x + i * s, c) = buf[i];
        }
    }
    // columns: sigma <- sigma K^dagger
    for (long x = 0; x < dim; ++x) {
        if ((x / s) % d != 0) continue;
        for (long r = 0; r < dim; ++r) {
            for (int i = 0; i < d; ++i) {
                cd acc = 0.0;
                for (int j = 0; j < d; ++j) acc += sigma(r, x + j * s) * std::conj(k(i, j));
                buf[i] = acc;
            }
            for (int i = 0; i < d; ++i) sigma(r, x + i * s) = buf[i];
        }
    }
}

double partial_purity(const ComplexMatrix& sigma, const std::vector<bool>& in_subset, int local_dim) {
    const int N = static_cast<int>(in_subset.size());
    const long dim = sigma.rows();
    std::vector<long> q_index(dim), r_index(dim);
    long q_dim = 1;
    for (bool b : in_subset) q_dim *= b ? local_dim : 1;
    for (long x = 0; x < dim; ++x) {
        long q = 0, r = 0, rem = x;
        std::vector<int> digits(N);
        for (int site = N - 1; site >= 0; --site) {
            digits[site] = static_cast<int>(rem % local_dim);
            rem /= local_dim;
        }
        for (int site = 0; site < N; ++site) {
            if (in_subset[site]) {
                q = q * local_dim + digits[site];
            } else {
                r = r * local_dim + digits[site];
            }
        }
        q_index[x] = q;
        r_index[x] = r;
    }
    ComplexMatrix reduced = ComplexMatrix::Zero(q_dim, q_dim);
    for (long y = 0; y < dim; ++y) {
        for (long x = 0; x < dim; ++x) {
            if (r_index[x] == r_index[y]) reduced(q_index[x], q_index[y]) += sigma(x, y);
        }
    }
    return reduced.cwiseAbs2().sum();
}

ComplexMatrix initial_density(InitialKind init, const ModelParams& params, std::mt19937_64& rng) {
    const long dim = ipow(params.local_dim, params.num_sites);
    ComplexMatrix sigma = ComplexMatrix::Zero(dim, dim);
    switch (init) {
    case InitialKind::pure:
        sigma(0, 0) = 1.0;
        break;
    case InitialKind::max_mixed:
        sigma.diagonal().setConstant(1.0 / static_cast<double>(dim));
        break;
    case InitialKind::one_mixed: {
        std::uniform_int_distribution<int> pick(0, params.num_sites - 1);
        const long s = stride_of(pick(rng), params);
        for (int i = 0; i < params.local_dim; ++i) sigma(i * s, i * s) = 1.0 / params.local_dim;
        break;
    }
    }
    return sigma;
}

// --- trajectories ---

namespace {

std::vector<long> record_steps(const TrajectoryConfig& cfg, std::vector<double>& times) {
    times = cfg.record_times.empty() ? std::vector<double>{cfg.t_max} : cfg.record_times;
    std::sort(times.begin(), times.end());
    std::vector<long> steps;
    for (double& t : times) {
        const long k = std::lround(t / cfg.dt);
        steps.push_back(k);
        t = k * cfg.dt;
    }
    return steps;
}

std::vector<std::vector<bool>> nested_subsets(const ModelParams& params, const TrajectoryConfig& cfg) {
    const int N = params.num_sites;
    std::vector<int> order = cfg.site_order;
    if (order.empty()) {
        order.resize(N);
        std::iota(order.begin(), order.end(), 0);
    }
    std::vector<std::vector<bool>> out(N + 1, std::vector<bool>(N, false));
    for (int n = 1; n <= N; ++n) {
        out[n] = out[n - 1];
        out[n][order[n - 1]] = true;
    }
    return out;
}

TrajectoryRecord run_one(const ModelParams& params, const TrajectoryConfig& cfg, std::uint64_t traj_index,
                         InitialKind init, const std::vector<ComplexMatrix>& products,
                         const std::vector<long>& steps, const std::vector<double>& times,
                         const std::vector<std::vector<bool>>& subsets) {
    std::mt19937_64 rng = trajectory_engine(cfg.seed, traj_index);
    ComplexMatrix sigma = initial_density(init, params, rng);
    const double p = measurement_probability(params, cfg.dt);
    const int N = params.num_sites;
    const int d = params.local_dim;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, N - 1);

    TrajectoryRecord rec;
    rec.times = times;
    auto record = [&]() {
        std::vector<double> row(N + 1);
        for (int n = 0; n <= N; ++n) row[n] = partial_purity(sigma, subsets[n], d);
        rec.purity.push_back(std::move(row));
    };

    std::size_t next = 0;
    const long last = steps.empty() ? 0 : steps.back();
    const cd minus_i(0.0, -1.0);
    for (long step = 0;; ++step) {
        while (next < steps.size() && steps[next] == step) {
            record();
            ++next;
        }
        if (step >= last) break;
        const ComplexMatrix a = sample_step_generator(rng, params, cfg.dt, products);
        const ComplexMatrix u = expm(minus_i * a);
        sigma = u * sigma * u.adjoint();
        if (p > 0.0 && unif(rng) < p) {
            const int site = pick(rng);
            const Eigen::VectorXcd psi = haar_state(rng, d);
            const Eigen::VectorXcd phi = haar_state(rng, d);
            apply_local(sigma, psi * phi.adjoint(), site, params);
        }
    }
    return rec;
}

} // namespace

TrajectoryRecord run_trajectory(const ModelParams& params, const TrajectoryConfig& cfg,
                                std::uint64_t traj_index, InitialKind init) {
    validate_trajectory_config(params, cfg);
    std::vector<double> times;
    const std::vector<long> steps = record_steps(cfg, times);
    return run_one(params, cfg, traj_index, init, pair_products(pauli_basis(params.local_dim)), steps, times,
                   nested_subsets(params, cfg));
}

MCEstimate estimate_purity(const ModelParams& params, const TrajectoryConfig& cfg, InitialKind init) {
    validate_trajectory_config(params, cfg);
    std::vector<double> times;
    const std::vector<long> steps = record_steps(cfg, times);
    const auto products = pair_products(pauli_basis(params.local_dim));
    const auto subsets = nested_subsets(params, cfg);
    const long n_traj = cfg.n_traj;
    const int N = params.num_sites;
    const std::size_t n_rec = times.size();

    // results[traj][k * (N+1) + n]
    std::vector<std::vector<double>> results(static_cast<std::size_t>(n_traj));
    const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(std::min<long>(n_traj, 256))));
    auto worker = [&](long begin, long end) {
        for (long i = begin; i < end; ++i) {
            const TrajectoryRecord rec = run_one(params, cfg, static_cast<std::uint64_t>(i), init, products,
                                                 steps, times, subsets);
            std::vector<double> flat;
            flat.reserve(n_rec * (N + 1));
            for (const auto& row : rec.purity) flat.insert(flat.end(), row.begin(), row.end());
            results[i] = std::move(flat);
        }
    };
    if (jobs == 1) {
        worker(0, n_traj);
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) {
            pool.emplace_back(worker, n_traj * j / jobs, n_traj * (j + 1) / jobs);
        }
        for (auto& t : pool) t.join();
    }

    // --- batch-means reduction in trajectory order ---
    const int B = cfg.n_batches;
    const std::size_t width = n_rec * (N + 1);
    std::vector<double> total(width, 0.0);
    std::vector<std::vector<double>> batch_mean(B, std::vector<double>(width, 0.0));
    for (int b = 0; b < B; ++b) {
        const long begin = n_traj * b / B;
        const long end = n_traj * (b + 1) / B;
        for (long i = begin; i < end; ++i) {
            for (std::size_t c = 0; c < width; ++c) {
                batch_mean[b][c] += results[i][c];
                total[c] += results[i][c];
            }
        }
        for (double& v : batch_mean[b]) v /= static_cast<double>(end - begin);
    }

    MCEstimate est;
    est.times = times;
    est.n_traj = n_traj;
    est.n_batches = B;
    for (std::size_t k = 0; k < n_rec; ++k) {
        std::vector<double> mean(N + 1), se(N + 1), ent(N + 1), ent_se(N + 1);
        const std::size_t c0 = k * (N + 1);
        for (int n = 0; n <= N; ++n) mean[n] = total[c0 + n] / static_cast<double>(n_traj);
        double bm0 = 0.0;
        for (int b = 0; b < B; ++b) bm0 += batch_mean[b][c0];
        bm0 /= B;
        for (int n = 0; n <= N; ++n) {
            double bmn = 0.0;
            for (int b = 0; b < B; ++b) bmn += batch_mean[b][c0 + n];
            bmn /= B;
            double var = 0.0, cov = 0.0;
            for (int b = 0; b < B; ++b) {
                const double dn = batch_mean[b][c0 + n] - bmn;
                const double d0 = batch_mean[b][c0] - bm0;
                var += dn * dn;
                cov += dn * d0;
            }
            var /= static_cast<double>(B) * (B - 1);
            cov /= static_cast<double>(B) * (B - 1);
            const double var0 = [&] {
                double v = 0.0;
                for (int b = 0; b < B; ++b) {
                    const double d0 = batch_mean[b][c0] - bm0;
                    v += d0 * d0;
                }
                return v / (static_cast<double>(B) * (B - 1));
            }();
            se[n] = std::sqrt(var);
            ent[n] = -std::log(mean[n] / mean[0]);
            const double rel = var / (mean[n] * mean[n]) + var0 / (mean[0] * mean[0]) -
                               2.0 * cov / (mean[n] * mean[0]);
            ent_se[n] = std::sqrt(std::max(rel, 0.0));
        }
        ent[0] = 0.0;
        ent_se[0] = 0.0;
        est.mean.push_back(std::move(mean));
        est.se.push_back(std::move(se));
        est.entropy.push_back(std::move(ent));
        est.entropy_se.push_back(std::move(ent_se));
    }
    return est;
}

} // namespace mipt
