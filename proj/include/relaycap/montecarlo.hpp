// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "relaycap/density.hpp"
#include "relaycap/errors.hpp"
#include "relaycap/linalg.hpp"
#include "relaycap/rng.hpp"
#include "relaycap/system_config.hpp"

namespace relaycap {

struct ChannelDims {
    int users = 1;          // K
    int relay_antennas = 1; // M
    int bs_antennas = 1;    // N
};

/// One i.i.d. Rayleigh draw of both hops: H1 is M x K, H2 is N x M,
/// entries CN(0,1).
struct ChannelPair {
    CMatrix h1;
    CMatrix h2;
    std::uint64_t seed = 0;
};

namespace detail {
inline void fill_cgauss(CMatrix& m, StreamRng& rng) {
    for (cplx& v : m.data) v = rng.next_cgauss();
}

/// Deterministic trial fan-out: results[i] depends on (seed, i) only, so the
/// reduction order is fixed regardless of thread schedule.
template <class F>
void run_trials(long trials, int jobs, F&& body) {
    if (jobs <= 1 || trials < 2) {
        for (long i = 0; i < trials; ++i) body(i);
        return;
    }
    std::atomic<long> next{0};
    auto worker = [&] {
        for (long i = next.fetch_add(1); i < trials; i = next.fetch_add(1)) body(i);
    };
    std::vector<std::thread> pool;
    const int n = std::min<long>(jobs, trials);
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}
} // namespace detail

inline ChannelPair sample_channel_pair(const ChannelDims& dims, std::uint64_t seed) {
    if (dims.users < 1 || dims.relay_antennas < 1 || dims.bs_antennas < 1)
        throw std::invalid_argument("sample_channel_pair: dimensions must be positive");
    ChannelPair p;
    p.seed = seed;
    p.h1 = CMatrix(dims.relay_antennas, dims.users);
    p.h2 = CMatrix(dims.bs_antennas, dims.relay_antennas);
    StreamRng rng(seed);
    detail::fill_cgauss(p.h1, rng);
    detail::fill_cgauss(p.h2, rng);
    return p;
}

/// Eigenvalues of K_alpha/M = H2^H H2 (I + alpha H1 H1^H) / M, computed on the
/// Hermitian similarity Mt^{1/2} (H2^H H2) Mt^{1/2} (same spectrum). Tiny
/// negative round-off is clamped to zero.
inline std::vector<double> eigenvalues_k_alpha(const ChannelPair& pair, double alpha) {
    if (alpha < 0.0) throw std::invalid_argument("eigenvalues_k_alpha: alpha must be >= 0");
    const int m = pair.h1.rows;
    const CMatrix n2 = gram_aha(pair.h2); // H2^H H2, M x M

    CMatrix sym;
    if (alpha == 0.0) {
        sym = n2;
    } else {
        const CMatrix n1 = gram_aah(pair.h1); // H1 H1^H, M x M
        const EighResult e1 = jacobi_eigh(n1);
        const CMatrix root = apply_spectral(
            e1, [alpha](double lam) { return std::sqrt(std::max(0.0, 1.0 + alpha * lam)); });
        sym = multiply(root, multiply(n2, root));
        hermitize(sym);
    }

    EighResult ek = jacobi_eigh(sym);
    std::vector<double> out(ek.eigenvalues.size());
    double scale = 0.0;
    for (const double v : ek.eigenvalues) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < out.size(); ++i) {
        double v = ek.eigenvalues[i] / m;
        if (v < 0.0 && v > -1e-10 * std::max(1.0, scale / m)) v = 0.0;
        out[i] = v;
    }
    return out;
}

/// Pooled eigenvalue draws of K_alpha/M across independent trials.
struct EigenSampleSet {
    std::vector<double> values;
    long trials = 0;
    ChannelDims dims;
    double alpha_bar = 0.0; // M * alpha
};

inline EigenSampleSet sample_eigenvalues(const ChannelDims& dims, double alpha, long trials,
                                         std::uint64_t seed, int jobs = 1) {
    if (trials < 1) throw std::invalid_argument("sample_eigenvalues: trials must be >= 1");
    EigenSampleSet set;
    set.trials = trials;
    set.dims = dims;
    set.alpha_bar = alpha * dims.relay_antennas;
    set.values.resize(static_cast<std::size_t>(trials) * dims.relay_antennas);
    detail::run_trials(trials, jobs, [&](long i) {
        const ChannelPair pair = sample_channel_pair(dims, StreamRng::derive_key(seed, i));
        const auto eig = eigenvalues_k_alpha(pair, alpha);
        std::copy(eig.begin(), eig.end(),
                  set.values.begin() + static_cast<std::size_t>(i) * dims.relay_antennas);
    });
    return set;
}

/// Area-normalized histogram over [min, max] extended by 5%. Returned with
/// zero-padded end knots so the trapezoid mass equals the bin mass exactly.
inline SpectralDensity empirical_density(const EigenSampleSet& samples, int bins) {
    if (bins < 10) throw std::invalid_argument("empirical_density: need at least 10 bins");
    if (samples.values.empty()) throw std::invalid_argument("empirical_density: no samples");
    const auto [mn_it, mx_it] = std::minmax_element(samples.values.begin(), samples.values.end());
    double lo = *mn_it, hi = *mx_it;
    const double span = std::max(hi - lo, 1e-9 * std::max(1.0, std::abs(hi)));
    lo -= 0.025 * span;
    hi += 0.025 * span;

    std::vector<double> counts(bins, 0.0);
    const double width = (hi - lo) / bins;
    for (const double v : samples.values) {
        int b = static_cast<int>((v - lo) / width);
        b = std::clamp(b, 0, bins - 1);
        counts[b] += 1.0;
    }

    SpectralDensity d;
    d.grid.resize(bins + 2);
    d.values.resize(bins + 2);
    d.grid.front() = lo - 0.5 * width;
    d.values.front() = 0.0;
    const double norm = static_cast<double>(samples.values.size()) * width;
    for (int b = 0; b < bins; ++b) {
        d.grid[b + 1] = lo + (b + 0.5) * width;
        d.values[b + 1] = counts[b] / norm;
    }
    d.grid.back() = hi + 0.5 * width;
    d.values.back() = 0.0;
    d.support_lo = *mn_it;
    d.support_hi = *mx_it;
    d.atom_at_zero = 0.0;
    d.normalization_defect = std::abs(1.0 - total_mass(d));
    return d;
}

/// Empirical validation of the relay input covariance Q2 = mu_tilde nu K I_M
/// and the power budget E[||sqrt(nu) y1||^2] <= alpha.
struct FirstHopReport {
    CMatrix covariance;        // empirical nu E[y1 y1^H]
    double expected_diag = 0;  // mu_tilde nu K
    double max_diag_rel_err = 0;
    double max_offdiag_abs = 0;
    double offdiag_limit = 0;  // 3x standard error of an off-diagonal entry
    double total_power_ratio = 0; // tr(cov) / alpha
    long trials = 0;
};

inline FirstHopReport first_hop_power_check(const SystemConfig& raw, long trials,
                                            std::uint64_t seed) {
    if (raw.nu_mode != NuMode::from_alpha)
        throw std::invalid_argument("first_hop_power_check: requires from-alpha mode");
    if (trials < 2) throw std::invalid_argument("first_hop_power_check: trials must be >= 2");
    const SystemConfig cfg = resolve_nu(raw);
    const int k = cfg.users, m = cfg.relay_antennas;
    const double sig_x = std::sqrt(cfg.mu);
    const double sig_t1 = cfg.delta_t1 * std::sqrt(cfg.mu);
    const double sig_r1 = cfg.delta_r1 * std::sqrt(cfg.mu * k); // covariance dr1^2 rho I_M

    CMatrix acc(m, m);
    std::vector<cplx> y(m);
    StreamRng rng(seed, 0x1f);
    for (long t = 0; t < trials; ++t) {
        CMatrix h1(m, k);
        detail::fill_cgauss(h1, rng);
        std::vector<cplx> x(k);
        for (int j = 0; j < k; ++j)
            x[j] = sig_x * rng.next_cgauss() + sig_t1 * rng.next_cgauss();
        for (int i = 0; i < m; ++i) {
            cplx s{};
            for (int j = 0; j < k; ++j) s += h1(i, j) * x[j];
            y[i] = s + sig_r1 * rng.next_cgauss() + rng.next_cgauss();
        }
        for (int i = 0; i < m; ++i)
            for (int j = i; j < m; ++j) acc(i, j) += y[i] * std::conj(y[j]);
    }

    FirstHopReport rep;
    rep.trials = trials;
    rep.covariance = CMatrix(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            const cplx v = cfg.nu * acc(i, j) / static_cast<double>(trials);
            rep.covariance(i, j) = v;
            rep.covariance(j, i) = std::conj(v);
        }

    rep.expected_diag = cfg.mu_tilde() * cfg.nu * k;
    double trace = 0.0;
    for (int i = 0; i < m; ++i) {
        const double dia = rep.covariance(i, i).real();
        trace += dia;
        rep.max_diag_rel_err =
            std::max(rep.max_diag_rel_err, std::abs(dia - rep.expected_diag) / rep.expected_diag);
        for (int j = i + 1; j < m; ++j)
            rep.max_offdiag_abs = std::max(rep.max_offdiag_abs, std::abs(rep.covariance(i, j)));
    }
    // Var(nu y_i conj(y_j)) = (nu E|y|^2)^2 for i != j
    rep.offdiag_limit = 3.0 * rep.expected_diag / std::sqrt(static_cast<double>(trials));
    rep.total_power_ratio = trace / cfg.alpha;
    return rep;
}

} // namespace relaycap
