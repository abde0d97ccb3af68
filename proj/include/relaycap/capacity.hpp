// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <vector>

#include "relaycap/density.hpp"
#include "relaycap/linalg.hpp"
#include "relaycap/montecarlo.hpp"
#include "relaycap/stieltjes.hpp"
#include "relaycap/system_config.hpp"

namespace relaycap {

enum class CapacityMethod { asymptotic, montecarlo };

/// Ergodic capacity per receive antenna, in nats, split into the two log-det
/// terms c = c1 - c2.
struct CapacityResult {
    double c1 = 0.0;
    double c2 = 0.0;
    double c = 0.0;
    CapacityMethod method = CapacityMethod::asymptotic;
    long trials = 0;                                                  // MC only
    double ci_halfwidth = std::numeric_limits<double>::quiet_NaN();   // MC only, 95%
    double quadrature_defect = 0.0;                                   // asymptotic only
};

/// int ln(1 + scale x) f(x) dx over the sampled density. The continuous part
/// is renormalized to mass (1 - atom) first; first-order mass defects dominate
/// the integral error otherwise. The atom at zero contributes ln(1) = 0.
inline double shannon_integral(const SpectralDensity& d, double scale) {
    if (!(scale >= 0.0)) throw std::invalid_argument("shannon_integral: scale must be >= 0");
    if (scale == 0.0) return 0.0;
    const double mass = continuous_mass(d);
    if (!(mass > 0.0)) return 0.0;
    const double w = (1.0 - d.atom_at_zero) / mass;
    double s = 0.0;
    for (std::size_t i = 1; i < d.grid.size(); ++i) {
        const double fa = std::log1p(scale * d.grid[i - 1]) * d.values[i - 1];
        const double fb = std::log1p(scale * d.grid[i]) * d.values[i];
        s += 0.5 * (fa + fb) * (d.grid[i] - d.grid[i - 1]);
    }
    return w * s;
}

/// Large-system capacity: (1/gamma) [ V(K_{f1}/M) - V(K_{f2/f3}/M) ] with the
/// Shannon kernel ln(1 + f3 M x), each density from the quartic Stieltjes
/// inversion (the second branch collapses to plain MP(gamma) when delta_t1=0).
inline CapacityResult asymptotic_capacity(const SystemConfig& cfg, std::size_t grid_points = 2048) {
    const Coefficients co = derive_coefficients(cfg);
    const double scale = co.f3 * cfg.relay_antennas;

    const SpectralDensity d1 = aepdf_k_alpha_auto(co.beta, co.gamma, co.alpha_bar_c1, grid_points);
    const SpectralDensity d2 = aepdf_k_alpha_auto(co.beta, co.gamma, co.alpha_bar_c2, grid_points);

    CapacityResult r;
    r.method = CapacityMethod::asymptotic;
    r.c1 = shannon_integral(d1, scale) / co.gamma;
    r.c2 = shannon_integral(d2, scale) / co.gamma;
    r.c = r.c1 - r.c2;
    r.quadrature_defect =
        std::max({d1.normalization_defect, d2.normalization_defect, d1.inversion_defect,
                  d2.inversion_defect});
    if (r.quadrature_defect > 1e-2)
        std::cerr << "warning: asymptotic_capacity: density quadrature defect "
                  << r.quadrature_defect << " exceeds 1e-2\n";
    return r;
}

namespace detail {
struct LogDetTerms {
    double c1 = 0.0;
    double c2 = 0.0;
};

/// ln det(Phi + f4 W W^H) and ln det(Phi) with W = H2 H1 and
/// Phi = f2 W W^H + f3 H2 H2^H + I_N, each via Cholesky, normalized by N.
inline LogDetTerms logdet_terms(const CMatrix& h1, const CMatrix& h2, const Coefficients& co) {
    const int n = h2.rows;
    const CMatrix w = multiply(h2, h1);
    const CMatrix ww = gram_aah(w);
    const CMatrix g2 = gram_aah(h2);

    CMatrix phi(n, n);
    CMatrix phi_sig(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx base = co.f2 * ww(i, j) + co.f3 * g2(i, j) + (i == j ? 1.0 : 0.0);
            phi(i, j) = base;
            phi_sig(i, j) = base + co.f4 * ww(i, j);
        }
    hermitize(phi);
    hermitize(phi_sig);

    LogDetTerms t;
    t.c1 = cholesky_logdet(phi_sig) / n;
    t.c2 = cholesky_logdet(phi) / n;
    return t;
}
} // namespace detail

/// Per-realization capacity (1/N) ln det(I_N + f4 H2 H1 H1^H H2^H Phi^-1),
/// computed as a difference of two Cholesky log-dets; Phi is never inverted.
inline double logdet_capacity_sample(const CMatrix& h1, const CMatrix& h2,
                                     const Coefficients& co) {
    const auto t = detail::logdet_terms(h1, h2, co);
    return t.c1 - t.c2;
}

/// Same quantity through the M x M determinant identities
/// (1/N)[ln det(I_M + f3 H2^H H2 (I + f1 H1 H1^H)) - ln det(.. f2/f3 ..)];
/// used as the algebraic cross-check of the N x N route.
inline double logdet_capacity_two_term(const CMatrix& h1, const CMatrix& h2,
                                       const Coefficients& co) {
    const int n = h2.rows;
    const CMatrix n2 = gram_aha(h2);
    const CMatrix n1 = gram_aah(h1);
    const int m = n1.rows;

    auto term = [&](double a) {
        CMatrix mt = CMatrix::identity(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) mt(i, j) += a * n1(i, j);
        hermitize(mt);
        // ln det(I + f3 N2 Mt) = ln det(I + f3 L^H N2 L) with Mt = L L^H
        const CMatrix l = cholesky_lower(mt);
        const CMatrix inner = multiply(conj_transpose(l), multiply(n2, l));
        CMatrix arg = CMatrix::identity(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) arg(i, j) += co.f3 * inner(i, j);
        hermitize(arg);
        return cholesky_logdet(arg);
    };

    return (term(co.f1) - term(co.f2 / co.f3)) / n;
}

/// Sample mean of logdet_capacity_sample over i.i.d. channel draws. Trial i
/// uses the stream derived from (seed, i), so results are identical for any
/// thread count; ci_halfwidth is the 95% normal interval (NaN for trials < 2).
inline CapacityResult mc_ergodic_capacity(const SystemConfig& raw, long trials,
                                          std::uint64_t seed, int jobs = 1) {
    if (trials < 1) throw std::invalid_argument("mc_ergodic_capacity: trials must be >= 1");
    const SystemConfig cfg = resolve_nu(raw);
    const Coefficients co = derive_coefficients(cfg);
    const ChannelDims dims{cfg.users, cfg.relay_antennas, cfg.bs_antennas};

    std::vector<detail::LogDetTerms> terms(trials);
    detail::run_trials(trials, jobs, [&](long i) {
        const ChannelPair pair = sample_channel_pair(dims, StreamRng::derive_key(seed, i));
        terms[i] = detail::logdet_terms(pair.h1, pair.h2, co);
    });

    double mean_c1 = 0.0, mean_c2 = 0.0, mean = 0.0, m2 = 0.0;
    for (long i = 0; i < trials; ++i) {
        const double c = terms[i].c1 - terms[i].c2;
        const double delta = c - mean;
        mean += delta / (i + 1);
        m2 += delta * (c - mean);
        mean_c1 += (terms[i].c1 - mean_c1) / (i + 1);
        mean_c2 += (terms[i].c2 - mean_c2) / (i + 1);
    }

    CapacityResult r;
    r.method = CapacityMethod::montecarlo;
    r.trials = trials;
    r.c1 = mean_c1;
    r.c2 = mean_c2;
    r.c = mean;
    if (trials >= 2) {
        const double var = m2 / (trials - 1);
        r.ci_halfwidth = 1.96 * std::sqrt(var / trials);
    }
    return r;
}

} // namespace relaycap
