// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include "relaycap/density.hpp"
#include "relaycap/marchenko_pastur.hpp"

namespace relaycap {

// Spectral law of I + alpha H1 H1^H in the large limit, eigenvalues
// x = 1 + alpha_bar y with y ~ MP(beta) and alpha_bar = M alpha. Continuous
// support [1 + ab a, 1 + ab b]; for beta < 1 an atom of mass (1-beta)+ at x=1.

// Below this the law is numerically a point mass at 1 (the quartic would be
// hopelessly ill-conditioned, and the spectral effect of alpha_bar is O(1e-7)).
constexpr double kAlphaBarFloor = 1e-7;

inline std::pair<double, double> m_alpha_support(double beta, double alpha_bar) {
    if (!(alpha_bar > 0.0))
        throw std::invalid_argument("m_alpha_support: alpha_bar must be positive");
    const auto [a, b] = mp_support(beta);
    return {1.0 + alpha_bar * a, 1.0 + alpha_bar * b};
}

/// Continuous part of the shifted-scaled MP density, (1/ab) f_MP((x-1)/ab).
inline double m_alpha_density(double x, double beta, double alpha_bar) {
    if (!(alpha_bar > 0.0))
        throw std::invalid_argument("m_alpha_density: alpha_bar must be positive");
    return mp_density((x - 1.0) / alpha_bar, beta) / alpha_bar;
}

/// Mass of the atom at x = 1 (null space of H1 H1^H when K < M).
inline double m_alpha_atom_at_one(double beta) { return mp_atom(beta); }

/// eta-transform of a sampled density: atom + int f(x)/(1 + psi x) dx.
inline double eta_numeric(const SpectralDensity& d, double psi) {
    if (psi < 0.0) throw std::invalid_argument("eta_numeric: psi must be nonnegative");
    double s = 0.0;
    for (std::size_t i = 1; i < d.grid.size(); ++i) {
        const double fa = d.values[i - 1] / (1.0 + psi * d.grid[i - 1]);
        const double fb = d.values[i] / (1.0 + psi * d.grid[i]);
        s += 0.5 * (fa + fb) * (d.grid[i] - d.grid[i - 1]);
    }
    return d.atom_at_zero + s;
}

/// eta-transform of the I + alpha H1 H1^H law, by quadrature against the MP
/// measure. Well-defined for complex psi away from the pole segment
/// [-1/hi, -1/lo]; this is the branch-free reference used for residual checks.
template <class T>
std::complex<double> eta_m_alpha(T psi, double beta, double alpha_bar,
                                 double rel_tol = 1e-12) {
    const std::complex<double> p(psi);
    if (alpha_bar < kAlphaBarFloor) return 1.0 / (1.0 + p);
    const std::complex<double> bulk = mp_expectation(
        [&](double y) { return 1.0 / (1.0 + p * (1.0 + alpha_bar * y)); }, beta, rel_tol);
    return mp_atom(beta) / (1.0 + p) + bulk;
}

/// Inverse eta-transform of I + alpha H1 H1^H on (0,1): the positive root of
///   ab x^2 psi^2 + x (ab x + 1 + ab beta - ab) psi + (x - 1) = 0,
/// evaluated without cancellation.
inline double inverse_eta_m_alpha(double x, double beta, double alpha_bar) {
    if (!(alpha_bar > 0.0))
        throw std::invalid_argument("inverse_eta_m_alpha: alpha_bar must be positive");
    if (!(x > 0.0) || !(x < 1.0))
        throw std::invalid_argument("inverse_eta_m_alpha: x must lie in (0,1)");
    const double t = alpha_bar * x + 1.0 + alpha_bar * (beta - 1.0);
    const double disc = t * t + 4.0 * alpha_bar * (1.0 - x);
    const double root = std::sqrt(disc);
    if (t >= 0.0) return 2.0 * (1.0 - x) / (x * (t + root));
    return (root - t) / (2.0 * alpha_bar * x);
}

/// d eta / d psi of the I + alpha H1 H1^H law at complex psi, by quadrature.
template <class T>
std::complex<double> eta_m_alpha_deriv(T psi, double beta, double alpha_bar,
                                       double rel_tol = 1e-11) {
    const std::complex<double> p(psi);
    const auto sq = [](std::complex<double> v) { return v * v; };
    if (alpha_bar < kAlphaBarFloor) return -1.0 / sq(1.0 + p);
    const std::complex<double> bulk = mp_expectation(
        [&](double y) {
            const double t = 1.0 + alpha_bar * y;
            return -t / sq(1.0 + p * t);
        },
        beta, rel_tol);
    return -mp_atom(beta) / sq(1.0 + p) + bulk;
}

/// S-transform of H2^H H2 / M: 1/(gamma + x).
inline double s_transform_n2(double x, double gamma) {
    const double d = gamma + x;
    if (std::abs(d) < 1e-300) throw std::invalid_argument("s_transform_n2: pole at x = -gamma");
    return 1.0 / d;
}

/// Inverse eta-transform of K_alpha/M via the multiplicative free convolution:
/// S-transform of N2/M at (x-1) times the inverse eta of the first-hop factor.
inline double inverse_eta_k_alpha(double x, double beta, double gamma, double alpha_bar) {
    return s_transform_n2(x - 1.0, gamma) * inverse_eta_m_alpha(x, beta, alpha_bar);
}

} // namespace relaycap
