// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace relaycap {

// Marchenko-Pastur law with dimension ratio r (the spectrum of H H^H / M for
// an M x K standard complex Gaussian H, r = K/M): continuous density
// sqrt((x-a)+(b-x)+)/(2 pi x) on [a, b] with a = (1-sqrt r)^2, b = (1+sqrt r)^2,
// plus an atom of mass (1-r)+ at zero. Total mass 1, mean r.

inline std::pair<double, double> mp_support(double ratio) {
    if (!(ratio > 0.0)) throw std::invalid_argument("mp_support: ratio must be positive");
    const double s = std::sqrt(ratio);
    return {(1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s)};
}

/// Continuous part of the MP density; zero outside the open support interval.
inline double mp_density(double x, double ratio) {
    const auto [a, b] = mp_support(ratio);
    if (x <= a || x >= b) return 0.0;
    return std::sqrt((x - a) * (b - x)) / (2.0 * std::numbers::pi * x);
}

/// Dirac mass at zero: (1 - ratio)+.
inline double mp_atom(double ratio) {
    if (!(ratio > 0.0)) throw std::invalid_argument("mp_atom: ratio must be positive");
    return std::max(0.0, 1.0 - ratio);
}

/// Expectation of a kernel against the continuous MP part, via the
/// trigonometric parametrization y(t) = 1 + r + 2 sqrt(r) cos t. The
/// transformed integrand is smooth for every r > 0 (including r = 1), so the
/// trapezoid rule converges geometrically; panels double until rel_tol.
template <class F>
auto mp_expectation(F&& kernel, double ratio, double rel_tol = 1e-12, int max_panels = 32768)
    -> decltype(kernel(1.0)) {
    using R = decltype(kernel(1.0));
    if (!(ratio > 0.0)) throw std::invalid_argument("mp_expectation: ratio must be positive");
    const double sr = std::sqrt(ratio);
    const double edge = (1.0 - sr) * (1.0 - sr);

    auto integrand = [&](double theta) -> R {
        const double half = 0.5 * theta;
        const double s2 = std::sin(half) * std::sin(half);
        const double c2 = std::cos(half) * std::cos(half);
        const double y = edge + 4.0 * sr * c2; // = 1 + r + 2 sqrt(r) cos(theta)
        // sin^2(theta)/y, written to stay finite at theta = pi when r = 1
        const double weight = (y > 0.0) ? 4.0 * s2 * c2 / y : s2;
        return kernel(y) * weight;
    };

    const double pi = std::numbers::pi;
    auto eval = [&](int n) -> R {
        const double h = pi / n;
        R sum = 0.5 * (integrand(0.0) + integrand(pi));
        for (int k = 1; k < n; ++k) sum += integrand(k * h);
        return sum * (h * 2.0 * ratio / pi);
    };

    int n = 256;
    R prev = eval(n);
    for (n *= 2; n <= max_panels; n *= 2) {
        const R cur = eval(n);
        if (std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

/// Closed-form eta-transform of MP(r): the root of
///   s eta^2 + (1 + s(r-1)) eta - 1 = 0
/// with eta(0) = 1, written in a cancellation-free form. Valid for s >= 0.
inline double mp_eta(double s, double ratio) {
    if (!(ratio > 0.0)) throw std::invalid_argument("mp_eta: ratio must be positive");
    if (s < 0.0) throw std::invalid_argument("mp_eta: argument must be nonnegative");
    const double b = 1.0 + s * (ratio - 1.0);
    return 2.0 / (b + std::sqrt(b * b + 4.0 * s));
}

/// Closed-form Stieltjes transform S(z) = int f(x)/(x-z) dx of MP(r):
/// root of z S^2 + (z + 1 - r) S + 1 = 0 in the upper half-plane.
inline std::complex<double> mp_stieltjes(std::complex<double> z, double ratio) {
    if (!(ratio > 0.0)) throw std::invalid_argument("mp_stieltjes: ratio must be positive");
    const std::complex<double> bq = z + (1.0 - ratio);
    const std::complex<double> disc = std::sqrt(bq * bq - 4.0 * z);
    const std::complex<double> r1 = (-bq + disc) / (2.0 * z);
    const std::complex<double> r2 = (-bq - disc) / (2.0 * z);
    if (z.imag() > 0.0) return (r1.imag() > r2.imag()) ? r1 : r2;
    // real axis: branch with S ~ -1/z at infinity, S real off-support
    return (std::abs(r1 + 1.0 / z) < std::abs(r2 + 1.0 / z)) ? r1 : r2;
}

} // namespace relaycap
