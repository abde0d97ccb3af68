// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace relaycap {

/// Sampled spectral density: nonnegative values on an ascending grid, plus an
/// optional Dirac mass at zero. The continuous part integrates (trapezoid) to
/// 1 - atom_at_zero up to normalization_defect.
struct SpectralDensity {
    std::vector<double> grid;
    std::vector<double> values;
    double support_lo = 0.0;
    double support_hi = 0.0;
    double atom_at_zero = 0.0;
    double normalization_defect = 0.0; // |1 - (atom + trapezoid mass)|
    double inversion_defect = 0.0;     // L1 gap between the two Poisson offsets
};

inline double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("trapezoid: size mismatch");
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

inline double continuous_mass(const SpectralDensity& d) { return trapezoid(d.grid, d.values); }

inline double total_mass(const SpectralDensity& d) { return d.atom_at_zero + continuous_mass(d); }

/// First moment; the atom at zero contributes nothing.
inline double first_moment(const SpectralDensity& d) {
    double s = 0.0;
    for (std::size_t i = 1; i < d.grid.size(); ++i) {
        const double fa = d.grid[i - 1] * d.values[i - 1];
        const double fb = d.grid[i] * d.values[i];
        s += 0.5 * (fa + fb) * (d.grid[i] - d.grid[i - 1]);
    }
    return s;
}

/// CDF samples at the grid knots (atom included), for distribution comparisons.
inline std::vector<double> cumulative(const SpectralDensity& d) {
    std::vector<double> c(d.grid.size());
    double acc = d.atom_at_zero;
    c[0] = acc;
    for (std::size_t i = 1; i < d.grid.size(); ++i) {
        acc += 0.5 * (d.values[i] + d.values[i - 1]) * (d.grid[i] - d.grid[i - 1]);
        c[i] = acc;
    }
    return c;
}

namespace detail {
inline double cdf_interp(const std::vector<double>& grid, const std::vector<double>& cum,
                         double x) {
    if (grid.empty()) return 0.0;
    if (x <= grid.front()) return (x < 0.0) ? 0.0 : cum.front();
    if (x >= grid.back()) return cum.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin());
    const double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return cum[i - 1] + t * (cum[i] - cum[i - 1]);
}
} // namespace detail

/// Kolmogorov-Smirnov distance between two sampled densities, both normalized
/// to their own total mass so shape is compared rather than quadrature defect.
inline double ks_distance(const SpectralDensity& a, const SpectralDensity& b) {
    const auto ca = cumulative(a);
    const auto cb = cumulative(b);
    const double ma = ca.empty() ? 1.0 : std::max(ca.back(), 1e-300);
    const double mb = cb.empty() ? 1.0 : std::max(cb.back(), 1e-300);

    std::vector<double> xs;
    xs.reserve(2 * (a.grid.size() + b.grid.size()));
    auto push_with_midpoints = [&xs](const std::vector<double>& g) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            xs.push_back(g[i]);
            if (i + 1 < g.size()) xs.push_back(0.5 * (g[i] + g[i + 1]));
        }
    };
    push_with_midpoints(a.grid);
    push_with_midpoints(b.grid);
    std::sort(xs.begin(), xs.end());

    double ks = std::abs(a.atom_at_zero / ma - b.atom_at_zero / mb);
    for (const double x : xs) {
        const double fa = detail::cdf_interp(a.grid, ca, x) / ma;
        const double fb = detail::cdf_interp(b.grid, cb, x) / mb;
        ks = std::max(ks, std::abs(fa - fb));
    }
    return ks;
}

} // namespace relaycap
