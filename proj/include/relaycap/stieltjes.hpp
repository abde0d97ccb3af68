// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "relaycap/density.hpp"
#include "relaycap/errors.hpp"
#include "relaycap/free_transforms.hpp"
#include "relaycap/marchenko_pastur.hpp"

namespace relaycap {

/// One evaluation of the Stieltjes transform of K_alpha/M.
struct StieltjesSample {
    std::complex<double> z;
    std::array<std::complex<double>, 4> roots; // NaN-padded in the degenerate case
    int selected = -1;
    std::complex<double> value;
    double residual = std::numeric_limits<double>::infinity();
};

/// Coefficients c4..c0 of the quartic in S obtained by substituting the
/// closed-form inverse eta-transforms into the Stieltjes fixed point
/// z eta^-1(-zS) + 1 = 0 and rationalizing the single square root.
inline std::array<std::complex<double>, 5> quartic_coefficients(std::complex<double> z,
                                                                double beta, double gamma,
                                                                double alpha_bar) {
    const double ab = alpha_bar;
    const double g = gamma - 1.0;
    const double c = 1.0 + ab * (beta - 1.0);
    const std::complex<double> z2 = z * z;
    return {
        ab * ab * z2,                              // S^4
        ab * ab * z * (z - 2.0 * g),               // S^3
        ab * ab * g * g - ab * z * (ab * g + c),   // S^2
        ab * (c * g - z),                          // S^1
        std::complex<double>(-ab, 0.0),            // S^0
    };
}

namespace detail {

/// Durand-Kerner iteration with Newton polish; adequate for quartics with
/// well-separated or moderately clustered roots.
inline std::array<std::complex<double>, 4> solve_quartic(
    const std::array<std::complex<double>, 5>& c) {
    using cd = std::complex<double>;
    if (std::abs(c[0]) == 0.0) throw numerical_error("solve_quartic: leading coefficient is zero");
    std::array<cd, 4> a; // monic: S^4 + a[0] S^3 + a[1] S^2 + a[2] S + a[3]
    for (int i = 0; i < 4; ++i) a[i] = c[i + 1] / c[0];

    auto eval = [&](cd x) { return (((x + a[0]) * x + a[1]) * x + a[2]) * x + a[3]; };
    auto deriv = [&](cd x) {
        return ((4.0 * x + 3.0 * a[0]) * x + 2.0 * a[1]) * x + a[2];
    };

    double radius = 0.0;
    for (const cd& ai : a) radius = std::max(radius, std::abs(ai));
    radius = 1.0 + radius;
    const cd seed(0.4, 0.9);
    std::array<cd, 4> x;
    cd s = seed;
    for (int i = 0; i < 4; ++i) {
        x[i] = radius * s;
        s *= seed;
    }

    for (int iter = 0; iter < 600; ++iter) {
        double worst = 0.0;
        for (int i = 0; i < 4; ++i) {
            cd denom = 1.0;
            for (int j = 0; j < 4; ++j)
                if (j != i) denom *= (x[i] - x[j]);
            if (std::abs(denom) == 0.0) {
                x[i] += radius * 1e-8 * cd(1.0, 1.0);
                continue;
            }
            const cd delta = eval(x[i]) / denom;
            x[i] -= delta;
            worst = std::max(worst, std::abs(delta) / (1.0 + std::abs(x[i])));
        }
        if (worst < 1e-15) break;
    }
    for (int i = 0; i < 4; ++i) { // Newton polish
        for (int k = 0; k < 3; ++k) {
            const cd d = deriv(x[i]);
            if (std::abs(d) == 0.0) break;
            x[i] -= eval(x[i]) / d;
        }
    }
    return x;
}

/// |z eta^-1_K(-zS) + 1|, evaluated without choosing a square-root branch:
/// the fixed point requires eta_M(psi*) = w at psi* = -(gamma-1+w)/z, so the
/// single-valued quadrature eta is checked forward at psi* and the defect is
/// converted to the eta-inverse scale through d eta/d psi. This stays exact
/// where the algebraic eta inverse is two-valued (rationalization makes every
/// quartic root satisfy one sheet; only the honest transform tells them apart).
inline double fixed_point_residual(std::complex<double> z, std::complex<double> s, double beta,
                                   double gamma, double alpha_bar) {
    const std::complex<double> w = -z * s;
    if (std::abs(w) == 0.0) return std::numeric_limits<double>::infinity();
    const std::complex<double> sigma_inv = gamma - 1.0 + w;
    const std::complex<double> psi_star = -sigma_inv / z;
    const std::complex<double> defect = eta_m_alpha(psi_star, beta, alpha_bar, 1e-11) - w;
    const std::complex<double> slope = eta_m_alpha_deriv(psi_star, beta, alpha_bar, 1e-9);
    if (!(std::abs(slope) > 1e-30)) return std::abs(defect);
    return std::abs(z * (defect / slope) / sigma_inv);
}

} // namespace detail

/// Stieltjes transform of K_alpha/M at z (Im z > 0). Solves the quartic (or
/// the Marchenko-Pastur quadratic when alpha_bar ~ 0), keeps roots in the
/// upper half-plane, and selects by fixed-point residual; near-ties are broken
/// by continuity with the previous sample.
inline StieltjesSample stieltjes_k_alpha(
    std::complex<double> z, double beta, double gamma, double alpha_bar,
    std::optional<std::complex<double>> previous = std::nullopt,
    double residual_limit = 1e-8) {
    using cd = std::complex<double>;
    if (!(z.imag() > 0.0))
        throw std::invalid_argument("stieltjes_k_alpha: Im z must be positive");

    StieltjesSample out;
    out.z = z;
    const double qnan = std::numeric_limits<double>::quiet_NaN();
    out.roots.fill(cd(qnan, qnan));

    int count = 0;
    if (alpha_bar < kAlphaBarFloor) {
        // K_0/M = H2^H H2 / M: plain MP(gamma) Stieltjes quadratic
        const cd bq = z + (1.0 - gamma);
        const cd disc = std::sqrt(bq * bq - 4.0 * z);
        out.roots[0] = (-bq + disc) / (2.0 * z);
        out.roots[1] = (-bq - disc) / (2.0 * z);
        count = 2;
    } else {
        out.roots = detail::solve_quartic(quartic_coefficients(z, beta, gamma, alpha_bar));
        count = 4;
    }

    // Herglotz constraints for a measure on [0, inf): Im S > 0 and Im(zS) > 0
    // (the latter because x dmu(x) is again a positive measure). Both are
    // needed: rationalization introduces roots that pass the residual test on
    // the other branch of the eta inverse.
    auto admissible = [&](const cd& s, int level) {
        if (level >= 2) return s.imag() > 0.0 && (z * s).imag() > 0.0;
        if (level == 1) return s.imag() > 0.0;
        return true;
    };
    int level = 2;
    for (; level > 0; --level) {
        bool any = false;
        for (int i = 0; i < count; ++i) any = any || admissible(out.roots[i], level);
        if (any) break;
    }

    std::array<double, 4> residual;
    residual.fill(std::numeric_limits<double>::infinity());
    for (int i = 0; i < count; ++i) {
        if (!admissible(out.roots[i], level)) continue;
        residual[i] = detail::fixed_point_residual(z, out.roots[i], beta, gamma,
                                                   alpha_bar < kAlphaBarFloor ? 0.0 : alpha_bar);
    }

    int best = -1;
    for (int i = 0; i < count; ++i)
        if (best < 0 || residual[i] < residual[best]) best = i;

    if (best < 0 || !(residual[best] < residual_limit)) {
        std::ostringstream msg;
        msg << "stieltjes_k_alpha: no root satisfies the fixed point at z = (" << z.real()
            << ", " << z.imag() << "), best residual "
            << (best < 0 ? qnan : residual[best]);
        throw no_valid_root_error(msg.str());
    }

    if (previous) { // continuity tie-break among near-equal residuals
        const double tie = std::max(10.0 * residual[best], 1e-12);
        for (int i = 0; i < count; ++i) {
            if (i == best || !(residual[i] <= tie)) continue;
            if (std::abs(out.roots[i] - *previous) < std::abs(out.roots[best] - *previous))
                best = i;
        }
    }

    out.selected = best;
    out.value = out.roots[best];
    out.residual = residual[best];
    return out;
}

namespace detail {

inline StieltjesSample stieltjes_with_retry(double x, double y_eps, double beta, double gamma,
                                            double alpha_bar,
                                            std::optional<std::complex<double>> prev) {
    for (int k = 0; k < 3; ++k) {
        try {
            return stieltjes_k_alpha({x, y_eps * (1 << k)}, beta, gamma, alpha_bar, prev);
        } catch (const no_valid_root_error&) {
            if (k == 2) throw;
        }
    }
    throw no_valid_root_error("unreachable");
}

/// The (1-gamma)+ atom at zero appears in Im S as its Poisson kernel; remove
/// it so the sampled values carry the continuous part only.
inline double continuous_part(std::complex<double> s, double x, double y, double atom) {
    double v = s.imag();
    if (atom > 0.0) v -= atom * y / (x * x + y * y);
    return std::max(0.0, v) / std::numbers::pi;
}

} // namespace detail

/// Stieltjes inversion on a fixed grid: density = Im S(x + i y)/pi, evaluated
/// at y_eps and y_eps/2 as a convergence check; the finer offset is kept.
/// The atom at zero carries the rank deficiency (1 - gamma)+ of H2^H H2.
inline SpectralDensity aepdf_k_alpha(const std::vector<double>& grid, double beta, double gamma,
                                     double alpha_bar, double y_eps) {
    if (grid.size() < 2) throw std::invalid_argument("aepdf_k_alpha: grid too small");
    if (!(y_eps > 0.0)) throw std::invalid_argument("aepdf_k_alpha: y_eps must be positive");

    const std::size_t n = grid.size();
    const double atom = std::max(0.0, 1.0 - gamma);
    std::vector<double> coarse(n), fine(n);
    std::optional<std::complex<double>> prev_c, prev_f;
    for (std::size_t i = 0; i < n; ++i) {
        const auto sc = detail::stieltjes_with_retry(grid[i], y_eps, beta, gamma, alpha_bar, prev_c);
        const auto sf =
            detail::stieltjes_with_retry(grid[i], 0.5 * y_eps, beta, gamma, alpha_bar, prev_f);
        prev_c = sc.value;
        prev_f = sf.value;
        coarse[i] = detail::continuous_part(sc.value, grid[i], y_eps, atom);
        fine[i] = detail::continuous_part(sf.value, grid[i], 0.5 * y_eps, atom);
    }

    SpectralDensity d;
    d.grid = grid;
    d.values = std::move(fine);
    d.atom_at_zero = atom;

    double vmax = 0.0;
    for (const double v : d.values) vmax = std::max(vmax, v);
    const double thr = 1e-4 * vmax;
    std::size_t lo = 0, hi = n - 1;
    while (lo < n && d.values[lo] <= thr) ++lo;
    while (hi > 0 && d.values[hi] <= thr) --hi;
    if (lo >= hi) {
        d.support_lo = grid.front();
        d.support_hi = grid.back();
    } else {
        d.support_lo = grid[lo];
        d.support_hi = grid[hi];
    }

    std::vector<double> conv(n);
    for (std::size_t i = 0; i < n; ++i) conv[i] = std::abs(coarse[i] - d.values[i]);
    d.normalization_defect = std::abs(1.0 - total_mass(d));
    d.inversion_defect = trapezoid(d.grid, conv);
    return d;
}

/// Support detection + uniform grid wrapper. The window starts from the
/// operator-norm bounds of the free product, is narrowed by a probe pass, and
/// the final 2048-point grid spans 1.1x the detected support with
/// y_eps = 1e-4 of the detected support width.
inline SpectralDensity aepdf_k_alpha_auto(double beta, double gamma, double alpha_bar,
                                          std::size_t points = 2048) {
    const auto [ag, bg] = mp_support(gamma);
    double lo_bound, hi_bound;
    if (alpha_bar < kAlphaBarFloor) {
        lo_bound = ag;
        hi_bound = bg;
    } else {
        const auto [ab_mp, bb_mp] = mp_support(beta);
        const double m_lo = 1.0 + alpha_bar * (beta < 1.0 ? 0.0 : ab_mp);
        const double m_hi = 1.0 + alpha_bar * bb_mp;
        lo_bound = ag * m_lo;
        hi_bound = bg * m_hi;
    }

    const std::size_t probe_n = 1024;
    const double probe_lo = std::max(0.75 * lo_bound, 1e-12);
    const double probe_hi = 1.05 * hi_bound + 1e-12;
    const double probe_y = 1e-4 * (probe_hi - probe_lo);
    const double atom = std::max(0.0, 1.0 - gamma);
    std::vector<double> pd(probe_n);
    std::complex<double> prev_value{};
    bool has_prev = false;
    for (std::size_t i = 0; i < probe_n; ++i) {
        const double x = probe_lo + (probe_hi - probe_lo) * i / (probe_n - 1);
        try {
            const auto s = stieltjes_k_alpha(
                {x, probe_y}, beta, gamma, alpha_bar,
                has_prev ? std::optional<std::complex<double>>(prev_value) : std::nullopt);
            prev_value = s.value;
            has_prev = true;
            pd[i] = detail::continuous_part(s.value, x, probe_y, atom);
        } catch (const no_valid_root_error&) {
            pd[i] = 0.0; // probe pass is lenient; the final pass is not
            has_prev = false;
        }
    }
    double vmax = 0.0;
    for (const double v : pd) vmax = std::max(vmax, v);
    if (!(vmax > 0.0)) throw numerical_error("aepdf_k_alpha_auto: probe found no spectral mass");
    const double thr = 1e-4 * vmax;
    std::size_t ilo = 0, ihi = probe_n - 1;
    while (ilo < probe_n && pd[ilo] <= thr) ++ilo;
    while (ihi > 0 && pd[ihi] <= thr) --ihi;
    const double probe_step = (probe_hi - probe_lo) / (probe_n - 1);
    const double det_lo = probe_lo + probe_step * ilo;
    double det_hi = probe_lo + probe_step * ihi;
    // a spectrum narrower than the probe resolution still needs a window
    det_hi = std::max(det_hi, det_lo + 4.0 * probe_step);

    const double center = 0.5 * (det_lo + det_hi);
    const double half = 0.55 * (det_hi - det_lo); // 1.1x span
    const double final_lo = std::max(center - half, 1e-12);
    const double final_hi = center + half;
    const double y_eps = 1e-4 * (det_hi - det_lo);

    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i)
        grid[i] = final_lo + (final_hi - final_lo) * i / (points - 1);
    return aepdf_k_alpha(grid, beta, gamma, alpha_bar, y_eps);
}

} // namespace relaycap
