// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "relaycap/marchenko_pastur.hpp"
#include "relaycap/stieltjes.hpp"

using namespace relaycap;
using cd = std::complex<double>;

TEST_CASE("quartic solver recovers planted roots") {
    const std::vector<std::array<cd, 4>> cases = {
        {cd(1, 0), cd(-2, 0), cd(0, 3), cd(4, -1)},
        {cd(0.5, 0.5), cd(0.5001, 0.5), cd(-7, 0), cd(0, -2)}, // near-double root
        {cd(1e-4, 1e-5), cd(100, 0), cd(-3, 2), cd(2, 2)},     // wide magnitude range
    };
    for (const auto& roots : cases) {
        // expand prod (x - r_i)
        std::array<cd, 5> c{1.0, 0.0, 0.0, 0.0, 0.0};
        for (const cd r : roots) {
            std::array<cd, 5> next{};
            for (int i = 0; i < 4; ++i) {
                next[i + 1] += c[i] * (-r);
                next[i] += c[i];
            }
            for (int i = 1; i < 5; ++i) next[i] += 0.0;
            c = next;
        }
        const auto found = detail::solve_quartic(c);
        for (const cd r : roots) {
            double best = 1e300;
            for (const cd f : found) best = std::min(best, std::abs(f - r));
            REQUIRE(best < 1e-7 * std::max(1.0, std::abs(r)));
        }
    }
}

TEST_CASE("quartic coefficients vanish into the MP quadratic as alpha_bar -> 0") {
    // Dividing the quartic by alpha_bar and dropping O(alpha_bar) terms must
    // leave -(z S^2 + (z + 1 - gamma) S + 1); checked by evaluating both at
    // sample points.
    const double beta = 5.0, gamma = 10.0, ab = 1e-9;
    const cd z(7.0, 0.3);
    const auto c = quartic_coefficients(z, beta, gamma, ab);
    for (const cd s : {cd(0.1, 0.4), cd(-0.3, 0.8)}) {
        cd quartic{};
        cd p = 1.0;
        for (int k = 4; k >= 0; --k) {
            quartic += c[static_cast<std::size_t>(4 - k)] * std::pow(s, k);
        }
        const cd quad = -(z * s * s + (z + 1.0 - gamma) * s + 1.0);
        REQUIRE(std::abs(quartic / ab - quad) < 1e-6);
        (void)p;
    }
}

TEST_CASE("degenerate branch equals the closed-form MP transform") {
    const double gamma = 10.0;
    for (const cd z : {cd(5.0, 0.1), cd(12.0, 0.01), cd(25.0, 1.0)}) {
        const auto s = stieltjes_k_alpha(z, 5.0, gamma, 0.0);
        const cd ref = mp_stieltjes(z, gamma);
        REQUIRE(std::abs(s.value - ref) < 1e-10);
        REQUIRE(s.residual < 1e-8);
    }
}

TEST_CASE("selected root behaves like a Stieltjes transform") {
    const double beta = 5.0, gamma = 10.0, ab = 10.0;

    SUBCASE("far field S ~ -1/z") {
        const cd z(5e4, 10.0);
        const auto s = stieltjes_k_alpha(z, beta, gamma, ab);
        CHECK(std::abs(s.value + 1.0 / z) < 5.0 * std::abs(1.0 / (z * z)) * gamma * (1 + ab * beta));
    }

    SUBCASE("upper half-plane is preserved and residual is tiny") {
        std::optional<cd> prev;
        for (double x = 1.0; x < 900.0; x *= 1.4) {
            const auto s = stieltjes_k_alpha(cd(x, 0.05), beta, gamma, ab, prev);
            prev = s.value;
            REQUIRE(s.value.imag() > 0.0);
            REQUIRE(s.residual < 1e-8);
        }
    }

    SUBCASE("off-support real axis has vanishing imaginary part") {
        // upper support edge is below (1+sqrt(10))^2 (1 + 10 (1+sqrt 5)^2) ~ 1815
        const auto s = stieltjes_k_alpha(cd(4000.0, 1e-7), beta, gamma, ab);
        CHECK(std::abs(s.value.imag()) < 1e-8);
        const auto s2 = stieltjes_k_alpha(cd(1e-3, 1e-7), beta, gamma, ab);
        CHECK(std::abs(s2.value.imag()) < 1e-6);
    }

    SUBCASE("rejects arguments off the upper half-plane") {
        CHECK_THROWS_AS((void)stieltjes_k_alpha(cd(1.0, 0.0), beta, gamma, ab),
                        std::invalid_argument);
    }
}

TEST_CASE("aepdf mass, mean, and root-path continuity") {
    const double beta = 5.0, gamma = 10.0, ab = 10.0;
    const SpectralDensity d = aepdf_k_alpha_auto(beta, gamma, ab, 1024);

    CHECK(std::abs(total_mass(d) - 1.0) < 1e-3);
    CHECK(d.atom_at_zero == 0.0);
    // free multiplicative first moment: gamma (1 + ab beta)
    CHECK(first_moment(d) == doctest::Approx(gamma * (1.0 + ab * beta)).epsilon(0.02));
    CHECK(d.normalization_defect < 1e-2);

    // all mass inside the detected support, none outside (<= 1e-6 tails)
    for (std::size_t i = 0; i < d.grid.size(); ++i) {
        REQUIRE(d.values[i] >= 0.0);
        if (d.grid[i] < d.support_lo - 0.05 * (d.support_hi - d.support_lo) ||
            d.grid[i] > d.support_hi + 0.05 * (d.support_hi - d.support_lo))
            REQUIRE(d.values[i] <= 1e-6);
    }

    // branch continuity along the inversion line Im z = y_eps
    const double span = d.support_hi - d.support_lo;
    const double y_eps = 1e-4 * span;
    std::optional<cd> prev;
    cd last{}, second_last{};
    int have = 0;
    for (std::size_t i = 0; i < d.grid.size(); i += 8) {
        const auto s = stieltjes_k_alpha(cd(d.grid[i], y_eps), beta, gamma, ab, prev);
        prev = s.value;
        if (have >= 2) {
            const double step = std::abs(s.value - last);
            const double secant = std::abs(last - second_last);
            REQUIRE(step < 10.0 * std::max(secant, 1e-12));
        }
        second_last = last;
        last = s.value;
        ++have;
    }
}

TEST_CASE("aepdf at alpha_bar = 0 reduces to the MP law at ratio gamma") {
    const double gamma = 10.0;
    const SpectralDensity d = aepdf_k_alpha_auto(5.0, gamma, 0.0, 1024);
    CHECK(std::abs(total_mass(d) - 1.0) < 1e-3);

    SpectralDensity ref;
    ref.grid = d.grid;
    ref.values.resize(d.grid.size());
    for (std::size_t i = 0; i < d.grid.size(); ++i)
        ref.values[i] = mp_density(d.grid[i], gamma);
    const auto [a, b] = mp_support(gamma);
    ref.support_lo = a;
    ref.support_hi = b;
    CHECK(ks_distance(d, ref) < 0.02);
}

TEST_CASE("gamma below one produces the rank-deficiency atom") {
    // N < M: K_alpha = H2^H H2 (...) is singular with nullity fraction 1-gamma
    const SpectralDensity d = aepdf_k_alpha_auto(2.0, 0.5, 1.0, 768);
    CHECK(d.atom_at_zero == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(total_mass(d) - 1.0) < 5e-3);
}

TEST_CASE("root selection survives two-valued eta regions") {
    // beta < 1 with moderate alpha_bar: the honest eta-transform is 2-to-1
    // around parts of the plane, where a square-root branch pick would reject
    // the physical root; the forward fixed-point check must not.
    struct Cfg {
        double beta, gamma, ab;
    };
    for (const Cfg c : {Cfg{0.2, 1.0, 3.0}, Cfg{0.5, 2.0, 3.0}, Cfg{0.2, 10.0, 3.0},
                        Cfg{0.5, 1.0, 0.5}}) {
        const SpectralDensity d = aepdf_k_alpha_auto(c.beta, c.gamma, c.ab, 768);
        const double mean_expected = c.gamma * (1.0 + c.ab * c.beta);
        CHECK(std::abs(total_mass(d) - 1.0) < 0.05);
        CHECK(first_moment(d) == doctest::Approx(mean_expected).epsilon(0.03));
    }
}

TEST_CASE("alpha_bar below the floor degenerates cleanly to MP") {
    // 1e-8 sits under the conditioning floor; the MP branch must take over
    const SpectralDensity d = aepdf_k_alpha_auto(5.0, 2.0, 1e-8, 512);
    CHECK(std::abs(total_mass(d) - 1.0) < 2e-3);
    CHECK(first_moment(d) == doctest::Approx(2.0).epsilon(0.01));
}
