// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>

#include "relaycap/marchenko_pastur.hpp"
#include "support/oracles.hpp"

using namespace relaycap;

TEST_CASE("support endpoints") {
    // ratio 5: a = (1 - sqrt 5)^2, b = (1 + sqrt 5)^2
    const auto [a5, b5] = mp_support(5.0);
    CHECK(a5 == doctest::Approx(1.5279).epsilon(1e-4));
    CHECK(b5 == doctest::Approx(10.4721).epsilon(1e-4));
    const double s = std::sqrt(5.0);
    CHECK(a5 == doctest::Approx((1 - s) * (1 - s)).epsilon(1e-14));
    CHECK(b5 == doctest::Approx((1 + s) * (1 + s)).epsilon(1e-14));

    const auto [a1, b1] = mp_support(1.0);
    CHECK(a1 == 0.0);
    CHECK(b1 == 4.0);
    CHECK(mp_density(4.0, 1.0) == 0.0);
    CHECK(mp_density(3.9999, 1.0) > 0.0);

    CHECK_THROWS_AS((void)mp_support(0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)mp_density(1.0, -2.0), std::invalid_argument);
}

TEST_CASE("atom mass") {
    CHECK(mp_atom(5.0) == 0.0);
    CHECK(mp_atom(0.25) == 0.75);
    CHECK(mp_atom(1.0) == 0.0);
}

TEST_CASE("continuous mass plus atom equals one (quadrature oracle)") {
    for (const double ratio : {0.2, 1.0, 5.0}) {
        const auto [a, b] = mp_support(ratio);
        const double mass =
            oracle::edge_integral([&](double x) { return mp_density(x, ratio); }, a, b);
        CHECK(mass + mp_atom(ratio) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("mean equals the ratio (quadrature oracle)") {
    for (const double ratio : {0.5, 1.0, 5.0}) {
        const auto [a, b] = mp_support(ratio);
        const double mean =
            oracle::edge_integral([&](double x) { return x * mp_density(x, ratio); }, a, b);
        CHECK(mean == doctest::Approx(ratio).epsilon(1e-6));
    }
}

TEST_CASE("closed-form eta against the quadrature oracle") {
    for (const double ratio : {0.5, 1.0, 5.0}) {
        const auto [a, b] = mp_support(ratio);
        for (const double psi : {0.25, 1.0, 7.5}) {
            const double bulk = oracle::edge_integral(
                [&](double x) { return mp_density(x, ratio) / (1.0 + psi * x); }, a, b);
            CHECK(mp_eta(psi, ratio) ==
                  doctest::Approx(bulk + mp_atom(ratio)).epsilon(1e-6));
        }
        CHECK(mp_eta(0.0, ratio) == 1.0);
        // decreasing, bounded by the atom as psi grows
        CHECK(mp_eta(1.0, ratio) > mp_eta(2.0, ratio));
        CHECK(mp_eta(1e9, ratio) == doctest::Approx(mp_atom(ratio)).epsilon(1e-3));
    }
}

TEST_CASE("mp_expectation matches the independent oracle on a generic kernel") {
    for (const double ratio : {0.5, 1.0, 5.0}) {
        const auto [a, b] = mp_support(ratio);
        auto kernel = [](double y) { return std::log1p(0.7 * y) + y * y / 50.0; };
        const double via_theta = mp_expectation(kernel, ratio);
        const double via_oracle = oracle::edge_integral(
            [&](double x) { return kernel(x) * mp_density(x, ratio); }, a, b);
        CHECK(via_theta == doctest::Approx(via_oracle).epsilon(1e-8));
    }
}

TEST_CASE("closed-form Stieltjes transform") {
    using cd = std::complex<double>;
    for (const double ratio : {0.5, 1.0, 5.0, 10.0}) {
        const auto [a, b] = mp_support(ratio);

        // against direct quadrature at a point off the real axis
        const cd z(0.5 * (a + b), 0.8);
        const cd direct = oracle::edge_integral(
                              [&](double x) { return mp_density(x, ratio) * (x - z.real()) /
                                                     std::norm(x - z); },
                              a, b) +
                          mp_atom(ratio) * (0.0 - z.real()) / std::norm(cd(0.0, 0.0) - z);
        const double direct_im = oracle::edge_integral(
                                     [&](double x) {
                                         return mp_density(x, ratio) * z.imag() / std::norm(x - z);
                                     },
                                     a, b) +
                                 mp_atom(ratio) * z.imag() / std::norm(cd(0.0, 0.0) - z);
        const cd s = mp_stieltjes(z, ratio);
        CHECK(s.real() == doctest::Approx(direct.real()).epsilon(1e-7));
        CHECK(s.imag() == doctest::Approx(direct_im).epsilon(1e-7));
        CHECK(s.imag() > 0.0);

        // quadratic residual of the returned branch
        const cd res = z * s * s + (z + (1.0 - ratio)) * s + 1.0;
        CHECK(std::abs(res) < 1e-12);

        // far field: S = -1/z - mean/z^2 + O(1/z^3) with mean = ratio
        const cd zfar(50.0 * b, 1.0);
        CHECK(std::abs(mp_stieltjes(zfar, ratio) + 1.0 / zfar + ratio / (zfar * zfar)) <
              0.2 * ratio / std::norm(zfar));
    }
}
