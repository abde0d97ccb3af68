// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "relaycap/rng.hpp"

using namespace relaycap;

TEST_CASE("identical seeds replay identical streams") {
    StreamRng a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());
    StreamRng c(42, 8);
    int same = 0;
    StreamRng a2(42, 7);
    for (int i = 0; i < 1000; ++i) same += (a2.next_u64() == c.next_u64());
    CHECK(same == 0);
}

TEST_CASE("complex gaussian moments") {
    StreamRng rng(123);
    const int n = 100000;
    std::complex<double> mean{};
    double pow_sum = 0.0, re_var = 0.0, im_var = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto h = rng.next_cgauss();
        mean += h;
        pow_sum += std::norm(h);
        re_var += h.real() * h.real();
        im_var += h.imag() * h.imag();
    }
    mean /= static_cast<double>(n);
    CHECK(std::abs(mean) < 0.02);
    CHECK(pow_sum / n == doctest::Approx(1.0).epsilon(0.05));
    // circular symmetry: each part carries variance 1/2
    CHECK(re_var / n == doctest::Approx(0.5).epsilon(0.05));
    CHECK(im_var / n == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("unit draws stay inside (0, 1]") {
    StreamRng rng(5);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.next_unit();
        REQUIRE(u > 0.0);
        REQUIRE(u <= 1.0);
    }
}
