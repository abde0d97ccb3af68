// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <array>
#include <cmath>

#include "relaycap/rng.hpp"
#include "relaycap/system_config.hpp"

using namespace relaycap;

namespace {
SystemConfig fig1_config() {
    SystemConfig cfg;
    cfg.users = 50;
    cfg.relay_antennas = 10;
    cfg.bs_antennas = 100;
    cfg.mu = 100.0; // 20 dB
    cfg.nu = 100.0;
    return cfg;
}
} // namespace

TEST_CASE("coefficients at 20 dB without impairments") {
    // K=50, M=10, N=100, mu=nu=100, delta=0:
    //   mu_tilde = 100 + 1/50 = 100.02, B = 1, f4 = mu nu = 10000,
    //   f2 = 0, f3 = nu = 100, f1 = 10000/100 = 100
    const Coefficients co = derive_coefficients(fig1_config());
    CHECK(co.beta == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(co.gamma == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(co.mu_tilde == doctest::Approx(100.02).epsilon(1e-14));
    CHECK(co.b_factor == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(co.f2 == 0.0);
    CHECK(co.f4 == doctest::Approx(10000.0).epsilon(1e-14));
    CHECK(co.f3 == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(co.f1 == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(co.alpha_bar_c1 == doctest::Approx(1000.0).epsilon(1e-14));
    CHECK(co.alpha_bar_c2 == 0.0);
    CHECK(co.f1 * co.f3 == doctest::Approx(co.f2 + co.f4).epsilon(1e-14));
}

TEST_CASE("mu_tilde minus mu is exactly 1/K when impairments vanish") {
    SystemConfig cfg = fig1_config();
    CHECK(cfg.mu_tilde() - cfg.mu == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("coefficients at delta = 0.08") {
    SystemConfig cfg = fig1_config();
    cfg.delta_t1 = cfg.delta_t2 = cfg.delta_r1 = cfg.delta_r2 = 0.08;
    const Coefficients co = derive_coefficients(cfg);
    // mu_tilde = 100 (1 + 0.0064 + 0.0064) + 0.02 = 101.3
    CHECK(co.mu_tilde == doctest::Approx(101.3).epsilon(1e-12));
    // B = 0.0064 * 101.3 * 100 * 50 * 10 + 1
    CHECK(co.b_factor == doctest::Approx(0.0064 * 101.3 * 100.0 * 500.0 + 1.0).epsilon(1e-12));
    CHECK(co.f2 == doctest::Approx(co.f4 * 0.0064).epsilon(1e-14));
    CHECK(co.f1 * co.f3 == doctest::Approx(co.f2 + co.f4).epsilon(1e-12));
}

TEST_CASE("validation diagnostics name the offending field") {
    SystemConfig cfg = fig1_config();
    cfg.mu = 0.0;
    auto v = validate_config(cfg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "mu");

    cfg = fig1_config();
    cfg.delta_t1 = -0.1;
    v = validate_config(cfg);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "delta_t1");

    CHECK(validate_config(fig1_config()).empty());

    cfg = fig1_config();
    cfg.users = 0;
    CHECK_THROWS_AS((void)derive_coefficients(cfg), std::invalid_argument);
}

TEST_CASE("defining identity f1 f3 = f2 + f4 over random configs") {
    StreamRng rng(7);
    for (int i = 0; i < 100000; ++i) {
        SystemConfig cfg;
        cfg.users = 1 + static_cast<int>(rng.next_u64() % 128);
        cfg.relay_antennas = 1 + static_cast<int>(rng.next_u64() % 64);
        cfg.bs_antennas = 1 + static_cast<int>(rng.next_u64() % 256);
        cfg.mu = 1e-2 + 1e3 * rng.next_unit();
        cfg.nu = 1e-2 + 1e3 * rng.next_unit();
        cfg.delta_t1 = 0.3 * rng.next_unit();
        cfg.delta_r1 = 0.3 * rng.next_unit();
        cfg.delta_t2 = 0.3 * rng.next_unit();
        cfg.delta_r2 = 0.3 * rng.next_unit();
        const Coefficients co = derive_coefficients(cfg);
        REQUIRE(std::abs(co.f1 * co.f3 - (co.f2 + co.f4)) <=
                1e-12 * std::max(1.0, co.f2 + co.f4));
        REQUIRE(co.b_factor >= 1.0);
        REQUIRE(co.f3 > 0.0);
        REQUIRE(co.f4 > 0.0);
        REQUIRE(co.f2 >= 0.0);
        REQUIRE(co.f1 >= co.f4 / co.f3 * (1.0 - 1e-15));
    }
}

TEST_CASE("impairment-free limit zeroes f2 and B-1 exactly") {
    StreamRng rng(11);
    for (int i = 0; i < 1000; ++i) {
        SystemConfig cfg;
        cfg.users = 1 + static_cast<int>(rng.next_u64() % 100);
        cfg.relay_antennas = 1 + static_cast<int>(rng.next_u64() % 100);
        cfg.bs_antennas = 1 + static_cast<int>(rng.next_u64() % 100);
        cfg.mu = 1e-2 + 1e2 * rng.next_unit();
        cfg.nu = 1e-2 + 1e2 * rng.next_unit();
        const Coefficients co = derive_coefficients(cfg);
        REQUIRE(co.f2 == 0.0);
        REQUIRE(co.b_factor == 1.0);
        REQUIRE(co.alpha_bar_c2 == 0.0);
        REQUIRE(co.f1 == doctest::Approx(co.f4 / co.f3).epsilon(1e-14));
    }
}

TEST_CASE("coefficients vary smoothly in each impairment parameter") {
    SystemConfig base = fig1_config();
    base.delta_t1 = base.delta_t2 = base.delta_r1 = base.delta_r2 = 0.05;

    auto coef_vec = [](const Coefficients& c) {
        return std::array<double, 6>{c.mu_tilde, c.b_factor, c.f1, c.f2, c.f3, c.f4};
    };
    auto perturb = [&](int which, double d) {
        SystemConfig c = base;
        (which == 0 ? c.delta_t1 : which == 1 ? c.delta_r1 : which == 2 ? c.delta_t2
                                                                        : c.delta_r2) += d;
        return coef_vec(derive_coefficients(c));
    };

    for (int which = 0; which < 4; ++which) {
        const double e1 = 1e-4, e2 = 5e-5;
        const auto up1 = perturb(which, e1), dn1 = perturb(which, -e1);
        const auto up2 = perturb(which, e2), dn2 = perturb(which, -e2);
        for (int k = 0; k < 6; ++k) {
            const double slope1 = (up1[k] - dn1[k]) / (2 * e1);
            const double slope2 = (up2[k] - dn2[k]) / (2 * e2);
            // central-difference slopes agree when the map is C^1
            REQUIRE(std::abs(slope1 - slope2) <=
                    1e-4 * std::max({1.0, std::abs(slope1), std::abs(slope2)}));
        }
    }
}

TEST_CASE("from-alpha mode recomputes nu from the power budget") {
    SystemConfig cfg = fig1_config();
    cfg.nu_mode = NuMode::from_alpha;
    cfg.alpha = 5e6;
    cfg.nu = 0.0; // unset
    const SystemConfig r = resolve_nu(cfg);
    const double expected = 5e6 / (50.0 * 10.0 * cfg.mu_tilde());
    CHECK(r.nu == doctest::Approx(expected).epsilon(1e-14));

    // disagreeing user-supplied nu is overwritten
    cfg.nu = expected * 1.5;
    CHECK(resolve_nu(cfg).nu == doctest::Approx(expected).epsilon(1e-14));

    // an agreeing value (within 1e-12 relative) is kept as given
    cfg.nu = expected * (1.0 + 1e-14);
    CHECK(resolve_nu(cfg).nu == cfg.nu);

    // direct mode never touches nu
    cfg.nu_mode = NuMode::direct;
    cfg.nu = 123.0;
    CHECK(resolve_nu(cfg).nu == 123.0);
}
