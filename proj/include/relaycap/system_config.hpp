// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace relaycap {

enum class NuMode {
    direct,     // nu is taken as given
    from_alpha, // nu = alpha / (K M mu_tilde), fixed-gain relay power budget
};

/// Physical configuration of the dual-hop relay link. All SNR-like values are
/// linear scale; dB conversion happens at the I/O boundary only.
struct SystemConfig {
    int users = 1;          // K, single-antenna transmitters
    int relay_antennas = 1; // M
    int bs_antennas = 1;    // N
    double mu = 1.0;        // per-user SNR, mu = rho / K
    double nu = 1.0;        // relay amplification gain
    double delta_t1 = 0.0;  // transmit impairment severity, first hop (EVM-like)
    double delta_r1 = 0.0;  // receive impairment severity, first hop
    double delta_t2 = 0.0;  // transmit impairment severity, second hop
    double delta_r2 = 0.0;  // receive impairment severity, second hop
    NuMode nu_mode = NuMode::direct;
    double alpha = 0.0;     // relay power budget, used in from_alpha mode only

    double beta() const { return static_cast<double>(users) / relay_antennas; }
    double gamma() const { return static_cast<double>(bs_antennas) / relay_antennas; }

    /// mu(1 + dt1^2 + dr1^2) + 1/K; the per-antenna relay input power scale.
    double mu_tilde() const {
        return mu * (1.0 + delta_t1 * delta_t1 + delta_r1 * delta_r1) + 1.0 / users;
    }

    bool common_delta(double* value = nullptr) const {
        const bool same = delta_t1 == delta_t2 && delta_t1 == delta_r1 && delta_t1 == delta_r2;
        if (same && value) *value = delta_t1;
        return same;
    }
};

struct ConfigViolation {
    std::string field;
    std::string message;
};

/// Empty result means the configuration satisfies every invariant.
inline std::vector<ConfigViolation> validate_config(const SystemConfig& cfg) {
    std::vector<ConfigViolation> v;
    auto bad = [&](const char* field, const std::string& msg) { v.push_back({field, msg}); };

    if (cfg.users < 1) bad("K", "user count must be at least 1");
    if (cfg.relay_antennas < 1) bad("M", "relay antenna count must be at least 1");
    if (cfg.bs_antennas < 1) bad("N", "BS antenna count must be at least 1");
    if (!(cfg.mu > 0.0) || !std::isfinite(cfg.mu)) bad("mu", "mu must be positive");
    if (cfg.delta_t1 < 0.0 || !std::isfinite(cfg.delta_t1))
        bad("delta_t1", "delta_t1 must be nonnegative");
    if (cfg.delta_r1 < 0.0 || !std::isfinite(cfg.delta_r1))
        bad("delta_r1", "delta_r1 must be nonnegative");
    if (cfg.delta_t2 < 0.0 || !std::isfinite(cfg.delta_t2))
        bad("delta_t2", "delta_t2 must be nonnegative");
    if (cfg.delta_r2 < 0.0 || !std::isfinite(cfg.delta_r2))
        bad("delta_r2", "delta_r2 must be nonnegative");
    if (cfg.nu_mode == NuMode::direct) {
        if (!(cfg.nu > 0.0) || !std::isfinite(cfg.nu)) bad("nu", "nu must be positive");
    } else {
        if (!(cfg.alpha > 0.0) || !std::isfinite(cfg.alpha))
            bad("alpha", "alpha must be positive in from-alpha mode");
    }
    return v;
}

/// In from-alpha mode nu is defined by the relay power budget; a user-supplied
/// nu that disagrees beyond 1e-12 relative is overwritten.
inline SystemConfig resolve_nu(SystemConfig cfg) {
    if (cfg.nu_mode == NuMode::from_alpha) {
        const double derived = cfg.alpha / (static_cast<double>(cfg.users) *
                                            cfg.relay_antennas * cfg.mu_tilde());
        if (!(cfg.nu > 0.0) || std::abs(cfg.nu - derived) > 1e-12 * derived) cfg.nu = derived;
    }
    return cfg;
}

/// Closed-form capacity coefficients of the impaired dual-hop model.
struct Coefficients {
    double beta = 0.0;   // K/M
    double gamma = 0.0;  // N/M
    double mu_tilde = 0.0;
    double b_factor = 0.0; // B = dr2^2 mu_tilde nu K M + 1
    double f1 = 0.0;       // (f2 + f4) / f3
    double f2 = 0.0;       // f4 dt1^2
    double f3 = 0.0;       // nu (dt2^2 mu_tilde K + dr1^2 mu K + 1) / B
    double f4 = 0.0;       // mu nu / B
    double alpha_bar_c1 = 0.0; // M f1
    double alpha_bar_c2 = 0.0; // M f2 / f3
};

inline Coefficients derive_coefficients(const SystemConfig& raw) {
    const auto violations = validate_config(raw);
    if (!violations.empty())
        throw std::invalid_argument("invalid config: " + violations.front().field + ": " +
                                    violations.front().message);
    const SystemConfig cfg = resolve_nu(raw);

    Coefficients c;
    c.beta = cfg.beta();
    c.gamma = cfg.gamma();
    c.mu_tilde = cfg.mu_tilde();
    const double k = cfg.users;
    const double m = cfg.relay_antennas;
    c.b_factor = cfg.delta_r2 * cfg.delta_r2 * c.mu_tilde * cfg.nu * k * m + 1.0;
    c.f4 = cfg.mu * cfg.nu / c.b_factor;
    c.f2 = c.f4 * cfg.delta_t1 * cfg.delta_t1;
    c.f3 = cfg.nu *
           (cfg.delta_t2 * cfg.delta_t2 * c.mu_tilde * k + cfg.delta_r1 * cfg.delta_r1 * cfg.mu * k +
            1.0) /
           c.b_factor;
    c.f1 = (c.f2 + c.f4) / c.f3;
    c.alpha_bar_c1 = m * c.f1;
    c.alpha_bar_c2 = m * c.f2 / c.f3;
    return c;
}

} // namespace relaycap
