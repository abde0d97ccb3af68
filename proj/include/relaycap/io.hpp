// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "relaycap/capacity.hpp"
#include "relaycap/density.hpp"
#include "relaycap/montecarlo.hpp"
#include "relaycap/system_config.hpp"

namespace relaycap {

/// Fixed-width formatting shared by every CSV writer, so identical runs
/// produce byte-identical files.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

/// Density CSV: a '#'-prefixed JSON header line (support, atom, normalization
/// defect) followed by x,density rows.
inline void write_density_csv(std::ostream& os, const SpectralDensity& d) {
    nlohmann::json header{
        {"support", {d.support_lo, d.support_hi}},
        {"atom_at_zero", d.atom_at_zero},
        {"normalization_defect", d.normalization_defect},
        {"inversion_defect", d.inversion_defect},
    };
    os << "# " << header.dump() << "\n";
    os << "x,density\n";
    for (std::size_t i = 0; i < d.grid.size(); ++i)
        os << fmt(d.grid[i]) << "," << fmt(d.values[i]) << "\n";
}

/// One eigenvalue per row, keyed by trial index.
inline void write_eigen_csv(std::ostream& os, const EigenSampleSet& set) {
    os << "trial,eigenvalue\n";
    const int per_trial = set.dims.relay_antennas;
    for (std::size_t i = 0; i < set.values.size(); ++i)
        os << (i / per_trial) << "," << fmt(set.values[i]) << "\n";
}

inline nlohmann::json config_to_json(const SystemConfig& cfg) {
    return {
        {"K", cfg.users},
        {"M", cfg.relay_antennas},
        {"N", cfg.bs_antennas},
        {"mu", cfg.mu},
        {"nu", cfg.nu},
        {"delta_t1", cfg.delta_t1},
        {"delta_r1", cfg.delta_r1},
        {"delta_t2", cfg.delta_t2},
        {"delta_r2", cfg.delta_r2},
        {"nu_mode", cfg.nu_mode == NuMode::direct ? "direct" : "from-alpha"},
        {"alpha", cfg.alpha},
    };
}

inline nlohmann::json coefficients_to_json(const Coefficients& co) {
    return {
        {"beta", co.beta},          {"gamma", co.gamma},
        {"mu_tilde", co.mu_tilde},  {"B", co.b_factor},
        {"f1", co.f1},              {"f2", co.f2},
        {"f3", co.f3},              {"f4", co.f4},
        {"alpha_bar_c1", co.alpha_bar_c1},
        {"alpha_bar_c2", co.alpha_bar_c2},
    };
}

/// unit_scale = 1 for nats, 1/ln2 for bits.
inline nlohmann::json capacity_to_json(const CapacityResult& r, double unit_scale = 1.0) {
    nlohmann::json j{
        {"c1", r.c1 * unit_scale},
        {"c2", r.c2 * unit_scale},
        {"c", r.c * unit_scale},
        {"method", r.method == CapacityMethod::asymptotic ? "asymptotic" : "montecarlo"},
    };
    if (r.method == CapacityMethod::montecarlo) {
        j["trials"] = r.trials;
        if (std::isfinite(r.ci_halfwidth))
            j["ci_halfwidth"] = r.ci_halfwidth * unit_scale;
        else
            j["ci_halfwidth"] = nullptr;
    } else {
        j["quadrature_defect"] = r.quadrature_defect;
    }
    return j;
}

} // namespace relaycap
