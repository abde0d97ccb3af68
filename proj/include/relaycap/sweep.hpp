// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "relaycap/capacity.hpp"
#include "relaycap/io.hpp"
#include "relaycap/system_config.hpp"

namespace relaycap {

enum class SweepAxis { mu_db, nu_db, beta, gamma, delta };

inline const char* axis_name(SweepAxis a) {
    switch (a) {
        case SweepAxis::mu_db: return "mu_db";
        case SweepAxis::nu_db: return "nu_db";
        case SweepAxis::beta: return "beta";
        case SweepAxis::gamma: return "gamma";
        case SweepAxis::delta: return "delta";
    }
    return "?";
}

inline std::optional<SweepAxis> parse_axis(const std::string& s) {
    if (s == "mu_db" || s == "mu-db") return SweepAxis::mu_db;
    if (s == "nu_db" || s == "nu-db") return SweepAxis::nu_db;
    if (s == "beta") return SweepAxis::beta;
    if (s == "gamma") return SweepAxis::gamma;
    if (s == "delta") return SweepAxis::delta;
    return std::nullopt;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

/// Overlay one axis value on a baseline config. Dimension axes keep M fixed
/// and resize the counterpart (K = round(beta M), N = round(gamma M)); the
/// delta axis sets all four impairment parameters at once.
inline SystemConfig apply_axis(SystemConfig cfg, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::mu_db:
            cfg.mu = db_to_linear(value);
            break;
        case SweepAxis::nu_db:
            cfg.nu = db_to_linear(value);
            cfg.nu_mode = NuMode::direct;
            break;
        case SweepAxis::beta:
            cfg.users = std::max(1, static_cast<int>(std::lround(value * cfg.relay_antennas)));
            break;
        case SweepAxis::gamma:
            cfg.bs_antennas =
                std::max(1, static_cast<int>(std::lround(value * cfg.relay_antennas)));
            break;
        case SweepAxis::delta:
            cfg.delta_t1 = cfg.delta_t2 = cfg.delta_r1 = cfg.delta_r2 = value;
            break;
    }
    return cfg;
}

struct SweepSpec {
    SweepAxis axis = SweepAxis::mu_db;
    double start = 0.0;
    double stop = 1.0;
    int steps = 2;
    SystemConfig baseline;
    long mc_trials = 0; // 0 = asymptotic only
    std::uint64_t seed = 0;
};

inline std::vector<ConfigViolation> validate_sweep(const SweepSpec& spec) {
    std::vector<ConfigViolation> v = validate_config(spec.baseline);
    if (spec.steps < 2) v.push_back({"steps", "sweep needs at least 2 steps"});
    if (!(spec.start < spec.stop)) v.push_back({"start", "sweep start must be below stop"});
    if (spec.mc_trials < 0) v.push_back({"mc_trials", "mc_trials must be >= 0"});
    if ((spec.axis == SweepAxis::delta) && spec.start < 0.0)
        v.push_back({"start", "delta sweep must start at >= 0"});
    if ((spec.axis == SweepAxis::beta || spec.axis == SweepAxis::gamma) && !(spec.start > 0.0))
        v.push_back({"start", "dimension ratio sweep must start above 0"});
    return v;
}

struct SweepRow {
    double value = 0.0;
    double delta = std::numeric_limits<double>::quiet_NaN(); // common delta, NaN if mixed
    CapacityResult asym;
    bool has_mc = false;
    CapacityResult mc;
    bool failed = false;
};

namespace detail {
inline SweepRow evaluate_point(const SystemConfig& cfg, double value, long mc_trials,
                               std::uint64_t seed, std::size_t grid_points) {
    SweepRow row;
    row.value = value;
    cfg.common_delta(&row.delta);
    try {
        row.asym = asymptotic_capacity(cfg, grid_points);
        if (mc_trials > 0) {
            row.mc = mc_ergodic_capacity(cfg, mc_trials, seed);
            row.has_mc = true;
        }
    } catch (const std::exception& e) {
        std::cerr << "warning: sweep point " << value << " failed: " << e.what() << "\n";
        row.failed = true;
    }
    return row;
}
} // namespace detail

/// Evaluate the grid in axis order; points may run concurrently but rows come
/// back ordered and seed-deterministic. Failed points become NaN rows.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, int jobs = 1,
                                       std::size_t grid_points = 2048) {
    const auto violations = validate_sweep(spec);
    if (!violations.empty())
        throw std::invalid_argument("invalid sweep: " + violations.front().field + ": " +
                                    violations.front().message);
    std::vector<SweepRow> rows(spec.steps);
    relaycap::detail::run_trials(spec.steps, jobs, [&](long i) {
        const double value = spec.start + (spec.stop - spec.start) * i / (spec.steps - 1);
        const SystemConfig cfg = apply_axis(spec.baseline, spec.axis, value);
        rows[i] = detail::evaluate_point(cfg, value, spec.mc_trials,
                                         StreamRng::derive_key(spec.seed, 0xA5F0 + i),
                                         grid_points);
    });
    return rows;
}

inline void write_sweep_header(std::ostream& os) {
    os << "axis,value,delta,c_asym,c1_asym,c2_asym,c_mc,mc_ci,defect\n";
}

inline void write_sweep_row(std::ostream& os, SweepAxis axis, const SweepRow& row) {
    const double qnan = std::numeric_limits<double>::quiet_NaN();
    const double c_asym = row.failed ? qnan : row.asym.c;
    const double c1 = row.failed ? qnan : row.asym.c1;
    const double c2 = row.failed ? qnan : row.asym.c2;
    const double c_mc = row.has_mc ? row.mc.c : qnan;
    const double ci = row.has_mc ? row.mc.ci_halfwidth : qnan;
    const double defect = row.failed ? qnan : row.asym.quadrature_defect;
    os << axis_name(axis) << "," << fmt(row.value) << "," << fmt(row.delta) << "," << fmt(c_asym)
       << "," << fmt(c1) << "," << fmt(c2) << "," << fmt(c_mc) << "," << fmt(ci) << ","
       << fmt(defect) << "\n";
}

inline void write_sweep_csv(std::ostream& os, const SweepSpec& spec,
                            const std::vector<SweepRow>& rows) {
    write_sweep_header(os);
    for (const auto& r : rows) write_sweep_row(os, spec.axis, r);
}

/// Rectangular preset grids (capacity surfaces over two axes).
struct GridRow {
    double value1 = 0.0;
    double value2 = 0.0;
    double delta = std::numeric_limits<double>::quiet_NaN();
    CapacityResult asym;
    bool has_mc = false;
    CapacityResult mc;
    bool failed = false;
};

inline std::vector<GridRow> run_grid(const SystemConfig& baseline, SweepAxis axis1,
                                     const std::vector<double>& values1, SweepAxis axis2,
                                     const std::vector<double>& values2, long mc_trials,
                                     std::uint64_t seed, int jobs = 1,
                                     std::size_t grid_points = 2048) {
    const long total = static_cast<long>(values1.size() * values2.size());
    std::vector<GridRow> rows(total);
    relaycap::detail::run_trials(total, jobs, [&](long idx) {
        const std::size_t i = idx / values2.size();
        const std::size_t j = idx % values2.size();
        SystemConfig cfg = apply_axis(baseline, axis1, values1[i]);
        cfg = apply_axis(cfg, axis2, values2[j]);
        const SweepRow r = detail::evaluate_point(cfg, values2[j], mc_trials,
                                                  StreamRng::derive_key(seed, 0xB7C0 + idx),
                                                  grid_points);
        GridRow& g = rows[idx];
        g.value1 = values1[i];
        g.value2 = values2[j];
        g.delta = r.delta;
        g.asym = r.asym;
        g.has_mc = r.has_mc;
        g.mc = r.mc;
        g.failed = r.failed;
    });
    return rows;
}

inline void write_grid_csv(std::ostream& os, SweepAxis axis1, SweepAxis axis2,
                           const std::vector<GridRow>& rows) {
    os << "axis1,value1,axis2,value2,delta,c_asym,c1_asym,c2_asym,c_mc,mc_ci,defect\n";
    const double qnan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& g : rows) {
        const double c_asym = g.failed ? qnan : g.asym.c;
        const double c1 = g.failed ? qnan : g.asym.c1;
        const double c2 = g.failed ? qnan : g.asym.c2;
        const double c_mc = g.has_mc ? g.mc.c : qnan;
        const double ci = g.has_mc ? g.mc.ci_halfwidth : qnan;
        const double defect = g.failed ? qnan : g.asym.quadrature_defect;
        os << axis_name(axis1) << "," << fmt(g.value1) << "," << axis_name(axis2) << ","
           << fmt(g.value2) << "," << fmt(g.delta) << "," << fmt(c_asym) << "," << fmt(c1) << ","
           << fmt(c2) << "," << fmt(c_mc) << "," << fmt(ci) << "," << fmt(defect) << "\n";
    }
}

/// Baseline shared by every preset: K=50, M=10, N=100 (beta=5, gamma=10),
/// mu = nu = 20 dB, no impairments.
inline SystemConfig preset_baseline() {
    SystemConfig cfg;
    cfg.users = 50;
    cfg.relay_antennas = 10;
    cfg.bs_antennas = 100;
    cfg.mu = db_to_linear(20.0);
    cfg.nu = db_to_linear(20.0);
    return cfg;
}

inline const std::vector<double>& preset_delta_values() {
    static const std::vector<double> v{0.0, 0.01, 0.08, 0.15};
    return v;
}

} // namespace relaycap
