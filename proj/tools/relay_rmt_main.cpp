// SPDX-License-Identifier: Apache-2.0
//
// relay-rmt: ergodic-capacity engine for dual-hop AF MIMO relays with
// residual transceiver impairments. Single-point reports, parameter sweeps,
// spectral-density exports, and Monte Carlo cross-checks.

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "relaycap/capacity.hpp"
#include "relaycap/io.hpp"
#include "relaycap/montecarlo.hpp"
#include "relaycap/sweep.hpp"

namespace {

using namespace relaycap;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Options {
    std::string preset;
    double mu_db = 20.0;
    double nu_db = 20.0;
    double alpha = 0.0;
    int users = 50;
    int relay_antennas = 10;
    int bs_antennas = 100;
    double delta = 0.0;
    std::optional<double> delta_t1, delta_t2, delta_r1, delta_r2;
    std::vector<std::string> sweep_args;
    long mc_trials = -1; // -1: preset/mode default
    std::uint64_t seed = 20240801ull;
    std::string out;
    std::string format; // csv | json; empty = mode default
    int jobs = 1;
    bool bits = false;
    std::size_t grid_points = 2048;
    std::string dump_eigenvalues; // fig1: raw eigenvalue CSV path
};

SystemConfig config_from(const Options& opt) {
    SystemConfig cfg;
    cfg.users = opt.users;
    cfg.relay_antennas = opt.relay_antennas;
    cfg.bs_antennas = opt.bs_antennas;
    cfg.mu = db_to_linear(opt.mu_db);
    cfg.nu = db_to_linear(opt.nu_db);
    cfg.delta_t1 = opt.delta_t1.value_or(opt.delta);
    cfg.delta_t2 = opt.delta_t2.value_or(opt.delta);
    cfg.delta_r1 = opt.delta_r1.value_or(opt.delta);
    cfg.delta_r2 = opt.delta_r2.value_or(opt.delta);
    if (opt.alpha > 0.0) {
        cfg.nu_mode = NuMode::from_alpha;
        cfg.alpha = opt.alpha;
        cfg.nu = 0.0;
    }
    return cfg;
}

int require_valid(const SystemConfig& cfg) {
    const auto violations = validate_config(cfg);
    if (violations.empty()) return 0;
    for (const auto& v : violations) std::cerr << "error: " << v.field << ": " << v.message << "\n";
    return kExitValidation;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file: " + path);
    return file;
}

std::string derived_path(const std::string& out, const std::string& stem_default,
                         const std::string& suffix) {
    std::string base = out.empty() ? stem_default : out;
    const auto dot = base.find_last_of('.');
    if (dot != std::string::npos && base.find('/', dot) == std::string::npos)
        base = base.substr(0, dot);
    return base + suffix;
}

nlohmann::json point_report(const SystemConfig& cfg, long mc_trials, std::uint64_t seed,
                            int jobs, bool bits, std::size_t grid_points) {
    const double unit = bits ? 1.0 / std::numbers::ln2 : 1.0;
    const SystemConfig resolved = resolve_nu(cfg);
    const Coefficients co = derive_coefficients(resolved);

    nlohmann::json j;
    j["config"] = config_to_json(resolved);
    j["coefficients"] = coefficients_to_json(co);
    j["units"] = bits ? "bits" : "nats";

    const CapacityResult asym = asymptotic_capacity(resolved, grid_points);
    j["asymptotic"] = capacity_to_json(asym, unit);

    if (mc_trials > 0) {
        const CapacityResult mc = mc_ergodic_capacity(resolved, mc_trials, seed, jobs);
        j["montecarlo"] = capacity_to_json(mc, unit);
        const double rel = std::abs(asym.c - mc.c) / std::max(mc.c, 1e-300);
        j["agreement"] = {
            {"rel_diff", rel},
            {"within_two_ci",
             std::isfinite(mc.ci_halfwidth) && std::abs(asym.c - mc.c) <= 2.0 * mc.ci_halfwidth},
        };
    }
    return j;
}

int run_point_mode(const Options& opt) {
    const SystemConfig cfg = config_from(opt);
    if (int rc = require_valid(cfg)) return rc;
    const long trials = opt.mc_trials < 0 ? 0 : opt.mc_trials;

    std::ofstream file;
    std::ostream& os = open_output(opt.out, file);
    if (opt.format == "csv") {
        // one sweep-schema row anchored at the current mu
        write_sweep_header(os);
        SweepRow row;
        row.value = opt.mu_db;
        const SystemConfig resolved = resolve_nu(cfg);
        resolved.common_delta(&row.delta);
        row.asym = asymptotic_capacity(resolved, opt.grid_points);
        if (trials > 0) {
            row.mc = mc_ergodic_capacity(resolved, trials, opt.seed, opt.jobs);
            row.has_mc = true;
        }
        write_sweep_row(os, SweepAxis::mu_db, row);
    } else {
        os << point_report(cfg, trials, opt.seed, opt.jobs, opt.bits, opt.grid_points).dump(2)
           << "\n";
    }
    return 0;
}

int run_sweep_mode(const Options& opt) {
    const auto axis = parse_axis(opt.sweep_args[0]);
    if (!axis) {
        std::cerr << "error: sweep: unknown axis '" << opt.sweep_args[0]
                  << "' (use mu_db|nu_db|beta|gamma|delta)\n";
        return kExitValidation;
    }
    SweepSpec spec;
    spec.axis = *axis;
    try {
        spec.start = std::stod(opt.sweep_args[1]);
        spec.stop = std::stod(opt.sweep_args[2]);
        spec.steps = std::stoi(opt.sweep_args[3]);
    } catch (const std::exception&) {
        std::cerr << "error: sweep: start/stop/steps must be numeric\n";
        return kExitValidation;
    }
    spec.baseline = config_from(opt);
    spec.mc_trials = opt.mc_trials < 0 ? 0 : opt.mc_trials;
    spec.seed = opt.seed;

    const auto violations = validate_sweep(spec);
    if (!violations.empty()) {
        for (const auto& v : violations)
            std::cerr << "error: " << v.field << ": " << v.message << "\n";
        return kExitValidation;
    }

    const auto rows = run_sweep(spec, opt.jobs, opt.grid_points);
    std::ofstream file;
    std::ostream& os = open_output(opt.out, file);
    if (opt.format == "json") {
        const double unit = opt.bits ? 1.0 / std::numbers::ln2 : 1.0;
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& row : rows) {
            nlohmann::json r{{"axis", axis_name(spec.axis)},
                             {"value", row.value},
                             {"delta", std::isfinite(row.delta) ? nlohmann::json(row.delta)
                                                                : nlohmann::json(nullptr)},
                             {"failed", row.failed}};
            if (!row.failed) r["asymptotic"] = capacity_to_json(row.asym, unit);
            if (row.has_mc) r["montecarlo"] = capacity_to_json(row.mc, unit);
            arr.push_back(std::move(r));
        }
        os << arr.dump(2) << "\n";
    } else {
        write_sweep_csv(os, spec, rows);
    }
    return 0;
}

// A.e.p.d.f. of K_alpha/M for both capacity branches plus the MC histogram.
int run_fig1(const Options& opt) {
    SystemConfig cfg = preset_baseline();
    if (int rc = require_valid(cfg)) return rc;
    const Coefficients co = derive_coefficients(cfg);
    const long trials = opt.mc_trials < 0 ? 1000 : opt.mc_trials;

    const SpectralDensity d1 =
        aepdf_k_alpha_auto(co.beta, co.gamma, co.alpha_bar_c1, opt.grid_points);
    const SpectralDensity d2 =
        aepdf_k_alpha_auto(co.beta, co.gamma, co.alpha_bar_c2, opt.grid_points);

    const ChannelDims dims{cfg.users, cfg.relay_antennas, cfg.bs_antennas};
    const EigenSampleSet samples = sample_eigenvalues(dims, co.f1, trials, opt.seed, opt.jobs);
    const SpectralDensity hist = empirical_density(samples, 120);
    if (!opt.dump_eigenvalues.empty()) {
        std::ofstream fe(opt.dump_eigenvalues);
        if (!fe) throw std::runtime_error("cannot write " + opt.dump_eigenvalues);
        write_eigen_csv(fe, samples);
    }

    const std::string p1 = derived_path(opt.out, "fig1", "_aepdf_c1.csv");
    const std::string p2 = derived_path(opt.out, "fig1", "_aepdf_c2.csv");
    const std::string ph = derived_path(opt.out, "fig1", "_hist.csv");
    {
        std::ofstream f1(p1), f2(p2), fh(ph);
        if (!f1 || !f2 || !fh) throw std::runtime_error("cannot write density CSVs");
        write_density_csv(f1, d1);
        write_density_csv(f2, d2);
        write_density_csv(fh, hist);
    }

    nlohmann::json j = point_report(cfg, trials, opt.seed, opt.jobs, opt.bits, opt.grid_points);
    j["fig1"] = {
        {"aepdf_c1", p1},
        {"aepdf_c2", p2},
        {"histogram", ph},
        {"ks_distance_c1_vs_mc", ks_distance(d1, hist)},
        {"mc_trials", trials},
    };
    std::ofstream file;
    std::ostream& os = open_output(opt.out, file);
    os << j.dump(2) << "\n";
    return 0;
}

// Capacity vs mu for delta in {0, 0.01, 0.08, 0.15}; nu fixed at 20 dB.
int run_fig2(const Options& opt) {
    const long trials = opt.mc_trials < 0 ? 0 : opt.mc_trials;
    std::ofstream file;
    std::ostream& os = open_output(opt.out, file);
    write_sweep_header(os);
    for (const double delta : preset_delta_values()) {
        SweepSpec spec;
        spec.axis = SweepAxis::mu_db;
        spec.start = 0.0;
        spec.stop = 50.0;
        spec.steps = 26;
        spec.baseline = apply_axis(preset_baseline(), SweepAxis::delta, delta);
        spec.mc_trials = trials;
        spec.seed = opt.seed;
        for (const auto& row : run_sweep(spec, opt.jobs, opt.grid_points))
            write_sweep_row(os, spec.axis, row);
    }
    return 0;
}

// Capacity surface over (mu, nu) without / with impairments.
int run_fig3(const Options& opt, double delta) {
    std::vector<double> mu_vals, nu_vals;
    for (int i = 0; i <= 8; ++i) mu_vals.push_back(5.0 * i);
    nu_vals = mu_vals;
    const SystemConfig base = apply_axis(preset_baseline(), SweepAxis::delta, delta);
    const long trials = opt.mc_trials < 0 ? 0 : opt.mc_trials;
    const auto rows = run_grid(base, SweepAxis::mu_db, mu_vals, SweepAxis::nu_db, nu_vals,
                               trials, opt.seed, opt.jobs, opt.grid_points);
    std::ofstream file;
    std::ostream& os = open_output(opt.out, file);
    write_grid_csv(os, SweepAxis::mu_db, SweepAxis::nu_db, rows);
    return 0;
}

// Capacity surface over the dimension ratios (beta, gamma); gamma descends so
// the 1/gamma axis ascends row-wise.
int run_fig4(const Options& opt, double delta) {
    std::vector<double> beta_vals, gamma_vals;
    for (int i = 1; i <= 10; ++i) beta_vals.push_back(static_cast<double>(i));
    for (int i = 10; i >= 1; --i) gamma_vals.push_back(static_cast<double>(i));
    const SystemConfig base = apply_axis(preset_baseline(), SweepAxis::delta, delta);
    const long trials = opt.mc_trials < 0 ? 0 : opt.mc_trials;
    const auto rows = run_grid(base, SweepAxis::beta, beta_vals, SweepAxis::gamma, gamma_vals,
                               trials, opt.seed, opt.jobs, opt.grid_points);
    std::ofstream file;
    std::ostream& os = open_output(opt.out, file);
    write_grid_csv(os, SweepAxis::beta, SweepAxis::gamma, rows);
    return 0;
}

int dispatch(const Options& opt) {
    if (!opt.preset.empty()) {
        if (opt.preset == "fig1") return run_fig1(opt);
        if (opt.preset == "fig2") return run_fig2(opt);
        if (opt.preset == "fig3a") return run_fig3(opt, 0.0);
        if (opt.preset == "fig3b") return run_fig3(opt, 0.08);
        if (opt.preset == "fig4a") return run_fig4(opt, 0.0);
        if (opt.preset == "fig4b") return run_fig4(opt, 0.08);
        std::cerr << "error: unknown preset '" << opt.preset
                  << "' (fig1|fig2|fig3a|fig3b|fig4a|fig4b)\n";
        return kExitValidation;
    }
    if (!opt.sweep_args.empty()) return run_sweep_mode(opt);
    return run_point_mode(opt);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ergodic capacity of dual-hop AF MIMO relays with transceiver impairments"};
    app.get_formatter()->column_width(34);

    Options opt;
    app.set_config("--config", "", "Flat key=value config file; flags override file values");
    app.add_option("--preset", opt.preset, "fig1|fig2|fig3a|fig3b|fig4a|fig4b");
    app.add_option("--mu-db", opt.mu_db, "Per-user SNR mu in dB")->capture_default_str();
    app.add_option("--nu-db", opt.nu_db, "Relay gain nu in dB")->capture_default_str();
    app.add_option("--alpha", opt.alpha,
                   "Relay power budget; switches nu to the from-alpha rule");
    app.add_option("--K", opt.users, "User count")->capture_default_str();
    app.add_option("--M", opt.relay_antennas, "Relay antenna count")->capture_default_str();
    app.add_option("--N", opt.bs_antennas, "BS antenna count")->capture_default_str();
    app.add_option("--delta", opt.delta, "Common impairment severity for all four parameters")
        ->capture_default_str();
    app.add_option("--delta-t1", opt.delta_t1, "Override transmit impairment, hop 1");
    app.add_option("--delta-t2", opt.delta_t2, "Override transmit impairment, hop 2");
    app.add_option("--delta-r1", opt.delta_r1, "Override receive impairment, hop 1");
    app.add_option("--delta-r2", opt.delta_r2, "Override receive impairment, hop 2");
    app.add_option("--sweep", opt.sweep_args,
                   "Axis sweep: <mu_db|nu_db|beta|gamma|delta> <start> <stop> <steps>")
        ->expected(4);
    app.add_option("--mc-trials", opt.mc_trials,
                   "Monte Carlo trials (0 disables; fig1 defaults to 1000)");
    app.add_option("--seed", opt.seed, "PRNG seed")->envname("RELAY_RMT_SEED");
    app.add_option("--out", opt.out, "Output path (default stdout); fig1 derives CSV names");
    app.add_option("--format", opt.format, "csv|json (point mode defaults to json)")
        ->check(CLI::IsMember({"csv", "json", ""}));
    app.add_option("--jobs", opt.jobs, "Concurrent evaluations")->check(CLI::PositiveNumber);
    app.add_flag("--bits", opt.bits, "Report capacities in bits instead of nats");
    app.add_option("--grid-points", opt.grid_points, "Density grid resolution")
        ->check(CLI::PositiveNumber);
    app.add_option("--dump-eigenvalues", opt.dump_eigenvalues,
                   "fig1: also write the raw MC eigenvalues (trial,eigenvalue CSV)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    try {
        return dispatch(opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
