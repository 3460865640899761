// Command-line front end: deterministic CSV/JSON outputs for the interface
// profile, concentration sweeps, correlators, Ramsey curves, sensitivity
// estimates and the Monte Carlo cross-check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nvsense/brownian.hpp"
#include "nvsense/config.hpp"
#include "nvsense/constants.hpp"
#include "nvsense/diamond.hpp"
#include "nvsense/electrolyte.hpp"
#include "nvsense/io.hpp"
#include "nvsense/nv_spin.hpp"
#include "nvsense/pipeline.hpp"
#include "nvsense/version.hpp"

namespace fs = std::filesystem;
using nvsense::io::fmt_full;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;  // oracle disagreement
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct CliOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
};

nvsense::config::RunConfig load_config(const CliOptions& opt) {
    nvsense::config::RunConfig cfg;
    if (!opt.config_path.empty()) nvsense::config::apply_file(cfg, opt.config_path);
    for (const auto& s : opt.sets) nvsense::config::apply_assignment(cfg, s);
    if (opt.seed) cfg.mc.seed = *opt.seed;
    cfg.finalize();
    return cfg;
}

void write_manifest(const nvsense::config::RunConfig& cfg, const fs::path& out_dir,
                    const std::string& command) {
    nvsense::io::atomic_write(out_dir / "manifest.txt",
                              nvsense::config::manifest_text(cfg, command));
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return g;
}

// ---------------------------------------------------------------- profile

int cmd_profile(const nvsense::config::RunConfig& cfg, const fs::path& out) {
    using namespace nvsense;
    const auto band = diamond::make_band_model(cfg.dp);
    const auto sol = diamond::solve_interface(cfg.ep, cfg.dp, band);

    // Diamond side: depth axis into the crystal, E = -dphi/ddepth.
    std::ostringstream dcsv;
    dcsv << "depth_m,phi_V,E_Vpm\n";
    for (const auto& s : sol.profile) {
        dcsv << fmt_full(s.depth) << "," << fmt_full(s.phi) << "," << fmt_full(s.E) << "\n";
    }
    io::atomic_write(out / "diamond_profile.csv", dcsv.str());

    // Electrolyte side: height axis toward the solution bulk, E = -dphi/dz.
    std::ostringstream ecsv;
    ecsv << "z_m,phi_V,E_Vpm\n";
    const double z_lo = cfg.ep.Delta * 1e-8;
    std::vector<double> zs{0.0};
    for (double z : log_grid(z_lo, cfg.ep.Delta, 255)) zs.push_back(z);
    for (double z : zs) {
        const double phi = cfg.ep.phi_be + electrolyte::gouy_chapman_potential(cfg.ep, sol.V0, z);
        const double E = electrolyte::field_profile(cfg.ep, sol.V0, z);
        ecsv << fmt_full(z) << "," << fmt_full(phi) << "," << fmt_full(E) << "\n";
    }
    io::atomic_write(out / "electrolyte_profile.csv", ecsv.str());

    std::cout << "phi0 = " << fmt_full(sol.phi0) << " V, E_d0 = " << fmt_full(sol.E_d0)
              << " V/m, residual = " << fmt_full(sol.residual) << " V\n";
    return kExitOk;
}

// ------------------------------------------------------------ sweep / fit

std::string sweep_csv(const std::vector<nvsense::pipeline::SweepPoint>& points) {
    std::ostringstream csv;
    csv << "c_b,phi0_V,E_e0_Vpm,E_nv_Vpm,transfer,plateau_V2pm2,inv_T2star_Hz,error\n";
    for (const auto& pt : points) {
        csv << fmt_full(pt.c_b) << "," << fmt_full(pt.phi0) << "," << fmt_full(pt.E_e0) << ","
            << fmt_full(pt.E_nv) << "," << fmt_full(pt.transfer) << "," << fmt_full(pt.plateau)
            << "," << fmt_full(pt.inv_T2_star) << "," << pt.error << "\n";
    }
    return csv.str();
}

nlohmann::ordered_json summary_json(const nvsense::config::RunConfig& cfg,
                                    const std::string& command) {
    nlohmann::ordered_json j;
    j["tool"] = "nvsense";
    j["version"] = nvsense::version;
    j["command"] = command;
    j["seed"] = cfg.mc.seed;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(
                      nvsense::io::fnv1a(nvsense::config::manifest_text(cfg, command))));
    j["config_hash"] = hash;
    return j;
}

int cmd_sweep(const nvsense::config::RunConfig& cfg, const fs::path& out,
              bool print_fit_to_stdout) {
    using namespace nvsense;
    const auto band = diamond::make_band_model(cfg.dp);
    const auto points = pipeline::run_sweep(cfg.ep, cfg.dp, band, cfg.nv, cfg.depth,
                                            cfg.cb_grid(), cfg.noise);
    io::atomic_write(out / "sweep.csv", sweep_csv(points));

    int failed = 0;
    for (const auto& pt : points) {
        if (!pt.ok()) {
            ++failed;
            std::cerr << "warning: c_b = " << pt.c_b << " failed: " << pt.error << "\n";
        }
    }

    auto j = summary_json(cfg, print_fit_to_stdout ? "fit" : "sweep");
    j["n_points"] = points.size();
    j["n_failed"] = failed;
    const auto fit = pipeline::fit_power_law(points);
    j["fit"]["A_Hz"] = fit.A;
    j["fit"]["B"] = fit.B;
    j["fit"]["rms_log_residual"] = fit.rms_log_residual;
    io::atomic_write(out / "summary.json", j.dump(2) + "\n");

    if (print_fit_to_stdout) {
        std::cout << "A = " << fmt_full(fit.A) << " Hz (mol/m^3)^-B\n";
        std::cout << "B = " << fmt_full(fit.B) << "\n";
    } else {
        std::cout << "sweep: " << points.size() - failed << "/" << points.size()
                  << " points, fit A = " << fmt_full(fit.A) << ", B = " << fmt_full(fit.B)
                  << "\n";
    }
    return kExitOk;
}

// -------------------------------------------------------------- correlator

int cmd_correlator(const nvsense::config::RunConfig& cfg, const fs::path& out) {
    using namespace nvsense;
    std::ostringstream csv;
    csv << "t_s,corr_simplified_V2pm2,corr_full_V2pm2\n";
    for (double t : log_grid(cfg.corr_t_min, cfg.corr_t_max, cfg.corr_n_points)) {
        const double simple = electrolyte::field_correlator_simplified(cfg.ep, t);
        const double full = electrolyte::field_correlator_full(cfg.ep, cfg.corr_V0, t);
        csv << fmt_full(t) << "," << fmt_full(simple) << "," << fmt_full(full) << "\n";
    }
    io::atomic_write(out / "correlator.csv", csv.str());
    std::cout << "plateau (both species) = "
              << fmt_full(electrolyte::white_noise_variance(cfg.ep)) << " (V/m)^2\n";
    return kExitOk;
}

// ------------------------------------------------------------------ ramsey

int cmd_ramsey(const nvsense::config::RunConfig& cfg, const fs::path& out) {
    using namespace nvsense;
    const auto band = diamond::make_band_model(cfg.dp);
    const auto pt = pipeline::sweep_point(cfg.ep, cfg.dp, band, cfg.nv, cfg.depth, cfg.ep.c_b,
                                          cfg.noise);
    if (!pt.ok()) throw Error("ramsey: pipeline point failed: " + pt.error);
    const double T2 = 1.0 / pt.inv_T2_star;
    std::ostringstream csv;
    csv << "tau_s,P0\n";
    for (double tau : log_grid(cfg.ramsey_tau_min, cfg.ramsey_tau_max, cfg.ramsey_n_points)) {
        const double psi = 2.0 * 3.14159265358979323846 * cfg.ramsey_detuning_Hz * tau;
        csv << fmt_full(tau) << "," << fmt_full(nv_spin::ramsey_signal(tau, T2, psi)) << "\n";
    }
    io::atomic_write(out / "ramsey.csv", csv.str());
    std::cout << "T2* = " << fmt_full(T2) << " s at c_b = " << fmt_full(cfg.ep.c_b)
              << " mol/m^3\n";
    return kExitOk;
}

// ------------------------------------------------------------- sensitivity

int cmd_sensitivity(const nvsense::config::RunConfig& cfg, const fs::path& out) {
    using namespace nvsense;
    const nv_spin::PowerLawFitConstants fit{cfg.sens_A, cfg.sens_B};
    const double eta = nv_spin::sensitivity(fit, cfg.sens_cb, cfg.sens_tau, cfg.readout);
    std::ostringstream csv;
    csv << "tau_s,eta_molpm3_per_sqrtHz\n";
    for (double tau : log_grid(cfg.sens_tau / 30.0, cfg.sens_tau * 30.0, 121)) {
        csv << fmt_full(tau) << ","
            << fmt_full(nv_spin::sensitivity(fit, cfg.sens_cb, tau, cfg.readout)) << "\n";
    }
    io::atomic_write(out / "sensitivity.csv", csv.str());
    std::cout << "eta = " << fmt_full(eta) << " mol m^-3 Hz^-1/2 (c_b = " << fmt_full(cfg.sens_cb)
              << ", tau = " << fmt_full(cfg.sens_tau) << ")\n";
    return kExitOk;
}

// ------------------------------------------------------------------ oracle

struct OracleCheck {
    int compared = 0;
    int beyond_3sigma = 0;
};

void check_points(const std::vector<nvsense::brownian::CorrelatorPoint>& pts,
                  const std::vector<double>& reference, const char* label, OracleCheck& chk) {
    for (size_t i = 0; i < pts.size(); ++i) {
        chk.compared += 1;
        const double z = (pts[i].value - reference[i]) / pts[i].stderr_;
        std::cout << label << " lag " << fmt_full(pts[i].lag) << ": mc " << fmt_full(pts[i].value)
                  << " ref " << fmt_full(reference[i]) << " z " << fmt_full(z) << "\n";
        if (std::abs(z) > 3.0) chk.beyond_3sigma += 1;
    }
}

int cmd_oracle(const nvsense::config::RunConfig& cfg, const fs::path& out) {
    using namespace nvsense;
    const auto& mc = cfg.mc;

    // Field correlator in the window [0, f L].
    std::vector<double> field_lags;
    for (int k = 0; k <= 12; ++k) field_lags.push_back(k * 40.0 * mc.dt);
    const auto field_pts = brownian::simulate_field_correlator(mc, field_lags);
    OracleCheck chk;
    {
        std::ostringstream csv;
        csv << "lag_s,correlator,stderr\n";
        for (const auto& p : field_pts) {
            csv << fmt_full(p.lag) << "," << fmt_full(p.value) << "," << fmt_full(p.stderr_)
                << "\n";
        }
        io::atomic_write(out / "oracle_field.csv", csv.str());
        // Only the lag-0 point has an exact closed form in the closed box.
        std::vector<double> ref{brownian::analytic_field_plateau(mc)};
        std::vector<brownian::CorrelatorPoint> first{field_pts.front()};
        check_points(first, ref, "field", chk);
    }

    // Density correlator across a few bin pairs, one simulation for all.
    {
        const int mid = mc.n_bins / 2;
        const std::vector<brownian::BinPair> pairs{{mid, mid}, {mid, mid + 1}, {mid, mid + 2}};
        const double w = mc.bin_width();
        std::vector<double> lags{0.0};
        for (int sep = 1; sep <= 2; ++sep) {
            lags.push_back(sep * sep * w * w / (4.0 * mc.diffusion));
        }
        const auto per_pair = brownian::simulate_density_correlators(mc, lags, pairs);
        std::ostringstream csv;
        csv << "lag_s,correlator,stderr\n";
        for (size_t k = 0; k < pairs.size(); ++k) {
            std::vector<double> ref;
            for (const auto& p : per_pair[k]) {
                ref.push_back(
                    brownian::analytic_density_correlator(mc, p.lag, pairs[k].i, pairs[k].j));
            }
            char label[32];
            std::snprintf(label, sizeof(label), "density(%d,%d)", pairs[k].i, pairs[k].j);
            check_points(per_pair[k], ref, label, chk);
            for (const auto& p : per_pair[k]) {
                csv << fmt_full(p.lag) << "," << fmt_full(p.value) << "," << fmt_full(p.stderr_)
                    << "\n";
            }
        }
        io::atomic_write(out / "oracle_density.csv", csv.str());
    }

    const double frac = chk.compared > 0 ? double(chk.beyond_3sigma) / chk.compared : 0.0;
    std::cout << "oracle: " << chk.beyond_3sigma << "/" << chk.compared
              << " points beyond 3 sigma\n";
    if (frac > 0.05) {
        std::cerr << "oracle: analytic/Monte-Carlo disagreement on more than 5% of points\n";
        return kExitMismatch;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"electrolyte-diamond interface noise and spin dephasing toolkit"};
    app.set_version_flag("--version", std::string("nvsense ") + nvsense::version);
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions opt;
    app.add_option("--config", opt.config_path, "key=value config file");
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_option("--set", opt.sets, "override a config key (repeatable)")
        ->take_all()
        ->expected(-1);
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "Monte Carlo seed override");

    auto* profile = app.add_subcommand("profile", "potential/field profiles on both sides");
    auto* sweep = app.add_subcommand("sweep", "dephasing rate versus concentration");
    auto* fit = app.add_subcommand("fit", "sweep + power-law fit, prints A and B");
    auto* correlator = app.add_subcommand("correlator", "interface field-noise correlator");
    auto* ramsey = app.add_subcommand("ramsey", "free-induction-decay curve");
    auto* sensitivity = app.add_subcommand("sensitivity", "concentration sensitivity estimate");
    auto* oracle = app.add_subcommand("oracle", "Monte Carlo versus analytic correlators");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (seed_opt->count() > 0) opt.seed = seed_flag;
    nvsense::config::RunConfig cfg;
    try {
        cfg = load_config(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const fs::path out(opt.out_dir);
        fs::create_directories(out);

        std::string command = "?";
        for (const auto* sub : {profile, sweep, fit, correlator, ramsey, sensitivity, oracle}) {
            if (sub->parsed()) command = sub->get_name();
        }
        write_manifest(cfg, out, command);

        if (profile->parsed()) return cmd_profile(cfg, out);
        if (sweep->parsed()) return cmd_sweep(cfg, out, false);
        if (fit->parsed()) return cmd_sweep(cfg, out, true);
        if (correlator->parsed()) return cmd_correlator(cfg, out);
        if (ramsey->parsed()) return cmd_ramsey(cfg, out);
        if (sensitivity->parsed()) return cmd_sensitivity(cfg, out);
        if (oracle->parsed()) return cmd_oracle(cfg, out);
        std::cerr << "no subcommand\n";
        return kExitConfig;
    } catch (const nvsense::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nvsense::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}
