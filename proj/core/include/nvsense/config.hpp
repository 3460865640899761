#pragma once

#include <string>
#include <vector>

#include "nvsense/brownian.hpp"
#include "nvsense/diamond.hpp"
#include "nvsense/electrolyte.hpp"
#include "nvsense/nv_spin.hpp"
#include "nvsense/pipeline.hpp"

namespace nvsense::config {

/// Flat key=value run configuration. Defaults reproduce the reference
/// parameter set end to end; every key can be overridden from a config file
/// or a --set flag. Unknown keys are rejected.
struct RunConfig {
    // One temperature feeds both media.
    double temperature = 298.0;
    // Permittivities are configured as relative values.
    double eps_r_electrolyte = 80.0;
    double eps_r_diamond = 5.8;
    // Spin couplings are configured in Hz cm/V.
    double d_parallel_Hzcm = 0.35;
    double d_perp_Hzcm = 17.0;
    double d_perp_prime_Hzcm = 17.0;

    electrolyte::ElectrolyteParams ep;
    diamond::DiamondParams dp;
    nv_spin::NVParams nv;
    nv_spin::ReadoutParams readout;
    brownian::McConfig mc;
    pipeline::NoiseModel noise;

    // Sweep driver.
    double sweep_cb_min = 1e-2;
    double sweep_cb_max = 1e3;
    int sweep_n_points = 25;
    double depth = 10e-9;

    // Correlator driver.
    double corr_t_min = 1e-6;
    double corr_t_max = 1.0;
    int corr_n_points = 60;
    double corr_V0 = 0.0;

    // Ramsey driver.
    double ramsey_tau_min = 1e-7;
    double ramsey_tau_max = 5e-5;
    int ramsey_n_points = 200;
    double ramsey_detuning_Hz = 2.5e5;

    // Sensitivity driver.
    double sens_A = 39295.0;
    double sens_B = 0.417;
    double sens_tau = 1e-5;
    double sens_cb = 10.0;

    /// Propagate the cross-module knobs (temperature, permittivities, unit
    /// conversions) into the parameter structs and validate everything.
    void finalize();

    /// Concentration grid for the sweep commands.
    std::vector<double> cb_grid() const;
};

/// Parse a config file (key=value lines, '#' comments) into cfg.
void apply_file(RunConfig& cfg, const std::string& path);

/// Apply one "key=value" assignment (--set flag or config line).
void apply_assignment(RunConfig& cfg, const std::string& assignment);

/// All keys with their current values, one per line, in registry order.
/// Round-trips exactly: feeding the text back through apply reproduces cfg.
std::string manifest_text(const RunConfig& cfg, const std::string& command);

}  // namespace nvsense::config
