#pragma once

#include <string>
#include <vector>

#include "nvsense/diamond.hpp"
#include "nvsense/electrolyte.hpp"
#include "nvsense/nv_spin.hpp"

namespace nvsense::pipeline {

/// Conventions threaded through the concentration-to-dephasing chain. The
/// defaults here (single-species plateau, eq26 rate) are the pair the
/// reference dephasing curve is calibrated against; the double-layer module
/// itself defaults to the two-species sum.
struct NoiseModel {
    electrolyte::SpeciesSum species_sum = electrolyte::SpeciesSum::single;
    nv_spin::T2StarConvention t2_convention = nv_spin::T2StarConvention::eq26;
};

struct SweepPoint {
    double c_b = 0.0;          ///< [mol/m^3]
    double phi0 = 0.0;         ///< matched surface potential [V]
    double E_e0 = 0.0;         ///< solution-side interface field, depth convention [V/m]
    double E_nv = 0.0;         ///< interior field at the probe depth [V/m]
    double transfer = 0.0;     ///< dE(depth)/dE_e0
    double plateau = 0.0;      ///< white-noise field variance [(V/m)^2]
    double inv_T2_star = 0.0;  ///< dephasing rate [Hz]
    std::string error;         ///< nonempty when this point failed

    bool ok() const { return error.empty(); }
};

struct PowerLawFit {
    double A = 0.0;                ///< rate at unit concentration [Hz (mol/m^3)^-B]
    double B = 0.0;                ///< dimensionless exponent
    double rms_log_residual = 0.0; ///< rms of ln-space fit residuals
};

/// One point of the concentration sweep: interface solve, transfer
/// derivative, noise plateau and dephasing rate at the probe depth.
SweepPoint sweep_point(const electrolyte::ElectrolyteParams& ep_template,
                       const diamond::DiamondParams& dp, const diamond::BandModel& band,
                       const nv_spin::NVParams& nv, double depth, double c_b,
                       const NoiseModel& noise = {});

/// Full sweep over cb_grid. Points are independent and run concurrently;
/// per-point failures are captured in the error field, never aborting the
/// sweep. Results come back in input order.
std::vector<SweepPoint> run_sweep(const electrolyte::ElectrolyteParams& ep_template,
                                  const diamond::DiamondParams& dp,
                                  const diamond::BandModel& band, const nv_spin::NVParams& nv,
                                  double depth, const std::vector<double>& cb_grid,
                                  const NoiseModel& noise = {}, bool parallel = true);

/// Log-spaced default grid: 25 points spanning 1e-2 .. 1e3 mol/m^3.
std::vector<double> default_cb_grid(double cb_min = 1e-2, double cb_max = 1e3, int n = 25);

/// Ordinary least squares on (ln c_b, ln rate): rate = A c_b^B. Failed
/// points are skipped; throws InsufficientPointsError below 5 usable points.
PowerLawFit fit_power_law(const std::vector<SweepPoint>& points);

struct StarkRow {
    double c_b_lo = 0.0;
    double c_b_hi = 0.0;
    double delta_E = 0.0;      ///< field change at the probe depth [V/m]
    double delta_shift = 0.0;  ///< Stark shift change of the |-> state [Hz]
};

/// Field and Stark-shift change between concentration pairs, evaluated at
/// the probe depth with phi_B from the spin parameter set.
std::vector<StarkRow> stark_sensing_table(const electrolyte::ElectrolyteParams& ep_template,
                                          const diamond::DiamondParams& dp,
                                          const diamond::BandModel& band,
                                          const nv_spin::NVParams& nv, double depth,
                                          const std::vector<std::pair<double, double>>& cb_pairs);

}  // namespace nvsense::pipeline
