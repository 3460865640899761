#pragma once

#include <cstdint>
#include <vector>

#include "nvsense/constants.hpp"
#include "nvsense/errors.hpp"

namespace nvsense::brownian {

/// Reflecting-box random-walk validation of the diffusion correlators.
///
/// Particles random-walk in [0, box_length] with Gaussian steps of variance
/// 2 D dt and reflecting walls, so the particle number is conserved exactly.
/// Counts in a sub-window of the closed box are binomial; the analytic
/// references below carry the corresponding finite-reservoir factors and
/// reduce to the open-system (Poisson) forms as the window fraction -> 0.
struct McConfig {
    int n_particles = 10000;        ///< walkers per species
    double box_length = 1e-6;       ///< [m]
    double area = 1e-12;            ///< transverse area [m^2]
    double diffusion = 2.3e-9;      ///< [m^2/s]
    double dt = 4e-8;               ///< step [s]
    long n_steps = 10000;           ///< production steps per replica
    int n_bins = 24;                ///< density histogram bins
    std::uint64_t seed = 12345;     ///< base RNG seed, replicas offset from it
    int z_s = 2;                    ///< charge magnitude per walker [e]
    double eps_e = 80.0 * constants.eps0;  ///< permittivity for field scaling [F/m]
    double window_fraction = 0.05;  ///< field window [0, f * box_length]
    int replicas = 8;               ///< independent streams, used for error bars
    long burnin_steps = 0;          ///< 0: auto (coarse-stepped, >= box^2/D of simulated time)

    double bin_width() const { return box_length / n_bins; }
    void validate() const;  ///< throws ResolutionError when bins are too fine for dt
};

struct CorrelatorPoint {
    double lag = 0.0;     ///< [s]
    double value = 0.0;
    double stderr_ = 0.0; ///< standard error over replicas
};

struct BinPair {
    int i = 0;
    int j = 0;
};

/// Lag correlator of the binned number density between bins i and j
/// [1/m^6], time-averaged over the production run; replica spread gives the
/// standard errors. Deterministic for a fixed seed.
std::vector<CorrelatorPoint> simulate_density_correlator(const McConfig& cfg,
                                                         const std::vector<double>& lag_grid,
                                                         int bin_i, int bin_j);

/// Same, for several bin pairs out of a single simulation (one result vector
/// per pair, in input order).
std::vector<std::vector<CorrelatorPoint>> simulate_density_correlators(
    const McConfig& cfg, const std::vector<double>& lag_grid, const std::vector<BinPair>& pairs);

/// Lag correlator of the interface-field fluctuation [ (V/m)^2 ] carried by
/// two oppositely charged species: dE = F/(eps N_A A) * z_s * (dN+ - dN-)
/// with dN the count fluctuation in the window [0, f L].
std::vector<CorrelatorPoint> simulate_field_correlator(const McConfig& cfg,
                                                       const std::vector<double>& lag_grid);

/// Time-averaged density per bin with replica standard errors [1/m^3];
/// uniform within statistics after burn-in.
std::vector<CorrelatorPoint> simulate_density_profile(const McConfig& cfg);

/// Closed-form binned density correlator for the closed box: Gaussian
/// propagator coarse-grained over the two bins, minus the <n>/(A L)
/// canonical term. Exact at lag 0 (binomial statistics).
double analytic_density_correlator(const McConfig& cfg, double lag, int bin_i, int bin_j);

/// Exact lag-0 field-fluctuation variance of the window count statistics:
/// (F z_s / (eps N_A A))^2 * 2 n p (1-p). Equals the continuum white-noise
/// plateau scaled to the walker density, times the finite-box factor (1-p).
double analytic_field_plateau(const McConfig& cfg);

/// Continuum plateau scaled to the walker density without the finite-box
/// factor (the p -> 0 limit of analytic_field_plateau / (1-p)).
double continuum_field_plateau(const McConfig& cfg);

/// Mean walker density <n> = n_particles / (A L) [1/m^3].
double mean_density(const McConfig& cfg);

}  // namespace nvsense::brownian
