#pragma once

#include "nvsense/constants.hpp"
#include "nvsense/errors.hpp"

namespace nvsense::electrolyte {

/// Symmetric z:z salt near a blocking interface.
///
/// Geometry: z = 0 at the solid surface, z = Delta at the bulk reference
/// plane where the potential equals phi_be. All concentrations are molar
/// volume concentrations [mol/m^3].
struct ElectrolyteParams {
    double c_b = 1.0;                         ///< bulk concentration per species [mol/m^3]
    int z_s = 2;                              ///< ion valence magnitude
    double D_plus = 2.3e-9;                   ///< cation diffusion constant [m^2/s]
    double D_minus = 2.3e-9;                  ///< anion diffusion constant [m^2/s]
    double eps_e = 80.0 * constants.eps0;     ///< solution permittivity [F/m]
    double T = 298.0;                         ///< temperature [K]
    double Delta = 1e-3;                      ///< interface-to-bulk distance [m]
    double A = 4e-6;                          ///< transverse interface area [m^2]
    double phi_be = 1.5;                      ///< potential at z = Delta [V]

    void validate() const;
};

enum class Species { cation, anion };

/// Species-sum convention for the white-noise plateau: the double-layer
/// correlator sums z_s^2 over both ions (factor 2), while the single-species
/// form drops the sum (factor 1). Both are in circulation; see
/// white_noise_variance.
enum class SpeciesSum { single = 1, both = 2 };

/// Inverse Debye screening length kappa = sqrt(2 z^2 F^2 c_b / (R T eps_e)) [1/m].
double debye_kappa(const ElectrolyteParams& p);

/// Exact Gouy-Chapman potential phi(z) - phi(Delta) [V] for surface offset
/// V0 = phi(0) - phi(Delta). Valid only in the strongly screened regime;
/// throws ScreeningRegimeError unless kappa*Delta > 10.
double gouy_chapman_potential(const ElectrolyteParams& p, double V0, double z);

/// Debye-Hueckel (linearized) potential, valid for any kappa*Delta:
/// phi(z) - phi(Delta) = V0 sinh(kappa (Delta - z)) / sinh(kappa Delta).
double linearized_potential(const ElectrolyteParams& p, double V0, double z);

/// Field -dphi/dz of the linearized solution. Tends to V0/Delta (parallel
/// plates) as kappa*Delta -> 0.
double linearized_field(const ElectrolyteParams& p, double V0, double z);

/// Boltzmann-weighted equilibrium concentration of one species at height z.
/// Satisfies c_+(z) * c_-(z) = c_b^2 and c_s(Delta) = c_b.
double concentration_profile(const ElectrolyteParams& p, double V0, double z, Species s);

/// Equilibrium field -dphi/dz at height z for the exact profile [V/m].
double field_profile(const ElectrolyteParams& p, double V0, double z);

/// Equilibrium field on the solution side of the interface [V/m]:
/// E(0+) = (2 kappa R T / (z_s F)) sinh(z_s F V0 / (2 R T)). Odd in V0.
double interface_field(const ElectrolyteParams& p, double V0);

/// Analytic inverse of interface_field (asinh form); exact round trip.
double invert_interface_field(const ElectrolyteParams& p, double E);

/// Closed-form lag correlator of the interface-field fluctuations
/// <dE(0,t) dE(0,0)> [ (V/m)^2 ] for a flat equilibrium profile. At t = 0 it
/// equals the white-noise plateau; it decays monotonically to zero once the
/// diffusion length sqrt(4 D t) exceeds Delta. Linear in c_b.
double field_correlator_simplified(const ElectrolyteParams& p, double t);

/// Same correlator for a biased interface (surface offset V0): numerical
/// quadrature over the equilibrium concentration profile. Agrees with the
/// simplified form when V0 = 0. Requires t > 0 and kappa*Delta > 10.
double field_correlator_full(const ElectrolyteParams& p, double V0, double t);

/// t-independent plateau of the field correlator in the Delta >> sqrt(4Dt)
/// regime: factor * z_s^2 F^2 Delta c_b / (N_A A eps_e^2), where factor is
/// the species-sum convention (default: both species, matching the closed
/// form above at t = 0).
double white_noise_variance(const ElectrolyteParams& p, SpeciesSum convention = SpeciesSum::both);

}  // namespace nvsense::electrolyte
