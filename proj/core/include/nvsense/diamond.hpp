#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "nvsense/constants.hpp"
#include "nvsense/electrolyte.hpp"
#include "nvsense/errors.hpp"

namespace nvsense::diamond {

/// Implanted diamond slab behind the interface.
///
/// Coordinates: depth w >= 0 measured into the crystal from the interface.
/// Interior fields are reported as E = -dphi/dw (positive when the potential
/// decreases with depth). Energies are in eV with the valence band edge at 0.
struct DiamondParams {
    double eps_d = 5.8 * constants.eps0;  ///< permittivity [F/m]
    double E_gap = 5.47;                  ///< band gap [eV]
    double m_eff_n = 0.57;                ///< conduction-band effective mass [m0]
    double m_eff_p = 0.8;                 ///< valence-band effective mass [m0]
    double D_areal = 1e16;                ///< implanted areal density [1/m^2]
    double d_max = 14e-9;                 ///< implantation depth [m]
    double frac_Ns = 0.96;                ///< substitutional-nitrogen fraction
    double frac_NV = 0.04;                ///< vacancy-defect (acceptor) fraction
    double E_d_below_Ec = 1.7;            ///< donor level below E_c [eV]
    double E_a_above_Ev = 1.0;            ///< acceptor level above E_v [eV]
    double N_d2 = 0.0;                    ///< optional second donor density [1/m^3]
    double E_d2_below_Ec = 2.75;          ///< its level below E_c [eV]
    double z_bulk = 100e-9;               ///< depth of the bulk Dirichlet condition [m]
    double phi_bd = 0.0;                  ///< bulk potential [V]
    double T = 298.0;                     ///< temperature [K]

    /// Dopant volume densities, spread uniformly over the implanted layer.
    double donor_density() const { return frac_Ns * D_areal / d_max; }
    double acceptor_density() const { return frac_NV * D_areal / d_max; }

    void validate() const;
};

/// Band-structure quantities derived from DiamondParams at fixed T.
struct BandModel {
    double N_c = 0.0;  ///< conduction-band effective density of states [1/m^3]
    double N_v = 0.0;  ///< valence-band effective density of states [1/m^3]
    double mu0 = 0.0;  ///< intrinsic chemical potential [eV]
    double E_c = 0.0;  ///< conduction band edge [eV]
    double E_v = 0.0;  ///< valence band edge [eV], gauge zero
};

/// N = 2 (m* k T / (2 pi hbar^2))^(3/2) for each band.
std::pair<double, double> effective_dos(const DiamondParams& dp);

/// mu0 = (E_v + E_c)/2 + (3/4) k T ln(m_p*/m_n*).
double intrinsic_mu(const DiamondParams& dp, const BandModel& band);

/// Convenience: band edges (E_v = 0 gauge), DOS and intrinsic level.
BandModel make_band_model(const DiamondParams& dp);

/// Boltzmann carrier densities {n, p} [1/m^3] at local potential phi [V].
/// Occupations are referenced to the bulk potential phi_bd, so a global
/// shift of all potentials leaves every density unchanged.
std::pair<double, double> carrier_densities(const DiamondParams& dp, const BandModel& band,
                                            double phi);

/// Ionized dopant densities {Nd+, Na-} [1/m^3]; each lies in [0, N].
std::pair<double, double> ionized_dopants(const DiamondParams& dp, const BandModel& band,
                                          double phi);

/// Space charge rho_d(phi) = e [p - n + Nd+ - Na-] [C/m^3]. Depends on the
/// potential only, not explicitly on depth. Monotone non-increasing in phi.
double charge_density(const DiamondParams& dp, const BandModel& band, double phi);

/// Exact antiderivative: integral of rho_d dphi from phi_a to phi_b [J/m^3].
double charge_integral(const DiamondParams& dp, const BandModel& band, double phi_a,
                       double phi_b);

/// First integral of the interior Poisson equation. E_d0 is the diamond-side
/// interface field (depth convention, signed); returns the field at the
/// potential value phi on the branch leaving the interface:
///   E(phi) = sgn(E_d0) sqrt(E_d0^2 - (2/eps_d) * integral(rho_d, phi0..phi)).
/// Throws RadicandNegativeError when phi lies past a turning point.
double field_first_integral(const DiamondParams& dp, const BandModel& band, double phi0,
                            double E_d0, double phi);

/// Depth at which the interior potential first reaches phi_target, by
/// integrating dw = |dphi| / |E(phi)| along the branch leaving the interface.
/// Integrable turning-point endpoints are handled with a sqrt substitution.
double depth_of_potential(const DiamondParams& dp, const BandModel& band, double phi0,
                          double E_d0, double phi_target);

struct ProfileSample {
    double depth = 0.0;  ///< [m]
    double phi = 0.0;    ///< [V]
    double E = 0.0;      ///< -dphi/dw [V/m]
};

struct MarchTable;  // opaque integrated profile, defined in the .cpp

/// Matched electrolyte/diamond interface.
struct InterfaceSolution {
    double phi0 = 0.0;      ///< surface potential phi(0) [V]
    double V0 = 0.0;        ///< phi(0) - phi_be [V]
    double E_e0 = 0.0;      ///< solution-side interface field, depth convention [V/m]
    double E_d0 = 0.0;      ///< diamond-side interface field, depth convention [V/m]
    std::vector<ProfileSample> profile;  ///< >= 200 samples, log-spaced near the surface
    bool converged = false;
    double residual = 0.0;  ///< |phi(z_bulk) - phi_bd| [V]

    std::shared_ptr<const MarchTable> march;  ///< exact interior profile for queries
};

/// Find the surface potential phi0 such that the interior profile, started
/// from the electrolyte interface field at V0 = phi0 - phi_be, relaxes to
/// phi_bd at depth z_bulk. Root search is safeguarded bisection/secant with
/// bracket expansion (NoBracketError beyond phi_bd - 5 V .. phi_be + 5 V,
/// NonConvergedError after 200 iterations).
InterfaceSolution solve_interface(const electrolyte::ElectrolyteParams& ep,
                                  const DiamondParams& dp, const BandModel& band);

/// Interior field at the given depth [V/m], from the matched solution.
double field_at_nv(const InterfaceSolution& sol, const DiamondParams& dp, const BandModel& band,
                   double depth);

/// Interior potential at the given depth [V].
double potential_at_depth(const InterfaceSolution& sol, double depth);

/// Dimensionless attenuation d E(depth) / d E_e0 of interface-field changes,
/// by central differences with step-halving (Richardson) control: the
/// perturbed surface potential is re-derived from the equilibrium
/// field-voltage relation, displacement matching is re-applied, and the
/// interior profile is re-integrated. Throws DerivativeUnstableError when
/// the two step sizes disagree by more than 5%.
double transfer_derivative(const electrolyte::ElectrolyteParams& ep, const DiamondParams& dp,
                           const BandModel& band, double depth,
                           const InterfaceSolution* base = nullptr);

}  // namespace nvsense::diamond
