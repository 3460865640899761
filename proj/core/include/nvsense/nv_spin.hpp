#pragma once

#include <cmath>
#include <functional>

#include "nvsense/errors.hpp"

namespace nvsense::nv_spin {

/// All spin frequencies are plain Hz (not rad/s). Electric couplings are
/// stored in Hz m/V; the conventional literature unit Hz cm/V converts with
/// this single factor.
inline constexpr double hz_cm_per_volt = 1e-2;  // 1 Hz cm/V = 1e-2 Hz m/V

/// Ground-state spin triplet of a single defect center.
struct NVParams {
    double D_zfs = 2.87e9;                 ///< zero-field splitting [Hz]
    double gamma_e = 2.8e10;               ///< gyromagnetic ratio [Hz/T] (2.8 MHz/G)
    double d_parallel = 0.35 * hz_cm_per_volt;   ///< axial electric coupling [Hz m/V]
    double d_perp = 17.0 * hz_cm_per_volt;       ///< transverse electric coupling [Hz m/V]
    double d_perp_prime = 17.0 * hz_cm_per_volt; ///< Delta m = 1 coupling, unused by default
    double axis_polar_angle = std::acos(1.0 / std::sqrt(3.0)); ///< symmetry axis tilt in the lab x-z plane [rad]
    double B_z = 0.0;                      ///< axial magnetic field [T]
    double phi_B = 0.0;                    ///< azimuth of the transverse preparation field [rad]

    void validate() const;
};

/// Spectrum of the |0>, |+>, |-> manifold under transverse mixing.
struct SpinLevels {
    double nu_plus = 0.0;   ///< |0> -> |+> transition [Hz]
    double nu_minus = 0.0;  ///< |0> -> |-> transition [Hz]
    double theta = 0.0;     ///< mixing angle, tan(theta) = xi_perp / beta_z
    double phi_E = 0.0;     ///< transverse-field azimuth [rad]
    double xi_perp = 0.0;   ///< transverse electric splitting [Hz]
    double beta_z = 0.0;    ///< axial Zeeman splitting [Hz]
    bool zeeman_dominated_ok = true;  ///< false when gamma_e*B_z/D >= 0.1
};

struct LabFieldInNVFrame {
    double Ex = 0.0;
    double Ey = 0.0;
    double Ez = 0.0;
};

/// Project a lab-frame z field onto the defect frame for an axis lying in
/// the lab x-z plane. For the standard (111) orientation this is
/// (sqrt(2/3), 0, sqrt(1/3)) * E_z; the norm is preserved.
LabFieldInNVFrame lab_to_nv_field(double E_z_lab,
                                  double axis_polar_angle = std::acos(1.0 / std::sqrt(3.0)));

/// Transition frequencies nu_pm = D +- sqrt(xi_perp^2 + beta_z^2) for a lab
/// z field and an axial magnetic field. nu_plus + nu_minus = 2 D always.
SpinLevels spin_levels(const NVParams& nv, double E_z_lab, double B_z);

/// First-order shift of the |-> state prepared by a transverse magnetic
/// field at azimuth phi_B (B_z = 0): +d_perp Ex_nv cos(2 phi_B).
/// The |+> state shifts by the opposite amount.
double stark_shift(const NVParams& nv, double E_z_lab, double phi_B);

/// Transition-frequency fluctuation correlator [Hz^2] driven by interface
/// field noise: d_perp^2 sin^2(axis angle) transfer^2 C_E(t). An additive
/// hook is provided for a caller-supplied magnetic quartic term.
double nu_fluctuation_correlator(const NVParams& nv, double transfer,
                                 double electrolyte_corr_at_t, double magnetic_term = 0.0);

/// Accumulated phase variance <dpsi^2> [rad^2] after free evolution tau:
/// 4 pi^2 double integral of the stationary correlator, evaluated as
/// 8 pi^2 int_0^tau (tau - s) C(s) ds. Exactly 4 pi^2 C tau^2 for constant C.
double phase_variance(const std::function<double(double)>& nu_corr, double tau);

enum class T2StarConvention {
    eq26,  ///< 1/T2*^2 = (1/2) d^2<dpsi^2>/dt^2 at t=0, i.e. 1/T2* = 2 pi sqrt(C0)
    half,  ///< from the exp(-<dpsi^2>/2) envelope, i.e. 1/T2*^2 = 2 pi^2 C0
};

/// Inhomogeneous dephasing time from the white-noise level C(0) of the
/// frequency correlator. Returns +infinity when C(0) = 0.
double t2_star(const std::function<double(double)>& nu_corr,
               T2StarConvention convention = T2StarConvention::eq26);

/// Same, from the plateau value directly.
double t2_star_from_plateau(double corr0, T2StarConvention convention = T2StarConvention::eq26);

/// Free-induction-decay population <P0(tau)> = (1 - exp(-(tau/T2*)^2) cos psi)/2.
double ramsey_signal(double tau, double T2_star, double psi);

/// Photon statistics of the optical readout.
struct ReadoutParams {
    double alpha = 0.03;         ///< mean photons per shot, spin 0
    double beta_counts = 0.02;   ///< mean photons per shot, spin 1 (2 alpha / 3)

    void validate() const;
};

struct PowerLawFitConstants {
    double A = 0.0;  ///< rate prefactor [Hz (mol/m^3)^-B]
    double B = 0.0;  ///< dimensionless exponent
};

/// Concentration sensitivity [mol m^-3 Hz^-1/2] of the dephasing-rate
/// estimator, for a power-law rate model 1/T2* = A c_b^B and readout noise
/// dominated by photon shot noise (cos psi taken as 1):
///   eta = sqrt(15 t / (2 alpha)) (A/B) c_b^(B+1) t^-2 (T2*)^3 exp((t/T2*)^2).
double sensitivity(const PowerLawFitConstants& fit, double c_b, double tau,
                   const ReadoutParams& readout);

struct T2EstimateStats {
    double var_T2 = 0.0;   ///< (Delta T2*)^2 [s^2]
    double mean_M = 0.0;   ///< expected readout observable
    double var_M = 0.0;    ///< its variance
};

/// Shot-noise variance of a single-delay T2* estimate,
/// (Delta T2*)^2 = 15 (T2*)^6 exp(2 (t/T2*)^2) / (2 alpha t^4 cos^2 psi),
/// together with the readout observable moments it derives from.
T2EstimateStats variance_of_T2_estimate(double T2_star, double tau, double psi,
                                        const ReadoutParams& readout);

}  // namespace nvsense::nv_spin
