#pragma once

namespace nvsense {

/// Fixed physical constants, SI units throughout.
///
/// F, R and N_A are kept at the slightly rounded values conventional in the
/// electrochemistry literature; the remainder are CODATA. They are not meant
/// to be mutually consistent to more digits than quoted.
struct PhysicalConstants {
    double F = 96485.3365;          ///< Faraday constant [C/mol]
    double R = 8.314;               ///< molar gas constant [J/(mol K)]
    double N_A = 6.02e23;           ///< Avogadro number [1/mol]
    double k = 1.380649e-23;        ///< Boltzmann constant [J/K]
    double e = 1.602176634e-19;     ///< elementary charge [C]
    double hbar = 1.054571817e-34;  ///< reduced Planck constant [J s]
    double eps0 = 8.8541878128e-12; ///< vacuum permittivity [F/m]
    double m0 = 9.1093837015e-31;   ///< electron rest mass [kg]
};

inline constexpr PhysicalConstants constants{};

}  // namespace nvsense
