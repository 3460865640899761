#include "nvsense/electrolyte.hpp"

#include <cmath>

#include "nvsense/numerics.hpp"

namespace nvsense::electrolyte {

namespace {

constexpr double kMinKappaDelta = 10.0;
constexpr double kSqrtPi = 1.7724538509055160273;

// z_s F / (R T): converts volts to the dimensionless potential.
double volt_scale(const ElectrolyteParams& p) {
    return p.z_s * constants.F / (constants.R * p.T);
}

void require_screened(const ElectrolyteParams& p) {
    const double kd = debye_kappa(p) * p.Delta;
    if (!(kd > kMinKappaDelta)) {
        throw ScreeningRegimeError("kappa*Delta = " + std::to_string(kd) +
                                   " <= 10: closed-form double layer invalid");
    }
}

void require_height(const ElectrolyteParams& p, double z) {
    if (!(z >= 0.0 && z <= p.Delta)) {
        throw InvalidParams("height z must lie in [0, Delta]");
    }
}

double checked_exp(double x, const char* what) {
    if (std::abs(x) > 700.0) {
        throw OverflowError(std::string(what) + ": exponent magnitude exceeds 700");
    }
    return std::exp(x);
}

// Plateau prefactor per unit species factor: z^2 F^2 Delta c_b / (N_A A eps^2).
double plateau_per_species(const ElectrolyteParams& p) {
    const double zF = p.z_s * constants.F;
    return zF * zF * p.Delta * p.c_b / (constants.N_A * p.A * p.eps_e * p.eps_e);
}

// Braces factor of the closed-form correlator for one species:
// Erf(u) - (1 - exp(-u^2)) / (u sqrt(pi)), with u = Delta / sqrt(4 D t).
double decay_factor(double Delta, double D, double t) {
    if (t == 0.0) return 1.0;
    const double u = Delta / std::sqrt(4.0 * D * t);
    return std::erf(u) - (1.0 - std::exp(-u * u)) / (u * kSqrtPi);
}

}  // namespace

void ElectrolyteParams::validate() const {
    if (!(c_b > 0.0)) throw InvalidParams("electrolyte: c_b must be > 0");
    if (z_s < 1) throw InvalidParams("electrolyte: z_s must be >= 1");
    if (!(D_plus > 0.0) || !(D_minus > 0.0)) throw InvalidParams("electrolyte: diffusivities must be > 0");
    if (!(eps_e > 0.0)) throw InvalidParams("electrolyte: eps_e must be > 0");
    if (!(T > 0.0)) throw InvalidParams("electrolyte: T must be > 0");
    if (!(Delta > 0.0)) throw InvalidParams("electrolyte: Delta must be > 0");
    if (!(A > 0.0)) throw InvalidParams("electrolyte: A must be > 0");
}

double debye_kappa(const ElectrolyteParams& p) {
    p.validate();
    const double zF = p.z_s * constants.F;
    return std::sqrt(2.0 * zF * zF * p.c_b / (constants.R * p.T * p.eps_e));
}

double gouy_chapman_potential(const ElectrolyteParams& p, double V0, double z) {
    require_screened(p);
    require_height(p, z);
    if (V0 == 0.0) return 0.0;
    if (z == 0.0) return V0;
    const double a = volt_scale(p);
    const double kappa = debye_kappa(p);
    const double sgn = V0 > 0.0 ? 1.0 : -1.0;
    const double u = a * std::abs(V0) / 4.0;
    const double q = std::exp(-kappa * z);
    // tanh(u) written out so the z -> 0 endpoint stays exact for large u:
    // ratio = (1+q + e^{-2u}(1-q)) / (1-q + e^{-2u}(1+q)).
    const double em = u > 360.0 ? 0.0 : std::exp(-2.0 * u);
    const double one_minus_q = -std::expm1(-kappa * z);
    const double num = (1.0 + q) + em * one_minus_q;
    const double den = one_minus_q + em * (1.0 + q);
    return sgn * (2.0 / a) * std::log(num / den);
}

double linearized_potential(const ElectrolyteParams& p, double V0, double z) {
    p.validate();
    require_height(p, z);
    const double kappa = debye_kappa(p);
    // sinh(kappa(Delta-z))/sinh(kappa Delta) in overflow-safe form.
    const double num = -std::expm1(-2.0 * kappa * (p.Delta - z));
    const double den = -std::expm1(-2.0 * kappa * p.Delta);
    return V0 * std::exp(-kappa * z) * num / den;
}

double linearized_field(const ElectrolyteParams& p, double V0, double z) {
    p.validate();
    require_height(p, z);
    const double kappa = debye_kappa(p);
    const double num = 1.0 + std::exp(-2.0 * kappa * (p.Delta - z));
    const double den = -std::expm1(-2.0 * kappa * p.Delta);
    return kappa * V0 * std::exp(-kappa * z) * num / den;
}

double concentration_profile(const ElectrolyteParams& p, double V0, double z, Species s) {
    const double phi = gouy_chapman_potential(p, V0, z);
    const double sign = s == Species::cation ? 1.0 : -1.0;
    return p.c_b * checked_exp(-sign * volt_scale(p) * phi, "concentration_profile");
}

double field_profile(const ElectrolyteParams& p, double V0, double z) {
    const double a = volt_scale(p);
    const double kappa = debye_kappa(p);
    const double half_Phi = 0.5 * a * gouy_chapman_potential(p, V0, z);
    return (2.0 * kappa / a) * std::sinh(half_Phi);
}

double interface_field(const ElectrolyteParams& p, double V0) {
    require_screened(p);
    const double a = volt_scale(p);
    const double kappa = debye_kappa(p);
    return (2.0 * kappa / a) * std::sinh(0.5 * a * V0);
}

double invert_interface_field(const ElectrolyteParams& p, double E) {
    p.validate();
    if (!std::isfinite(E)) throw InvalidParams("invert_interface_field: E must be finite");
    const double a = volt_scale(p);
    const double kappa = debye_kappa(p);
    return (2.0 / a) * std::asinh(a * E / (2.0 * kappa));
}

double field_correlator_simplified(const ElectrolyteParams& p, double t) {
    p.validate();
    if (!(t >= 0.0)) throw InvalidParams("field_correlator_simplified: t must be >= 0");
    const double pref = plateau_per_species(p);
    return pref * (decay_factor(p.Delta, p.D_plus, t) + decay_factor(p.Delta, p.D_minus, t));
}

double field_correlator_full(const ElectrolyteParams& p, double V0, double t) {
    require_screened(p);
    if (!(t > 0.0)) throw InvalidParams("field_correlator_full: t must be > 0");
    const double zF = p.z_s * constants.F;
    const double pref = zF * zF / (constants.N_A * p.A * p.eps_e * p.eps_e);
    double total = 0.0;
    for (Species s : {Species::cation, Species::anion}) {
        const double D = s == Species::cation ? p.D_plus : p.D_minus;
        const double len = std::sqrt(4.0 * D * t);
        auto integrand = [&](double v) {
            const double kernel = 0.5 * (std::erf((p.Delta - v) / len) + std::erf(v / len));
            return concentration_profile(p, V0, v, s) * kernel;
        };
        numerics::QuadratureOptions opts;
        opts.rel_tol = 1e-9;
        opts.abs_tol = 1e-30;
        // Split at the diffusion boundary layers and the screening layer so
        // the panels cannot step over features much thinner than Delta.
        const double kappa = debye_kappa(p);
        std::vector<double> edges{3.0 / kappa, 30.0 / kappa, 20.0 * len, p.Delta - 20.0 * len};
        std::sort(edges.begin(), edges.end());
        std::vector<double> cuts{0.0};
        for (double edge : edges) {
            if (edge > cuts.back() && edge < p.Delta) cuts.push_back(edge);
        }
        cuts.push_back(p.Delta);
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            total += numerics::integrate(integrand, cuts[i], cuts[i + 1], opts);
        }
    }
    return pref * total;
}

double white_noise_variance(const ElectrolyteParams& p, SpeciesSum convention) {
    p.validate();
    return static_cast<double>(convention) * plateau_per_species(p);
}

}  // namespace nvsense::electrolyte
