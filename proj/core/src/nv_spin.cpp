#include "nvsense/nv_spin.hpp"

#include <cmath>
#include <limits>

#include "nvsense/numerics.hpp"

namespace nvsense::nv_spin {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPiSq = 2.0 * kPi * kPi;
}  // namespace

void NVParams::validate() const {
    if (!(D_zfs > 0.0)) throw InvalidParams("nv: D_zfs must be > 0");
    if (!(d_perp > 0.0)) throw InvalidParams("nv: d_perp must be > 0");
    if (!(gamma_e > 0.0)) throw InvalidParams("nv: gamma_e must be > 0");
}

void ReadoutParams::validate() const {
    if (!(alpha > beta_counts && beta_counts > 0.0)) {
        throw InvalidParams("readout: need alpha > beta_counts > 0");
    }
}

LabFieldInNVFrame lab_to_nv_field(double E_z_lab, double axis_polar_angle) {
    LabFieldInNVFrame f;
    f.Ex = std::sin(axis_polar_angle) * E_z_lab;
    f.Ey = 0.0;
    f.Ez = std::cos(axis_polar_angle) * E_z_lab;
    return f;
}

SpinLevels spin_levels(const NVParams& nv, double E_z_lab, double B_z) {
    nv.validate();
    SpinLevels lv;
    const auto f = lab_to_nv_field(E_z_lab, nv.axis_polar_angle);
    lv.xi_perp = nv.d_perp * f.Ex;
    lv.beta_z = nv.gamma_e * B_z;
    lv.phi_E = std::atan2(f.Ey, f.Ex);
    lv.theta = std::atan2(lv.xi_perp, lv.beta_z);
    const double split = std::hypot(lv.xi_perp, lv.beta_z);
    lv.nu_plus = nv.D_zfs + split;
    lv.nu_minus = nv.D_zfs - split;
    lv.zeeman_dominated_ok = std::abs(lv.beta_z) < 0.1 * nv.D_zfs;
    return lv;
}

double stark_shift(const NVParams& nv, double E_z_lab, double phi_B) {
    nv.validate();
    const auto f = lab_to_nv_field(E_z_lab, nv.axis_polar_angle);
    return nv.d_perp * f.Ex * std::cos(2.0 * phi_B);
}

double nu_fluctuation_correlator(const NVParams& nv, double transfer,
                                 double electrolyte_corr_at_t, double magnetic_term) {
    nv.validate();
    const double s = std::sin(nv.axis_polar_angle);
    return nv.d_perp * nv.d_perp * s * s * transfer * transfer * electrolyte_corr_at_t +
           magnetic_term;
}

double phase_variance(const std::function<double(double)>& nu_corr, double tau) {
    if (!(tau >= 0.0)) throw InvalidParams("phase_variance: tau must be >= 0");
    if (tau == 0.0) return 0.0;
    numerics::QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    opts.abs_tol = 0.0;
    const double inner =
        numerics::integrate([&](double s) { return (tau - s) * nu_corr(s); }, 0.0, tau, opts);
    return 8.0 * kPi * kPi * inner;
}

double t2_star_from_plateau(double corr0, T2StarConvention convention) {
    if (corr0 < 0.0) throw InvalidParams("t2_star: correlator plateau must be >= 0");
    if (corr0 == 0.0) return std::numeric_limits<double>::infinity();
    switch (convention) {
        case T2StarConvention::eq26:
            return 1.0 / (2.0 * kPi * std::sqrt(corr0));
        case T2StarConvention::half:
            return 1.0 / std::sqrt(kTwoPiSq * corr0);
    }
    throw InvalidParams("t2_star: unknown convention");
}

double t2_star(const std::function<double(double)>& nu_corr, T2StarConvention convention) {
    return t2_star_from_plateau(nu_corr(0.0), convention);
}

double ramsey_signal(double tau, double T2_star, double psi) {
    if (!(tau >= 0.0)) throw InvalidParams("ramsey_signal: tau must be >= 0");
    if (!(T2_star > 0.0)) throw InvalidParams("ramsey_signal: T2* must be > 0");
    const double x = tau / T2_star;
    return 0.5 * (1.0 - std::exp(-x * x) * std::cos(psi));
}

double sensitivity(const PowerLawFitConstants& fit, double c_b, double tau,
                   const ReadoutParams& readout) {
    readout.validate();
    if (!(fit.A > 0.0)) throw InvalidParams("sensitivity: fit constant A must be > 0");
    if (fit.B == 0.0) throw DivisionByZeroError("sensitivity: exponent B must be nonzero");
    if (!(c_b > 0.0) || !(tau > 0.0)) {
        throw InvalidParams("sensitivity: c_b and tau must be > 0");
    }
    const double T2 = 1.0 / (fit.A * std::pow(c_b, fit.B));
    const double x = tau / T2;
    return std::sqrt(15.0 * tau / (2.0 * readout.alpha)) * (fit.A / fit.B) *
           std::pow(c_b, fit.B + 1.0) * (T2 * T2 * T2) / (tau * tau) * std::exp(x * x);
}

T2EstimateStats variance_of_T2_estimate(double T2_star, double tau, double psi,
                                        const ReadoutParams& readout) {
    readout.validate();
    if (!(T2_star > 0.0) || !(tau > 0.0)) {
        throw InvalidParams("variance_of_T2_estimate: T2* and tau must be > 0");
    }
    const double c = std::cos(psi);
    if (c == 0.0) throw DivisionByZeroError("variance_of_T2_estimate: cos(psi) = 0");
    const double a = readout.alpha;
    const double b = readout.beta_counts;
    const double x = tau / T2_star;
    const double env = std::exp(-x * x);
    T2EstimateStats st;
    st.mean_M = 0.5 * (a + b) + 0.5 * (a - b) * env * c;
    st.var_M = st.mean_M + 0.25 * (a - b) * (a - b) * (1.0 - c * c * env * env);
    const double t2_6 = std::pow(T2_star, 6);
    st.var_T2 = 15.0 * t2_6 * std::exp(2.0 * x * x) / (2.0 * a * std::pow(tau, 4) * c * c);
    return st;
}

}  // namespace nvsense::nv_spin
