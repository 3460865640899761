#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "nvsense/constants.hpp"
#include "nvsense/electrolyte.hpp"
#include "oracles.hpp"

using namespace nvsense;
using namespace nvsense::electrolyte;
using oracles::rel_diff;

namespace {

ElectrolyteParams defaults() { return ElectrolyteParams{}; }

double volt_scale(const ElectrolyteParams& p) { return p.z_s * constants.F / (constants.R * p.T); }

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return g;
}

}  // namespace

TEST_CASE("screening length") {
    const auto p = defaults();
    // High-precision scalar evaluation as the reference route.
    const long double zF = (long double)p.z_s * 96485.3365L;
    const long double k2 =
        2.0L * zF * zF * (long double)p.c_b / (8.314L * 298.0L * (long double)p.eps_e);
    const double kappa_ref = (double)sqrtl(k2);
    const double kappa = debye_kappa(p);
    CHECK(rel_diff(kappa, kappa_ref) < 1e-12);
    CHECK(kappa == doctest::Approx(2.06e8).epsilon(3e-3));
    CHECK(1.0 / kappa == doctest::Approx(4.9e-9).epsilon(0.02));

    SUBCASE("sqrt scaling in concentration") {
        auto p4 = p;
        p4.c_b = 4.0 * p.c_b;
        CHECK(debye_kappa(p4) == 2.0 * kappa);
    }
    SUBCASE("vanishes with dilution") {
        auto p0 = p;
        p0.c_b = 1e-30;
        CHECK(rel_diff(debye_kappa(p0), kappa * 1e-15) < 1e-12);
    }
    SUBCASE("invariants enforced") {
        auto bad = p;
        bad.c_b = 0.0;
        CHECK_THROWS_AS(debye_kappa(bad), InvalidParams);
        bad = p;
        bad.z_s = 0;
        CHECK_THROWS_AS(debye_kappa(bad), InvalidParams);
    }
}

TEST_CASE("double-layer potential") {
    const auto p = defaults();
    const double kappa = debye_kappa(p);

    SUBCASE("zero bias is flat") {
        for (double z : log_grid(1e-12, p.Delta, 20)) {
            CHECK(gouy_chapman_potential(p, 0.0, z) == 0.0);
        }
    }
    SUBCASE("surface value equals the bias") {
        for (double V0 : {0.01, 0.05, 0.3, -0.7, 1.2}) {
            CHECK(gouy_chapman_potential(p, V0, 0.0) == V0);
            // One percent into the inner layer the drop is proportional to
            // the surface field, however steep the crowding makes it.
            const double z1 = 0.01 * std::abs(V0 / interface_field(p, V0));
            CHECK(rel_diff(gouy_chapman_potential(p, V0, z1), V0) < 0.02);
        }
    }
    SUBCASE("decays far from the interface") {
        CHECK(gouy_chapman_potential(p, 0.3, p.Delta) == 0.0);
        CHECK(std::abs(gouy_chapman_potential(p, 0.3, 40.0 / kappa)) < 1e-16);
    }
    SUBCASE("matches direct integration of the screening ODE") {
        // dPhi/dxi = -2 sinh(Phi/2), xi = kappa z, Phi = a phi.
        const double a = volt_scale(p);
        const double V0 = 0.05;
        auto rhs = [](double, double y) { return -2.0 * std::sinh(0.5 * y); };
        const double Phi1 = oracles::rk4(rhs, 0.0, a * V0, 1.0, 200000);
        CHECK(rel_diff(gouy_chapman_potential(p, V0, 1.0 / kappa), Phi1 / a) < 1e-8);
    }
    SUBCASE("is a pointwise solution of the screening ODE") {
        const double a = volt_scale(p);
        const double V0 = 0.11;
        const double dxi = 1e-5;
        for (double z : log_grid(0.01 / kappa, 12.0 / kappa, 100)) {
            const double Phi_p = a * gouy_chapman_potential(p, V0, z + dxi / kappa);
            const double Phi_m = a * gouy_chapman_potential(p, V0, z - dxi / kappa);
            const double Phi = a * gouy_chapman_potential(p, V0, z);
            const double lhs = (Phi_p - Phi_m) / (2.0 * dxi);
            CHECK(rel_diff(lhs, -2.0 * std::sinh(0.5 * Phi)) < 1e-6);
        }
    }
    SUBCASE("screening-regime guard") {
        auto weak = p;
        weak.Delta = 1e-9;  // kappa*Delta ~ 0.2
        CHECK_THROWS_AS(gouy_chapman_potential(weak, 0.1, 1e-10), ScreeningRegimeError);
    }
}

TEST_CASE("linearized potential and field") {
    const auto p = defaults();
    const double kappa = debye_kappa(p);

    SUBCASE("zero bias is flat") {
        CHECK(linearized_potential(p, 0.0, 1e-9) == 0.0);
        CHECK(linearized_field(p, 0.0, 1e-9) == 0.0);
    }
    SUBCASE("parallel-plate limit") {
        auto dilute = p;
        dilute.c_b = 1e-22;  // kappa*Delta ~ 3e-6
        const double V0 = 0.25;
        CHECK(rel_diff(linearized_field(dilute, V0, 0.0), V0 / p.Delta) < 1e-10);
        CHECK(rel_diff(linearized_field(dilute, V0, 0.5 * p.Delta), V0 / p.Delta) < 1e-10);
    }
    SUBCASE("agrees with the exact profile at small bias") {
        // |z_s F V0 / (R T)| < 0.05 keeps the two closed forms within 0.5%.
        const double V0 = 0.049 / volt_scale(p);
        for (double z : log_grid(1e-3 / kappa, 15.0 / kappa, 50)) {
            CHECK(rel_diff(linearized_potential(p, V0, z), gouy_chapman_potential(p, V0, z)) <
                  5e-3);
        }
    }
}

TEST_CASE("equilibrium concentrations") {
    const auto p = defaults();
    const double kappa = debye_kappa(p);

    SUBCASE("flat at zero bias and at the bulk plane") {
        CHECK(concentration_profile(p, 0.0, 1e-9, Species::cation) == p.c_b);
        CHECK(concentration_profile(p, 0.4, p.Delta, Species::cation) == p.c_b);
        CHECK(concentration_profile(p, 0.4, p.Delta, Species::anion) == p.c_b);
    }
    SUBCASE("mass-action product and bulk electroneutrality") {
        for (double z : log_grid(1e-11, p.Delta, 25)) {
            const double cp = concentration_profile(p, 0.12, z, Species::cation);
            const double cm = concentration_profile(p, 0.12, z, Species::anion);
            CHECK(rel_diff(cp * cm, p.c_b * p.c_b) < 1e-12);
        }
        const double cp = concentration_profile(p, 0.12, p.Delta, Species::cation);
        const double cm = concentration_profile(p, 0.12, p.Delta, Species::anion);
        CHECK(p.z_s * cp - p.z_s * cm == 0.0);
    }
    SUBCASE("counterions accumulate at a negative surface") {
        const double c_plus = concentration_profile(p, -0.1, 0.1 / kappa, Species::cation);
        const double c_minus = concentration_profile(p, -0.1, 0.1 / kappa, Species::anion);
        CHECK(c_plus > p.c_b);
        CHECK(c_minus < p.c_b);
    }
}

TEST_CASE("equilibrium interface field") {
    const auto p = defaults();
    const double kappa = debye_kappa(p);

    CHECK(interface_field(p, 0.0) == 0.0);
    SUBCASE("odd in the bias") {
        for (double V0 : {0.02, 0.3, 1.1}) {
            CHECK(interface_field(p, -V0) == -interface_field(p, V0));
        }
    }
    SUBCASE("linear response at small bias") {
        const double V0 = 0.1 * 2.0 / volt_scale(p);
        CHECK(rel_diff(interface_field(p, V0), kappa * V0) < 1e-2);
    }
    SUBCASE("equals the slope of the potential profile") {
        // Richardson-extrapolated one-sided derivative at the surface; the
        // step follows the inner-layer thickness |V0|/E(0).
        for (double V0 : {0.05, 0.4, -0.3}) {
            const double E = interface_field(p, V0);
            const double h = 1e-5 * std::abs(V0 / E);
            const double f0 = gouy_chapman_potential(p, V0, 0.0);
            const double d1 = (gouy_chapman_potential(p, V0, h) - f0) / h;
            const double d2 = (gouy_chapman_potential(p, V0, 0.5 * h) - f0) / (0.5 * h);
            const double dphi = 2.0 * d2 - d1;
            CHECK(rel_diff(E, -dphi) < 1e-6);
        }
    }
    SUBCASE("matches the dedicated profile-field evaluator") {
        CHECK(rel_diff(interface_field(p, 0.23), field_profile(p, 0.23, 0.0)) < 1e-12);
    }
}

TEST_CASE("interface field inversion") {
    const auto p = defaults();
    CHECK(invert_interface_field(p, 0.0) == 0.0);
    CHECK(rel_diff(invert_interface_field(p, interface_field(p, 0.3)), 0.3) < 1e-12);
    SUBCASE("round trip over a bias grid") {
        for (int i = 0; i <= 100; ++i) {
            const double V0 = -1.0 + 0.02 * i;
            const double back = invert_interface_field(p, interface_field(p, V0));
            CHECK(std::abs(back - V0) < 1e-12 * std::max(1.0, std::abs(V0)));
        }
    }
}

TEST_CASE("field-fluctuation correlator, closed form") {
    const auto p = defaults();

    SUBCASE("plateau value") {
        // Scalar reference evaluation in extended precision.
        const long double F = 96485.3365L;
        const long double pref = F * F * (long double)(p.z_s * p.z_s) * (long double)p.Delta *
                                 (long double)p.c_b /
                                 (6.02e23L * (long double)p.A * (long double)p.eps_e *
                                  (long double)p.eps_e);
        const double plateau_ref = (double)(2.0L * pref);
        CHECK(rel_diff(field_correlator_simplified(p, 0.0), plateau_ref) < 1e-12);
        CHECK(field_correlator_simplified(p, 0.0) == doctest::Approx(6.2e7).epsilon(0.02));
        CHECK(field_correlator_simplified(p, 0.0) == white_noise_variance(p, SpeciesSum::both));
    }
    SUBCASE("linear in concentration") {
        auto p2 = p;
        p2.c_b = 2.0 * p.c_b;
        for (double t : {0.0, 1e-4, 1e-1}) {
            CHECK(rel_diff(field_correlator_simplified(p2, t),
                           2.0 * field_correlator_simplified(p, t)) < 1e-14);
        }
    }
    SUBCASE("diffusion-time decay factor") {
        // At 4 D t = Delta^2 the per-species braces equal
        // erf(1) - (1 - 1/e)/sqrt(pi) = 0.486058...
        const double t_star = p.Delta * p.Delta / (4.0 * p.D_plus);
        const double ratio =
            field_correlator_simplified(p, t_star) / field_correlator_simplified(p, 0.0);
        const double braces = std::erf(1.0) - (1.0 - std::exp(-1.0)) / std::sqrt(M_PI);
        CHECK(rel_diff(ratio, braces) < 1e-12);
        CHECK(ratio == doctest::Approx(0.486058).epsilon(1e-4));
    }
    SUBCASE("monotone decay to zero") {
        double prev = field_correlator_simplified(p, 0.0);
        for (double t : log_grid(1e-8, 1e3, 40)) {
            const double cur = field_correlator_simplified(p, t);
            CHECK(cur <= prev * (1.0 + 1e-12));
            prev = cur;
        }
        CHECK(field_correlator_simplified(p, 1e8) < 1e-3 * field_correlator_simplified(p, 0.0));
    }
    SUBCASE("species asymmetry uses both diffusivities") {
        auto pa = p;
        pa.D_minus = 4.0 * pa.D_plus;
        const double t = p.Delta * p.Delta / (4.0 * p.D_plus);
        CHECK(field_correlator_simplified(pa, t) < field_correlator_simplified(p, t));
    }
}

TEST_CASE("field-fluctuation correlator, quadrature route") {
    const auto p = defaults();

    SUBCASE("reduces to the closed form at zero bias") {
        for (double t : log_grid(1e-6, 1.0, 20)) {
            CHECK(rel_diff(field_correlator_full(p, 0.0, t),
                           field_correlator_simplified(p, t)) < 1e-6);
        }
    }
    SUBCASE("monotone non-increasing in lag at finite bias") {
        double prev = std::numeric_limits<double>::infinity();
        for (double t : log_grid(1e-6, 1.0, 12)) {
            const double cur = field_correlator_full(p, 0.2, t);
            CHECK(cur <= prev * (1.0 + 1e-9));
            prev = cur;
        }
    }
    SUBCASE("vanishes at long lag") {
        CHECK(field_correlator_full(p, 0.0, 1e8) <
              1e-3 * field_correlator_simplified(p, 0.0));
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(field_correlator_full(p, 0.0, 0.0), InvalidParams);
        auto weak = p;
        weak.Delta = 1e-9;
        CHECK_THROWS_AS(field_correlator_full(weak, 0.0, 1e-3), ScreeningRegimeError);
    }
}

TEST_CASE("white-noise plateau conventions and scalings") {
    const auto p = defaults();
    const double both = white_noise_variance(p, SpeciesSum::both);
    const double single = white_noise_variance(p, SpeciesSum::single);
    CHECK(both == 2.0 * single);
    CHECK(white_noise_variance(p) == both);  // default convention
    CHECK(single == doctest::Approx(3.1e7).epsilon(0.02));

    SUBCASE("linear in c_b and Delta, inverse in A") {
        auto q = p;
        q.c_b *= 2.0;
        CHECK(white_noise_variance(q) == 2.0 * both);
        q = p;
        q.Delta *= 2.0;
        CHECK(white_noise_variance(q) == 2.0 * both);
        q = p;
        q.A *= 2.0;
        CHECK(white_noise_variance(q) == 0.5 * both);
    }
}
