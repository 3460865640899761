#include "nvsense/diamond.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "nvsense/numerics.hpp"

namespace nvsense::diamond {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kUnreachable = 1e9;  // sentinel shot length [m]

double thermal_volts(const DiamondParams& dp) { return constants.k * dp.T / constants.e; }

double checked_exp(double x, const char* what) {
    if (std::abs(x) > 700.0) {
        throw OverflowError(std::string(what) + ": exponent magnitude exceeds 700");
    }
    return std::exp(x);
}

// 1 / (1 + e^x), stable for any x.
double fermi(double x) {
    if (x > 0.0) {
        const double t = std::exp(-x);
        return t / (1.0 + t);
    }
    return 1.0 / (1.0 + std::exp(x));
}

struct Levels {
    double E_d;   // donor level [eV]
    double E_d2;  // optional second donor level [eV]
    double E_a;   // acceptor level [eV]
};

Levels level_positions(const DiamondParams& dp, const BandModel& band) {
    return {band.E_c - dp.E_d_below_Ec, band.E_c - dp.E_d2_below_Ec, band.E_v + dp.E_a_above_Ev};
}

// Antiderivative of rho_d/e with respect to phi [V/m^3]. Carrier exponentials
// integrate to themselves; Fermi factors integrate to softplus logs.
double charge_antiderivative(const DiamondParams& dp, const BandModel& band, double phi) {
    const double Vt = thermal_volts(dp);
    const double u = phi - dp.phi_bd;
    const auto [n, p] = carrier_densities(dp, band, phi);
    const Levels lv = level_positions(dp, band);
    const double x_d = (band.mu0 + u - lv.E_d) / Vt;
    const double y_a = (lv.E_a - band.mu0 - u) / Vt;
    double acc = p + n + dp.donor_density() * numerics::softplus_neg(x_d) +
                 dp.acceptor_density() * numerics::softplus_neg(y_a);
    if (dp.N_d2 > 0.0) {
        const double x_d2 = (band.mu0 + u - lv.E_d2) / Vt;
        acc += dp.N_d2 * numerics::softplus_neg(x_d2);
    }
    return -Vt * acc;
}

// First-integral radicand E^2(phi) = E_d0^2 - (2/eps_d) * int rho_d dphi.
struct Radicand {
    const DiamondParams& dp;
    const BandModel& band;
    double E0sq;
    double F0;  // antiderivative at phi0, cached

    double operator()(double phi) const {
        const double ci = constants.e * (charge_antiderivative(dp, band, phi) - F0);
        return E0sq - (2.0 / dp.eps_d) * ci;
    }

    // The radicand is a difference of large terms; below this level its
    // values are rounding noise and must not be chased by the integrator.
    double noise_floor() const {
        const double f_scale = (2.0 / dp.eps_d) * constants.e * std::abs(F0);
        return 1024.0 * 2.2e-16 * (f_scale + E0sq + 1.0);
    }
};

Radicand make_radicand(const DiamondParams& dp, const BandModel& band, double phi0,
                       double E_d0) {
    return Radicand{dp, band, E_d0 * E_d0, charge_antiderivative(dp, band, phi0)};
}

// rho_d is monotone non-increasing in phi, so the radicand has at most one
// interior minimum, located at the charge-neutral potential. Knowing it makes
// turning-point detection exact: split marches there and the radicand is
// monotone on every segment.
std::optional<double> neutral_point(const DiamondParams& dp, const BandModel& band) {
    const double span = dp.E_gap;
    double lo = dp.phi_bd - span;
    double hi = dp.phi_bd + span;
    const double r_lo = charge_density(dp, band, lo);
    const double r_hi = charge_density(dp, band, hi);
    if (!(r_lo > 0.0 && r_hi < 0.0)) return std::nullopt;  // no crossing in range
    const auto root = numerics::find_root(
        [&](double phi) { return charge_density(dp, band, phi); }, lo, hi, r_lo, r_hi);
    return root.x;
}

// Depth accumulated between two potential values on one branch,
// dw = |dphi| / sqrt(R). `a_zero` / `b_zero` flag an endpoint where R
// vanishes (turning point); those ends are integrated with u = sqrt(|phi -
// phi_t|) so the integrand stays bounded.
double segment_depth(const Radicand& R, double pa, double pb, bool a_zero, bool b_zero,
                     double rel_tol) {
    if (pa == pb) return 0.0;
    numerics::QuadratureOptions opts;
    // Segments ending on a turning point cannot be certified below the
    // cancellation noise of the radicand; they are also a vanishing share of
    // any accumulated depth.
    opts.rel_tol = (a_zero || b_zero) ? std::max(rel_tol, 1e-5) : rel_tol;
    opts.abs_tol = 1e-22;
    opts.max_panels = 20000;
    const double dir = pb > pa ? 1.0 : -1.0;
    const double span = std::abs(pb - pa);
    // Noise floor: R is a difference of large terms, so clamp tiny values
    // that are pure cancellation residue near a located zero.
    const double floor_scale = std::max({std::abs(R(0.5 * (pa + pb))), R.E0sq, 1.0});
    const double r_floor = std::max(1e-13 * floor_scale, R.noise_floor());
    auto sqrt_clamped = [&](double r) { return std::sqrt(std::max(r, r_floor)); };
    if (a_zero && b_zero) {
        const double mid = 0.5 * (pa + pb);
        return segment_depth(R, pa, mid, true, false, rel_tol) +
               segment_depth(R, mid, pb, false, true, rel_tol);
    }
    if (b_zero) {
        auto f = [&](double u) { return 2.0 * u / sqrt_clamped(R(pb - dir * u * u)); };
        return numerics::integrate(f, 0.0, std::sqrt(span), opts);
    }
    if (a_zero) {
        auto f = [&](double u) { return 2.0 * u / sqrt_clamped(R(pa + dir * u * u)); };
        return numerics::integrate(f, 0.0, std::sqrt(span), opts);
    }
    auto f = [&](double phi) { return 1.0 / sqrt_clamped(R(phi)); };
    return std::abs(numerics::integrate(f, pa, pb, opts));
}

}  // namespace

struct MarchTable {
    struct Row {
        double phi;
        double w;
        double e;  // signed depth-convention field at this row
    };
    std::vector<Row> rows;
    double phi0 = 0.0;
    double E_d0 = 0.0;
    DiamondParams dp;
    BandModel band;
    bool reached_phi_stop = false;
    bool hit_w_stop = false;
    bool diverged = false;
    int reversals = 0;
    double W = 0.0;

    double phi_at(double w) const;
    double e_at(double w) const;
};

namespace {

struct MarchOptions {
    std::optional<double> phi_stop;
    double w_stop = std::numeric_limits<double>::infinity();
    int max_reversals = 2;
    double rel_tol = 1e-9;
    double excursion_limit = 12.0;  // [V]
    double base_step = 0.0;         // 0: derive from phi_stop span
};

std::shared_ptr<MarchTable> march_profile(const DiamondParams& dp, const BandModel& band,
                                          double phi0, double E_d0, const MarchOptions& mo) {
    auto table = std::make_shared<MarchTable>();
    table->phi0 = phi0;
    table->E_d0 = E_d0;
    table->dp = dp;
    table->band = band;
    table->rows.push_back({phi0, 0.0, E_d0});

    if (mo.phi_stop && *mo.phi_stop == phi0) {
        table->reached_phi_stop = true;
        return table;
    }

    const Radicand R = make_radicand(dp, band, phi0, E_d0);
    const double rho0 = charge_density(dp, band, phi0);

    // Direction of motion in phi: dphi/dw = -e; at zero field the curvature
    // -rho/eps decides.
    double m;
    double e_sign;
    bool start_singular = false;
    if (E_d0 != 0.0) {
        m = E_d0 > 0.0 ? -1.0 : 1.0;
        e_sign = E_d0 > 0.0 ? 1.0 : -1.0;
    } else if (std::abs(rho0) > 1e-30) {
        m = rho0 > 0.0 ? -1.0 : 1.0;
        e_sign = -m;
        start_singular = true;  // R(phi0) = 0, field builds up from zero
    } else {
        // Static: no field, no charge. The potential never moves.
        if (std::isfinite(mo.w_stop)) {
            table->rows.push_back({phi0, mo.w_stop, 0.0});
            table->W = mo.w_stop;
            table->hit_w_stop = true;
        }
        return table;
    }

    const double h0 = mo.base_step != 0.0
                          ? mo.base_step
                          : (mo.phi_stop ? std::max(std::abs(*mo.phi_stop - phi0) / 128.0, 1e-12)
                                         : 0.01);
    const double h_min = h0 * 1e-10;
    double h = h0;

    const std::optional<double> neutral = neutral_point(dp, band);

    double phi = phi0;
    double w = 0.0;
    bool next_singular = start_singular;
    const int kMaxRows = 100000;

    while (true) {
        if (static_cast<int>(table->rows.size()) > kMaxRows) {
            throw QuadratureError("interior profile march: row budget exhausted");
        }
        double phi_next = phi + m * h;
        bool clipped = false;
        if (mo.phi_stop) {
            const double target = *mo.phi_stop;
            if ((m > 0 && phi < target && phi_next >= target) ||
                (m < 0 && phi > target && phi_next <= target)) {
                phi_next = target;
                clipped = true;
            }
        }
        // Force a row boundary at the radicand minimum, so R is monotone on
        // every integrated segment and a zero cannot slip through.
        if (neutral && (phi - *neutral) * (phi_next - *neutral) < 0.0) {
            phi_next = *neutral;
            clipped = false;
        }

        // With R monotone on [phi, phi_next], a sign change shows at the end.
        bool has_zero = false;
        double zero_hi = 0.0;
        const double r_here = R(phi);
        for (double frac : {0.5, 1.0}) {
            const double pp = phi + (phi_next - phi) * frac;
            if (R(pp) <= 0.0) {
                zero_hi = pp;
                has_zero = true;
                break;
            }
        }

        if (has_zero) {
            // Locate R = 0 between phi (R > 0) and zero_hi (R <= 0).
            double lo = phi;
            double r_lo = r_here;
            if (r_lo <= 0.0) {
                lo = phi + m * h_min;
                r_lo = R(lo);
                if (r_lo <= 0.0) {
                    table->diverged = true;  // degenerate (non-simple) zero
                    break;
                }
            }
            const double r_hi = R(zero_hi);
            const auto root =
                numerics::find_root([&](double x) { return R(x); }, std::min(lo, zero_hi),
                                    std::max(lo, zero_hi), m > 0 ? r_lo : r_hi,
                                    m > 0 ? r_hi : r_lo);
            const double phi_t = root.x;
            const double dw = segment_depth(R, phi, phi_t, next_singular, true, mo.rel_tol);
            w += dw;
            table->rows.push_back({phi_t, w, 0.0});
            if (mo.phi_stop && phi_t == *mo.phi_stop) {
                table->reached_phi_stop = true;
                break;
            }
            table->reversals += 1;
            if (table->reversals > mo.max_reversals) break;
            if (w >= mo.w_stop) {
                table->hit_w_stop = true;
                break;
            }
            m = -m;
            e_sign = -e_sign;
            phi = phi_t;
            next_singular = true;
            continue;
        }

        const double dw = segment_depth(R, phi, phi_next, next_singular, false, mo.rel_tol);
        next_singular = false;
        w += dw;
        phi = phi_next;
        table->rows.push_back({phi, w, e_sign * std::sqrt(std::max(R(phi), 0.0))});
        if (clipped) {
            table->reached_phi_stop = true;
            break;
        }
        if (w >= mo.w_stop) {
            table->hit_w_stop = true;
            break;
        }
        if (std::abs(phi - phi0) > mo.excursion_limit) {
            table->diverged = true;
            break;
        }
        h = std::min(h * 1.5, h0);
    }
    table->W = w;
    return table;
}

}  // namespace

double MarchTable::phi_at(double w) const {
    if (rows.empty()) throw Error("profile query on empty march table");
    if (w <= 0.0) return rows.front().phi;
    if (w >= rows.back().w) return rows.back().phi;
    auto it = std::upper_bound(rows.begin(), rows.end(), w,
                               [](double v, const Row& r) { return v < r.w; });
    const Row& hi = *it;
    const Row& lo = *(it - 1);
    if (lo.phi == hi.phi) return lo.phi;
    const double dw = w - lo.w;
    const Radicand R = make_radicand(dp, band, phi0, E_d0);
    const bool a_zero = lo.e == 0.0 && lo.w > 0.0;
    const bool b_zero = hi.e == 0.0;
    auto partial = [&](double phi) {
        return segment_depth(R, lo.phi, phi, a_zero, b_zero && phi == hi.phi, 1e-11) - dw;
    };
    const auto root = numerics::find_root(partial, std::min(lo.phi, hi.phi),
                                          std::max(lo.phi, hi.phi),
                                          lo.phi < hi.phi ? -dw : (hi.w - lo.w) - dw,
                                          lo.phi < hi.phi ? (hi.w - lo.w) - dw : -dw);
    return root.x;
}

double MarchTable::e_at(double w) const {
    if (rows.empty()) throw Error("profile query on empty march table");
    if (w <= 0.0) return rows.front().e;
    const Row* seg_hi = &rows.back();
    const Row* seg_lo = rows.size() > 1 ? &rows[rows.size() - 2] : &rows.back();
    if (w < rows.back().w) {
        auto it = std::upper_bound(rows.begin(), rows.end(), w,
                                   [](double v, const Row& r) { return v < r.w; });
        seg_hi = &*it;
        seg_lo = &*(it - 1);
    }
    const double phi = phi_at(w);
    const Radicand R = make_radicand(dp, band, phi0, E_d0);
    double sign = seg_lo->e != 0.0 ? (seg_lo->e > 0.0 ? 1.0 : -1.0)
                                   : (seg_hi->e > 0.0 ? 1.0 : (seg_hi->e < 0.0 ? -1.0 : 0.0));
    return sign * std::sqrt(std::max(R(phi), 0.0));
}

void DiamondParams::validate() const {
    if (!(eps_d > 0.0)) throw InvalidParams("diamond: eps_d must be > 0");
    if (!(E_gap > 0.0)) throw InvalidParams("diamond: E_gap must be > 0");
    if (!(m_eff_n > 0.0) || !(m_eff_p > 0.0)) throw InvalidParams("diamond: effective masses must be > 0");
    if (!(D_areal >= 0.0)) throw InvalidParams("diamond: D_areal must be >= 0");
    if (!(d_max > 0.0)) throw InvalidParams("diamond: d_max must be > 0");
    if (D_areal > 0.0) {
        if (!(frac_Ns > 0.0 && frac_Ns < 1.0) || !(frac_NV > 0.0 && frac_NV < 1.0)) {
            throw InvalidParams("diamond: dopant fractions must lie in (0, 1)");
        }
        if (std::abs(frac_Ns + frac_NV - 1.0) > 1e-12) {
            throw InvalidParams("diamond: frac_Ns + frac_NV must equal 1");
        }
    }
    if (!(N_d2 >= 0.0)) throw InvalidParams("diamond: N_d2 must be >= 0");
    if (!(z_bulk > d_max)) throw InvalidParams("diamond: z_bulk must exceed d_max");
    if (!(T > 0.0)) throw InvalidParams("diamond: T must be > 0");
}

std::pair<double, double> effective_dos(const DiamondParams& dp) {
    if (!(dp.T > 0.0)) throw InvalidParams("effective_dos: T must be > 0");
    const double denom = 2.0 * kPi * constants.hbar * constants.hbar;
    auto dos = [&](double m_eff) {
        const double x = m_eff * constants.m0 * constants.k * dp.T / denom;
        return 2.0 * x * std::sqrt(x);
    };
    return {dos(dp.m_eff_n), dos(dp.m_eff_p)};
}

double intrinsic_mu(const DiamondParams& dp, const BandModel& band) {
    const double kT_eV = constants.k * dp.T / constants.e;
    return 0.5 * (band.E_v + band.E_c) + 0.75 * kT_eV * std::log(dp.m_eff_p / dp.m_eff_n);
}

BandModel make_band_model(const DiamondParams& dp) {
    dp.validate();
    BandModel band;
    band.E_v = 0.0;
    band.E_c = dp.E_gap;
    std::tie(band.N_c, band.N_v) = effective_dos(dp);
    band.mu0 = intrinsic_mu(dp, band);
    if (!(band.E_v < band.mu0 && band.mu0 < band.E_c)) {
        throw InvalidParams("band model: mu0 must lie inside the gap");
    }
    return band;
}

std::pair<double, double> carrier_densities(const DiamondParams& dp, const BandModel& band,
                                            double phi) {
    const double Vt = thermal_volts(dp);
    const double u = phi - dp.phi_bd;
    const double n = band.N_c * checked_exp((band.mu0 + u - band.E_c) / Vt, "carrier_densities(n)");
    const double p = band.N_v * checked_exp((band.E_v - band.mu0 - u) / Vt, "carrier_densities(p)");
    return {n, p};
}

std::pair<double, double> ionized_dopants(const DiamondParams& dp, const BandModel& band,
                                          double phi) {
    const double Vt = thermal_volts(dp);
    const double u = phi - dp.phi_bd;
    const Levels lv = level_positions(dp, band);
    const double nd = dp.donor_density() * fermi((band.mu0 + u - lv.E_d) / Vt);
    const double na = dp.acceptor_density() * fermi((lv.E_a - band.mu0 - u) / Vt);
    return {nd, na};
}

double charge_density(const DiamondParams& dp, const BandModel& band, double phi) {
    const auto [n, p] = carrier_densities(dp, band, phi);
    const auto [nd, na] = ionized_dopants(dp, band, phi);
    double rho = p - n + nd - na;
    if (dp.N_d2 > 0.0) {
        const double Vt = thermal_volts(dp);
        const Levels lv = level_positions(dp, band);
        rho += dp.N_d2 * fermi((band.mu0 + (phi - dp.phi_bd) - lv.E_d2) / Vt);
    }
    return constants.e * rho;
}

double charge_integral(const DiamondParams& dp, const BandModel& band, double phi_a,
                       double phi_b) {
    return constants.e *
           (charge_antiderivative(dp, band, phi_b) - charge_antiderivative(dp, band, phi_a));
}

double field_first_integral(const DiamondParams& dp, const BandModel& band, double phi0,
                            double E_d0, double phi) {
    const Radicand R = make_radicand(dp, band, phi0, E_d0);
    const double r = R(phi);
    if (r < 0.0) {
        throw RadicandNegativeError("field_first_integral: potential lies past a turning point");
    }
    const double sign = E_d0 < 0.0 ? -1.0 : 1.0;
    return sign * std::sqrt(r);
}

double depth_of_potential(const DiamondParams& dp, const BandModel& band, double phi0,
                          double E_d0, double phi_target) {
    if (phi_target == phi0) return 0.0;
    MarchOptions mo;
    mo.phi_stop = phi_target;
    mo.max_reversals = 0;
    auto table = march_profile(dp, band, phi0, E_d0, mo);
    if (!table->reached_phi_stop) {
        if (table->reversals > 0) {
            throw RadicandNegativeError(
                "depth_of_potential: turning point before the target potential");
        }
        throw InvalidParams("depth_of_potential: target not on the outgoing branch");
    }
    return table->W;
}

namespace {

double depth_field_from_electrolyte(const electrolyte::ElectrolyteParams& ep,
                                    const DiamondParams& dp, double phi0) {
    const double Ez = electrolyte::interface_field(ep, phi0 - ep.phi_be);
    return -(ep.eps_e / dp.eps_d) * Ez;
}

struct Shot {
    std::shared_ptr<MarchTable> table;
    double g = kUnreachable;  // depth-to-bulk-potential minus z_bulk [m]
    bool reached = false;
    double e_bd = 0.0;
};

Shot shoot_to_bulk(const electrolyte::ElectrolyteParams& ep, const DiamondParams& dp,
                   const BandModel& band, double phi0) {
    Shot s;
    MarchOptions mo;
    mo.phi_stop = dp.phi_bd;
    mo.w_stop = 10.0 * dp.z_bulk;
    mo.max_reversals = 2;
    mo.excursion_limit = std::abs(phi0 - dp.phi_bd) + 8.0;
    try {
        s.table = march_profile(dp, band, phi0, depth_field_from_electrolyte(ep, dp, phi0), mo);
    } catch (const QuadratureError&) {
        // Trial surface potentials grazing the separatrix make the passage
        // depth diverge; classify as "deeper than the bulk plane".
        s.g = kUnreachable;
        return s;
    }
    if (s.table->reached_phi_stop) {
        s.reached = true;
        s.g = s.table->W - dp.z_bulk;
        s.e_bd = std::abs(s.table->rows.back().e);
    } else {
        s.g = kUnreachable;
    }
    return s;
}

std::vector<ProfileSample> sample_profile(const MarchTable& table, double z_bulk) {
    std::vector<ProfileSample> out;
    const int n_log = 255;
    out.push_back({0.0, table.rows.front().phi, table.rows.front().e});
    const double w_lo = z_bulk * 1e-4;
    for (int i = 0; i < n_log; ++i) {
        const double w = w_lo * std::pow(z_bulk / w_lo, double(i) / (n_log - 1));
        out.push_back({w, table.phi_at(w), table.e_at(w)});
    }
    return out;
}

}  // namespace

InterfaceSolution solve_interface(const electrolyte::ElectrolyteParams& ep,
                                  const DiamondParams& dp, const BandModel& band) {
    ep.validate();
    dp.validate();
    (void)electrolyte::interface_field(ep, 0.0);  // kappa*Delta guard up front

    InterfaceSolution sol;

    // Flat null case: equal bulk potentials across a charge-free crystal.
    if (ep.phi_be == dp.phi_bd) {
        const double rho_tol = 2.0 * dp.eps_d * 1e-9 / (dp.z_bulk * dp.z_bulk);
        if (std::abs(charge_density(dp, band, dp.phi_bd)) < rho_tol) {
            sol.phi0 = dp.phi_bd;
            sol.V0 = 0.0;
            sol.E_e0 = 0.0;
            sol.E_d0 = 0.0;
            MarchOptions mo;
            mo.w_stop = dp.z_bulk * 1.000001;
            sol.march = march_profile(dp, band, sol.phi0, 0.0, mo);
            sol.profile = sample_profile(*sol.march, dp.z_bulk);
            sol.converged = true;
            sol.residual = 0.0;
            return sol;
        }
    }

    auto g_of = [&](double phi0) { return shoot_to_bulk(ep, dp, band, phi0); };

    // A shot started exactly at phi_bd reaches the bulk potential at zero
    // depth, so g(phi_bd) = -z_bulk < 0: one bracket end is always known.
    const double x_neg0 = dp.phi_bd;
    Shot s_neg = g_of(x_neg0);
    const double window_lo = std::min(dp.phi_bd, ep.phi_be) - 5.0;
    const double window_hi = std::max(dp.phi_bd, ep.phi_be) + 5.0;

    // Scan for a positive residual: the other bulk potential first, then the
    // seed interval interior, then outward to the window limits.
    std::vector<double> candidates;
    candidates.push_back(ep.phi_be);
    for (int i = 1; i < 8; ++i) {
        candidates.push_back(dp.phi_bd + (ep.phi_be - dp.phi_bd) * i / 8.0);
    }
    for (double x = 0.25; ; x += 0.25) {
        const double above = std::max(dp.phi_bd, ep.phi_be) + x;
        const double below = std::min(dp.phi_bd, ep.phi_be) - x;
        bool any = false;
        if (above <= window_hi) {
            candidates.push_back(above);
            any = true;
        }
        if (below >= window_lo) {
            candidates.push_back(below);
            any = true;
        }
        if (!any) break;
    }
    bool found = false;
    double x_pos = 0.0;
    Shot s_pos;
    for (double x : candidates) {
        if (x == x_neg0) continue;
        Shot sx = g_of(x);
        if (sx.g > 0.0) {
            x_pos = x;
            s_pos = std::move(sx);
            found = true;
            break;
        }
    }
    if (!found) {
        throw NoBracketError("solve_interface: no sign change of the shooting residual in [" +
                             std::to_string(window_lo) + ", " + std::to_string(window_hi) +
                             "] V");
    }

    // Safeguarded bisection/secant on the shooting residual.
    double a = std::min(x_neg0, x_pos);
    double b = std::max(x_neg0, x_pos);
    double ga = a == x_neg0 ? s_neg.g : s_pos.g;
    double gb = b == x_pos ? s_pos.g : s_neg.g;
    Shot best;
    double best_x = x_neg0;
    best.g = std::numeric_limits<double>::infinity();
    if (s_neg.reached) {
        best = s_neg;
        best_x = x_neg0;
    }
    const int max_iter = 200;
    int it = 0;
    for (; it < max_iter; ++it) {
        double x;
        const bool sentinel = std::abs(ga) >= kUnreachable || std::abs(gb) >= kUnreachable;
        if (!sentinel && gb != ga) {
            x = b - gb * (b - a) / (gb - ga);
            const double width = b - a;
            if (!(x > a + 0.01 * width && x < b - 0.01 * width)) x = 0.5 * (a + b);
        } else {
            x = 0.5 * (a + b);
        }
        if (x <= a || x >= b) break;  // bracket at floating-point resolution
        Shot sx = g_of(x);
        const bool better = sx.reached && (!best.reached || std::abs(sx.g) < std::abs(best.g));
        if (better) {
            best = sx;
            best_x = x;
        }
        if ((sx.g > 0) == (gb > 0)) {
            b = x;
            gb = sx.g;
        } else {
            a = x;
            ga = sx.g;
        }
        if (sx.reached && sx.e_bd * std::abs(sx.g) < 1e-8) break;  // residual ~ 0.01 uV
        if (b - a <= 4e-16 * std::max({1.0, std::abs(a), std::abs(b)})) break;
    }
    if (!best.reached) {
        throw NonConvergedError("solve_interface: shooting never reached the bulk potential");
    }
    if (it >= max_iter && best.e_bd * std::abs(best.g) > 1e-6) {
        throw NonConvergedError("solve_interface: 200 iterations without meeting tolerance");
    }

    sol.phi0 = best_x;
    sol.V0 = best_x - ep.phi_be;
    const double Ez = electrolyte::interface_field(ep, sol.V0);
    sol.E_e0 = -Ez;
    sol.E_d0 = (ep.eps_e / dp.eps_d) * sol.E_e0;

    MarchOptions mo;
    mo.w_stop = dp.z_bulk * 1.000001;
    mo.max_reversals = 4;
    sol.march = march_profile(dp, band, sol.phi0, sol.E_d0, mo);
    sol.profile = sample_profile(*sol.march, dp.z_bulk);
    sol.residual = std::abs(sol.march->phi_at(dp.z_bulk) - dp.phi_bd);
    sol.converged = sol.residual < 1e-6;
    return sol;
}

double potential_at_depth(const InterfaceSolution& sol, double depth) {
    if (!sol.march) throw Error("potential_at_depth: solution carries no profile");
    return sol.march->phi_at(depth);
}

double field_at_nv(const InterfaceSolution& sol, const DiamondParams& dp, const BandModel& band,
                   double depth) {
    if (!sol.march) throw Error("field_at_nv: solution carries no profile");
    if (!(depth > 0.0 && depth < dp.z_bulk)) {
        throw InvalidParams("field_at_nv: depth must lie in (0, z_bulk)");
    }
    if (!sol.converged) throw NonConvergedError("field_at_nv: interface solution not converged");
    (void)band;
    return sol.march->e_at(depth);
}

double transfer_derivative(const electrolyte::ElectrolyteParams& ep, const DiamondParams& dp,
                           const BandModel& band, double depth,
                           const InterfaceSolution* base) {
    InterfaceSolution local;
    if (!base) {
        local = solve_interface(ep, dp, band);
        base = &local;
    }
    if (!base->converged) {
        throw NonConvergedError("transfer_derivative: base solution not converged");
    }
    const double x0 = base->E_e0;  // depth-convention interface field

    auto field_at = [&](double x) {
        const double Ez = -x;
        const double V0 = electrolyte::invert_interface_field(ep, Ez);
        const double phi0 = ep.phi_be + V0;
        MarchOptions mo;
        mo.w_stop = depth * 1.000001;
        mo.max_reversals = 4;
        mo.base_step = std::max(std::abs(base->phi0 - dp.phi_bd), 0.1) / 128.0;
        auto table = march_profile(dp, band, phi0, (ep.eps_e / dp.eps_d) * x, mo);
        if (table->W < depth) {
            throw NonConvergedError("transfer_derivative: perturbed profile ended early");
        }
        return table->e_at(depth);
    };

    auto central = [&](double h) { return (field_at(x0 + h) - field_at(x0 - h)) / (2.0 * h); };

    double h = 1e-4 * std::max(std::abs(x0), 1.0);
    double best_disagree = std::numeric_limits<double>::infinity();
    double best_value = 0.0;
    for (int attempt = 0; attempt < 3; ++attempt) {
        const double d1 = central(h);
        const double d2 = central(0.5 * h);
        const double disagree = std::abs(d1 - d2) / std::max(std::abs(d2), 1e-300);
        const double extrapolated = (4.0 * d2 - d1) / 3.0;
        if (disagree < best_disagree) {
            best_disagree = disagree;
            best_value = extrapolated;
        }
        if (disagree <= 0.01) return extrapolated;
        h *= 0.25;
    }
    if (best_disagree > 0.05) {
        throw DerivativeUnstableError("transfer_derivative: step-halving check disagrees by " +
                                      std::to_string(best_disagree * 100.0) + "%");
    }
    return best_value;
}

}  // namespace nvsense::diamond
