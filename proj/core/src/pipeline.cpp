#include "nvsense/pipeline.hpp"

#include <cmath>
#include <future>

namespace nvsense::pipeline {

SweepPoint sweep_point(const electrolyte::ElectrolyteParams& ep_template,
                       const diamond::DiamondParams& dp, const diamond::BandModel& band,
                       const nv_spin::NVParams& nv, double depth, double c_b,
                       const NoiseModel& noise) {
    SweepPoint pt;
    pt.c_b = c_b;
    try {
        electrolyte::ElectrolyteParams ep = ep_template;
        ep.c_b = c_b;
        const auto sol = diamond::solve_interface(ep, dp, band);
        pt.phi0 = sol.phi0;
        pt.E_e0 = sol.E_e0;
        pt.E_nv = diamond::field_at_nv(sol, dp, band, depth);
        pt.transfer = diamond::transfer_derivative(ep, dp, band, depth, &sol);
        pt.plateau = electrolyte::white_noise_variance(ep, noise.species_sum);
        const double corr0 = nv_spin::nu_fluctuation_correlator(nv, pt.transfer, pt.plateau);
        pt.inv_T2_star = 1.0 / nv_spin::t2_star_from_plateau(corr0, noise.t2_convention);
    } catch (const Error& e) {
        pt.error = e.what();
    }
    return pt;
}

std::vector<SweepPoint> run_sweep(const electrolyte::ElectrolyteParams& ep_template,
                                  const diamond::DiamondParams& dp,
                                  const diamond::BandModel& band, const nv_spin::NVParams& nv,
                                  double depth, const std::vector<double>& cb_grid,
                                  const NoiseModel& noise, bool parallel) {
    for (double c : cb_grid) {
        if (!(c > 0.0)) throw InvalidParams("run_sweep: cb_grid entries must be > 0");
    }
    std::vector<SweepPoint> out(cb_grid.size());
    if (!parallel) {
        for (size_t i = 0; i < cb_grid.size(); ++i) {
            out[i] = sweep_point(ep_template, dp, band, nv, depth, cb_grid[i], noise);
        }
        return out;
    }
    std::vector<std::future<SweepPoint>> futs;
    futs.reserve(cb_grid.size());
    for (double c : cb_grid) {
        futs.push_back(std::async(std::launch::async, [&, c] {
            return sweep_point(ep_template, dp, band, nv, depth, c, noise);
        }));
    }
    for (size_t i = 0; i < futs.size(); ++i) out[i] = futs[i].get();
    return out;
}

std::vector<double> default_cb_grid(double cb_min, double cb_max, int n) {
    if (!(cb_min > 0.0) || !(cb_max > cb_min) || n < 2) {
        throw InvalidParams("default_cb_grid: need 0 < cb_min < cb_max and n >= 2");
    }
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) {
        grid[i] = cb_min * std::pow(cb_max / cb_min, double(i) / (n - 1));
    }
    return grid;
}

PowerLawFit fit_power_law(const std::vector<SweepPoint>& points) {
    std::vector<double> lx, ly;
    for (const auto& pt : points) {
        if (!pt.ok()) continue;
        if (!(pt.inv_T2_star > 0.0) || !std::isfinite(pt.inv_T2_star)) continue;
        lx.push_back(std::log(pt.c_b));
        ly.push_back(std::log(pt.inv_T2_star));
    }
    const size_t n = lx.size();
    if (n < 5) {
        throw InsufficientPointsError("fit_power_law: need at least 5 usable points, have " +
                                      std::to_string(n));
    }
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    PowerLawFit fit;
    fit.B = sxy / sxx;
    fit.A = std::exp(my - fit.B * mx);
    double ss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (my + fit.B * (lx[i] - mx));
        ss += r * r;
    }
    fit.rms_log_residual = std::sqrt(ss / n);
    return fit;
}

std::vector<StarkRow> stark_sensing_table(const electrolyte::ElectrolyteParams& ep_template,
                                          const diamond::DiamondParams& dp,
                                          const diamond::BandModel& band,
                                          const nv_spin::NVParams& nv, double depth,
                                          const std::vector<std::pair<double, double>>& cb_pairs) {
    auto field_at = [&](double c_b) {
        electrolyte::ElectrolyteParams ep = ep_template;
        ep.c_b = c_b;
        const auto sol = diamond::solve_interface(ep, dp, band);
        return diamond::field_at_nv(sol, dp, band, depth);
    };
    std::vector<StarkRow> rows;
    rows.reserve(cb_pairs.size());
    for (const auto& [lo, hi] : cb_pairs) {
        if (!(lo > 0.0) || !(hi > 0.0)) {
            throw InvalidParams("stark_sensing_table: concentrations must be > 0");
        }
        StarkRow row;
        row.c_b_lo = lo;
        row.c_b_hi = hi;
        if (lo == hi) {
            rows.push_back(row);
            continue;
        }
        const double e_lo = field_at(lo);
        const double e_hi = field_at(hi);
        row.delta_E = e_hi - e_lo;
        row.delta_shift = nv_spin::stark_shift(nv, e_hi, nv.phi_B) -
                          nv_spin::stark_shift(nv, e_lo, nv.phi_B);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace nvsense::pipeline
