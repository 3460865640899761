#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nvsense/brownian.hpp"
#include "oracles.hpp"

using namespace nvsense;
using namespace nvsense::brownian;
using oracles::rel_diff;

namespace {

// Small but statistically meaningful box for unit runs.
McConfig small_cfg() {
    McConfig cfg;
    cfg.n_particles = 2000;
    cfg.box_length = 1e-6;
    cfg.area = 1e-12;
    cfg.diffusion = 2.3e-9;
    cfg.dt = 3e-7;
    cfg.n_steps = 8000;
    cfg.n_bins = 8;
    cfg.seed = 4242;
    cfg.z_s = 2;
    cfg.window_fraction = 0.125;
    cfg.replicas = 8;
    return cfg;
}

bool within_3sigma(const CorrelatorPoint& pt, double ref) {
    return std::abs(pt.value - ref) <= 3.0 * pt.stderr_;
}

}  // namespace

TEST_CASE("configuration validation") {
    auto cfg = small_cfg();
    CHECK_NOTHROW(cfg.validate());

    SUBCASE("bins finer than three step lengths are rejected") {
        auto bad = cfg;
        bad.dt = 3e-6;  // step length ~ 1.2e-7 > w/3
        CHECK_THROWS_AS(bad.validate(), ResolutionError);
    }
    SUBCASE("step must resolve the box diffusion time") {
        auto bad = cfg;
        bad.dt = 1e-4;
        CHECK_THROWS_AS(bad.validate(), InvalidParams);
    }
    SUBCASE("window fraction bounded") {
        auto bad = cfg;
        bad.window_fraction = 1.5;
        CHECK_THROWS_AS(bad.validate(), InvalidParams);
    }
}

TEST_CASE("deterministic under a fixed seed") {
    auto cfg = small_cfg();
    cfg.n_steps = 2000;
    cfg.replicas = 3;
    const std::vector<double> lags{0.0, 10 * cfg.dt};
    const auto a = simulate_field_correlator(cfg, lags);
    const auto b = simulate_field_correlator(cfg, lags);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].value == b[i].value);
        CHECK(a[i].stderr_ == b[i].stderr_);
    }
    const auto c = simulate_density_correlator(cfg, lags, 3, 3);
    const auto d = simulate_density_correlator(cfg, lags, 3, 3);
    for (size_t i = 0; i < c.size(); ++i) CHECK(c[i].value == d[i].value);

    SUBCASE("different seeds decorrelate") {
        auto cfg2 = cfg;
        cfg2.seed = 999;
        const auto e = simulate_field_correlator(cfg2, lags);
        CHECK(e.front().value != a.front().value);
    }
}

TEST_CASE("equilibrium density is uniform and conserves walkers") {
    const auto cfg = small_cfg();
    const auto profile = simulate_density_profile(cfg);
    REQUIRE((int)profile.size() == cfg.n_bins);
    const double target = mean_density(cfg);
    double total = 0.0;
    for (const auto& bin : profile) {
        CHECK(within_3sigma(bin, target));
        total += bin.value * cfg.area * cfg.bin_width();
    }
    // Exact conservation: the binned counts always sum to n_particles.
    CHECK(rel_diff(total, cfg.n_particles) < 1e-9);
}

TEST_CASE("density correlator against the closed-box statistics") {
    const auto cfg = small_cfg();
    const int mid = cfg.n_bins / 2;
    const double w = cfg.bin_width();

    SUBCASE("same-bin variance at zero lag") {
        const auto pts = simulate_density_correlator(cfg, {0.0}, mid, mid);
        const double ref = analytic_density_correlator(cfg, 0.0, mid, mid);
        // Poisson statistics coarse-grained over a bin, including the small
        // closed-box factor (1 - w/L).
        const double poisson = mean_density(cfg) / (cfg.area * w);
        CHECK(rel_diff(ref, poisson * (1.0 - w / cfg.box_length)) < 1e-12);
        CHECK(within_3sigma(pts.front(), ref));
    }
    SUBCASE("distant bins carry only the small canonical anticorrelation") {
        const auto pts = simulate_density_correlator(cfg, {0.0}, 1, 6);
        const double ref = analytic_density_correlator(cfg, 0.0, 1, 6);
        CHECK(ref < 0.0);
        CHECK(std::abs(ref) < 0.2 * analytic_density_correlator(cfg, 0.0, mid, mid));
        CHECK(within_3sigma(pts.front(), ref));
    }
    SUBCASE("diffusion kernel at matched lag") {
        // Separation s = 2 bins, probed at 4 D t = s^2.
        const double sep = 2.0 * w;
        const double t_star = sep * sep / (4.0 * cfg.diffusion);
        const auto pts = simulate_density_correlator(cfg, {t_star}, mid - 1, mid + 1);
        const double ref = analytic_density_correlator(cfg, pts.front().lag, mid - 1, mid + 1);
        CHECK(within_3sigma(pts.front(), ref));
        // The propagated kernel part (canonical offset removed) is positive.
        const double canonical = -mean_density(cfg) / (cfg.area * cfg.box_length);
        CHECK(ref > canonical);
    }
    SUBCASE("kernel part decays with separation") {
        const double t = w * w / (4.0 * cfg.diffusion);
        const double canonical = -mean_density(cfg) / (cfg.area * cfg.box_length);
        const double near = analytic_density_correlator(cfg, t, mid, mid) - canonical;
        const double far = analytic_density_correlator(cfg, t, mid, mid + 3) - canonical;
        CHECK(near > 10.0 * std::abs(far));
    }
}

TEST_CASE("field correlator in the interface window") {
    const auto cfg = small_cfg();
    std::vector<double> lags;
    for (int k = 0; k <= 6; ++k) lags.push_back(k * 8.0 * cfg.dt);
    const auto pts = simulate_field_correlator(cfg, lags);

    SUBCASE("zero-lag value matches the window statistics") {
        CHECK(within_3sigma(pts.front(), analytic_field_plateau(cfg)));
    }
    SUBCASE("finite-box factor links the two analytic forms") {
        CHECK(rel_diff(analytic_field_plateau(cfg),
                       continuum_field_plateau(cfg) * (1.0 - cfg.window_fraction)) < 1e-12);
    }
    SUBCASE("decays monotonically within noise") {
        for (size_t i = 1; i < pts.size(); ++i) {
            CHECK(pts[i].value <=
                  pts[i - 1].value + 3.0 * (pts[i].stderr_ + pts[i - 1].stderr_));
        }
        CHECK(pts.back().value < 0.7 * pts.front().value);
    }
    SUBCASE("linear in the walker number") {
        auto cfg2 = cfg;
        cfg2.n_particles = 2 * cfg.n_particles;
        const auto pts2 = simulate_field_correlator(cfg2, {0.0});
        const double sigma = std::hypot(2.0 * pts.front().stderr_, pts2.front().stderr_);
        CHECK(std::abs(pts2.front().value - 2.0 * pts.front().value) <= 3.0 * sigma);
    }
}
