#include "nvsense/brownian.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

namespace nvsense::brownian {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

std::uint64_t replica_seed(std::uint64_t base, int replica) {
    return base ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(replica + 1));
}

double field_scale(const McConfig& cfg) {
    return constants.F * cfg.z_s / (cfg.eps_e * constants.N_A * cfg.area);
}

std::vector<long> lags_in_steps(const McConfig& cfg, const std::vector<double>& lag_grid) {
    std::vector<long> steps;
    steps.reserve(lag_grid.size());
    for (double lag : lag_grid) {
        if (lag < 0.0) throw InvalidParams("lag grid entries must be >= 0");
        steps.push_back(std::lround(lag / cfg.dt));
    }
    return steps;
}

// Marsaglia polar pairs; noticeably cheaper than std::normal_distribution
// and just as exact.
class GaussianSource {
  public:
    double operator()(std::mt19937_64& rng) {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01(rng) - 1.0;
            v = 2.0 * uniform01(rng) - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

  private:
    static double uniform01(std::mt19937_64& rng) {
        return (rng() >> 11) * 0x1.0p-53;  // [0, 1) with 53 random bits
    }
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// One walker population in [0, L] with reflecting walls.
class Walkers {
  public:
    Walkers(const McConfig& cfg, std::mt19937_64& rng)
        : length_(cfg.box_length), sigma_(std::sqrt(2.0 * cfg.diffusion * cfg.dt)) {
        std::uniform_real_distribution<double> uniform(0.0, cfg.box_length);
        x_.resize(cfg.n_particles);
        for (double& x : x_) x = uniform(rng);
    }

    template <class PerMove>
    void step(std::mt19937_64& rng, PerMove&& on_move) {
        step_scaled(rng, 1.0, on_move);
    }

    // Gaussian displacements, variance 2 D dt scale^2; reflection keeps the
    // walker inside [0, L] (uniform equilibrium is preserved for any step).
    template <class PerMove>
    void step_scaled(std::mt19937_64& rng, double scale, PerMove&& on_move) {
        const double s = sigma_ * scale;
        for (double& x : x_) {
            const double old_x = x;
            double nx = x + s * gauss_(rng);
            while (nx < 0.0 || nx > length_) {
                if (nx < 0.0) nx = -nx;
                if (nx > length_) nx = 2.0 * length_ - nx;
            }
            x = nx;
            on_move(old_x, nx);
        }
    }

    const std::vector<double>& positions() const { return x_; }

  private:
    double length_;
    double sigma_;
    std::vector<double> x_;
    GaussianSource gauss_;
};

// Burn-in covering >= box_length^2/diffusion of simulated time. Starting
// positions are already equilibrium-distributed, so the walk only has to
// decorrelate them; it may take the coarsest step the box allows.
template <class PerMove>
void equilibrate(const McConfig& cfg, Walkers& walk, std::mt19937_64& rng, PerMove&& on_move) {
    if (cfg.burnin_steps > 0) {
        for (long t = 0; t < cfg.burnin_steps; ++t) walk.step(rng, on_move);
        return;
    }
    const double t_target = cfg.box_length * cfg.box_length / cfg.diffusion;
    const double dt_coarse = t_target / 100.0;
    const double scale = std::sqrt(dt_coarse / cfg.dt);
    for (int t = 0; t < 100; ++t) walk.step_scaled(rng, scale, on_move);
}

// Ring buffer of one scalar series plus product accumulators per lag.
class LagCorrelator {
  public:
    explicit LagCorrelator(const std::vector<long>& lags)
        : lags_(lags), ring_(*std::max_element(lags.begin(), lags.end()) + 1, 0.0),
          sum_(lags.size(), 0.0), count_(lags.size(), 0) {}

    // a(t) is the leading series, b(t) the lagged one; for autocorrelation
    // pass the same value twice.
    void push(double a, double b) {
        ring_[t_ % static_cast<long>(ring_.size())] = b;
        for (size_t k = 0; k < lags_.size(); ++k) {
            const long lag = lags_[k];
            if (t_ >= lag) {
                const double past = ring_[(t_ - lag) % static_cast<long>(ring_.size())];
                sum_[k] += a * past;
                count_[k] += 1;
            }
        }
        ++t_;
    }

    std::vector<double> means() const {
        std::vector<double> out(lags_.size(), 0.0);
        for (size_t k = 0; k < lags_.size(); ++k) {
            out[k] = count_[k] > 0 ? sum_[k] / count_[k] : 0.0;
        }
        return out;
    }

  private:
    std::vector<long> lags_;
    std::vector<double> ring_;
    std::vector<double> sum_;
    std::vector<long> count_;
    long t_ = 0;
};

std::vector<CorrelatorPoint> combine_replicas(const std::vector<std::vector<double>>& per_replica,
                                              const std::vector<long>& lag_steps, double dt) {
    const size_t n_lags = lag_steps.size();
    const size_t R = per_replica.size();
    std::vector<CorrelatorPoint> out(n_lags);
    for (size_t k = 0; k < n_lags; ++k) {
        double mean = 0.0;
        for (const auto& v : per_replica) mean += v[k];
        mean /= static_cast<double>(R);
        double var = 0.0;
        for (const auto& v : per_replica) var += (v[k] - mean) * (v[k] - mean);
        var /= static_cast<double>(R - 1);
        out[k].lag = lag_steps[k] * dt;
        out[k].value = mean;
        out[k].stderr_ = std::sqrt(var / static_cast<double>(R));
    }
    return out;
}

int bin_index(double x, double inv_width, int n_bins) {
    int idx = static_cast<int>(x * inv_width);
    return std::clamp(idx, 0, n_bins - 1);
}

// One walk, correlators for every requested bin pair; flattened pair-major.
std::vector<double> density_replica(const McConfig& cfg, const std::vector<long>& lags,
                                    const std::vector<BinPair>& pairs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Walkers walk(cfg, rng);
    const double w = cfg.bin_width();
    const double inv_w = 1.0 / w;
    std::vector<long> counts(cfg.n_bins, 0);
    for (double x : walk.positions()) counts[bin_index(x, inv_w, cfg.n_bins)] += 1;

    auto on_move = [&](double from, double to) {
        const int a = bin_index(from, inv_w, cfg.n_bins);
        const int b = bin_index(to, inv_w, cfg.n_bins);
        if (a != b) {
            counts[a] -= 1;
            counts[b] += 1;
        }
    };

    equilibrate(cfg, walk, rng, on_move);

    const double mean_count = static_cast<double>(cfg.n_particles) / cfg.n_bins;
    std::vector<LagCorrelator> corr(pairs.size(), LagCorrelator(lags));
    long total_check = 0;
    for (long t = 0; t < cfg.n_steps; ++t) {
        walk.step(rng, on_move);
        for (size_t k = 0; k < pairs.size(); ++k) {
            corr[k].push(counts[pairs[k].i] - mean_count, counts[pairs[k].j] - mean_count);
        }
        if ((t & 0xFFF) == 0) {
            total_check = 0;
            for (long c : counts) total_check += c;
            if (total_check != cfg.n_particles) {
                throw Error("brownian: particle count not conserved");
            }
        }
    }

    // counts -> number density: divide by (A w); correlator scales by square.
    const double scale = 1.0 / (cfg.area * w);
    std::vector<double> out;
    for (auto& c : corr) {
        for (double v : c.means()) out.push_back(v * scale * scale);
    }
    return out;
}

std::vector<double> field_replica(const McConfig& cfg, const std::vector<long>& lags,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Walkers plus(cfg, rng);
    Walkers minus(cfg, rng);
    const double edge = cfg.window_fraction * cfg.box_length;
    long in_plus = 0;
    long in_minus = 0;
    for (double x : plus.positions()) in_plus += x <= edge;
    for (double x : minus.positions()) in_minus += x <= edge;

    auto tracker = [&](long& n) {
        return [&n, edge](double from, double to) {
            const bool was = from <= edge;
            const bool is = to <= edge;
            if (was != is) n += is ? 1 : -1;
        };
    };

    equilibrate(cfg, plus, rng, tracker(in_plus));
    equilibrate(cfg, minus, rng, tracker(in_minus));

    LagCorrelator corr(lags);
    const double scale = field_scale(cfg);
    for (long t = 0; t < cfg.n_steps; ++t) {
        plus.step(rng, tracker(in_plus));
        minus.step(rng, tracker(in_minus));
        // Mean window counts are equal for the two species, so they cancel
        // in the signed sum.
        const double dE = scale * static_cast<double>(in_plus - in_minus);
        corr.push(dE, dE);
    }
    return corr.means();
}

template <class Body>
std::vector<std::vector<double>> run_replicas(const McConfig& cfg, Body&& body) {
    std::vector<std::future<std::vector<double>>> futs;
    futs.reserve(cfg.replicas);
    for (int r = 0; r < cfg.replicas; ++r) {
        futs.push_back(std::async(std::launch::async, body, replica_seed(cfg.seed, r)));
    }
    std::vector<std::vector<double>> out;
    out.reserve(cfg.replicas);
    for (auto& f : futs) out.push_back(f.get());
    return out;
}

// Double integral of the 1d Gaussian propagator over two intervals:
// J'' = G, J(x) = (x/2) Erf(x/s) + (s / (2 sqrt(pi))) exp(-(x/s)^2).
double propagator_j(double x, double s) {
    if (s == 0.0) return 0.5 * std::abs(x);
    const double u = x / s;
    return 0.5 * x * std::erf(u) + (s / (2.0 * kSqrtPi)) * std::exp(-u * u);
}

}  // namespace

void McConfig::validate() const {
    if (n_particles <= 0) throw InvalidParams("mc: n_particles must be > 0");
    if (!(box_length > 0.0)) throw InvalidParams("mc: box_length must be > 0");
    if (!(area > 0.0)) throw InvalidParams("mc: area must be > 0");
    if (!(diffusion > 0.0)) throw InvalidParams("mc: diffusion must be > 0");
    if (!(dt > 0.0)) throw InvalidParams("mc: dt must be > 0");
    if (n_steps <= 0) throw InvalidParams("mc: n_steps must be > 0");
    if (n_bins < 2) throw InvalidParams("mc: n_bins must be >= 2");
    if (z_s < 1) throw InvalidParams("mc: z_s must be >= 1");
    if (!(eps_e > 0.0)) throw InvalidParams("mc: eps_e must be > 0");
    if (!(window_fraction > 0.0 && window_fraction < 1.0)) {
        throw InvalidParams("mc: window_fraction must lie in (0, 1)");
    }
    if (replicas < 2) throw InvalidParams("mc: replicas must be >= 2 for error bars");
    if (!(dt < box_length * box_length / (100.0 * diffusion))) {
        throw InvalidParams("mc: dt must satisfy dt < box_length^2 / (100 D)");
    }
    if (bin_width() < 3.0 * std::sqrt(2.0 * diffusion * dt)) {
        throw ResolutionError("mc: bin width below 3 step lengths; decrease dt or n_bins");
    }
}

std::vector<std::vector<CorrelatorPoint>> simulate_density_correlators(
    const McConfig& cfg, const std::vector<double>& lag_grid, const std::vector<BinPair>& pairs) {
    cfg.validate();
    if (lag_grid.empty()) throw InvalidParams("lag grid must not be empty");
    if (pairs.empty()) throw InvalidParams("bin pair list must not be empty");
    for (const auto& pr : pairs) {
        if (pr.i < 0 || pr.i >= cfg.n_bins || pr.j < 0 || pr.j >= cfg.n_bins) {
            throw InvalidParams("bin indices out of range");
        }
    }
    const auto lags = lags_in_steps(cfg, lag_grid);
    auto per_replica = run_replicas(
        cfg, [&](std::uint64_t seed) { return density_replica(cfg, lags, pairs, seed); });
    std::vector<std::vector<CorrelatorPoint>> out;
    const size_t n_lags = lags.size();
    for (size_t k = 0; k < pairs.size(); ++k) {
        std::vector<std::vector<double>> slice;
        slice.reserve(per_replica.size());
        for (const auto& rep : per_replica) {
            slice.emplace_back(rep.begin() + k * n_lags, rep.begin() + (k + 1) * n_lags);
        }
        out.push_back(combine_replicas(slice, lags, cfg.dt));
    }
    return out;
}

std::vector<CorrelatorPoint> simulate_density_correlator(const McConfig& cfg,
                                                         const std::vector<double>& lag_grid,
                                                         int bin_i, int bin_j) {
    return simulate_density_correlators(cfg, lag_grid, {{bin_i, bin_j}}).front();
}

std::vector<CorrelatorPoint> simulate_field_correlator(const McConfig& cfg,
                                                       const std::vector<double>& lag_grid) {
    cfg.validate();
    if (lag_grid.empty()) throw InvalidParams("lag grid must not be empty");
    const auto lags = lags_in_steps(cfg, lag_grid);
    auto per_replica =
        run_replicas(cfg, [&](std::uint64_t seed) { return field_replica(cfg, lags, seed); });
    return combine_replicas(per_replica, lags, cfg.dt);
}

std::vector<CorrelatorPoint> simulate_density_profile(const McConfig& cfg) {
    cfg.validate();
    auto body = [&](std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        Walkers walk(cfg, rng);
        const double w = cfg.bin_width();
        const double inv_w = 1.0 / w;
        std::vector<long> counts(cfg.n_bins, 0);
        for (double x : walk.positions()) counts[bin_index(x, inv_w, cfg.n_bins)] += 1;
        auto on_move = [&](double from, double to) {
            const int a = bin_index(from, inv_w, cfg.n_bins);
            const int b = bin_index(to, inv_w, cfg.n_bins);
            if (a != b) {
                counts[a] -= 1;
                counts[b] += 1;
            }
        };
        equilibrate(cfg, walk, rng, on_move);
        std::vector<double> acc(cfg.n_bins, 0.0);
        for (long t = 0; t < cfg.n_steps; ++t) {
            walk.step(rng, on_move);
            for (int b = 0; b < cfg.n_bins; ++b) acc[b] += counts[b];
        }
        const double scale = 1.0 / (cfg.area * w * cfg.n_steps);
        for (double& v : acc) v *= scale;
        return acc;
    };
    auto per_replica = run_replicas(cfg, body);
    std::vector<long> pseudo_lags(cfg.n_bins);
    for (int b = 0; b < cfg.n_bins; ++b) pseudo_lags[b] = b;
    auto pts = combine_replicas(per_replica, pseudo_lags, 1.0);
    for (int b = 0; b < cfg.n_bins; ++b) pts[b].lag = (b + 0.5) * cfg.bin_width();
    return pts;
}

double mean_density(const McConfig& cfg) {
    return cfg.n_particles / (cfg.area * cfg.box_length);
}

double analytic_density_correlator(const McConfig& cfg, double lag, int bin_i, int bin_j) {
    const double w = cfg.bin_width();
    const double a1 = bin_i * w, b1 = a1 + w;
    const double a2 = bin_j * w, b2 = a2 + w;
    const double s = lag > 0.0 ? std::sqrt(4.0 * cfg.diffusion * lag) : 0.0;
    const double kernel = propagator_j(b1 - a2, s) + propagator_j(a1 - b2, s) -
                          propagator_j(a1 - a2, s) - propagator_j(b1 - b2, s);
    const double n = mean_density(cfg);
    return n / (cfg.area * w * w) * (kernel - w * w / cfg.box_length);
}

double analytic_field_plateau(const McConfig& cfg) {
    const double p = cfg.window_fraction;
    const double s = field_scale(cfg);
    return s * s * 2.0 * cfg.n_particles * p * (1.0 - p);
}

double continuum_field_plateau(const McConfig& cfg) {
    const double p = cfg.window_fraction;
    const double s = field_scale(cfg);
    return s * s * 2.0 * cfg.n_particles * p;
}

}  // namespace nvsense::brownian
