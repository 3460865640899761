#include "nvsense/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "nvsense/constants.hpp"
#include "nvsense/io.hpp"
#include "nvsense/version.hpp"

namespace nvsense::config {

namespace {

double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigError("config: cannot parse '" + v + "' as a number for " + key);
    }
    return x;
}

long parse_long(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') {
        throw ConfigError("config: cannot parse '" + v + "' as an integer for " + key);
    }
    return x;
}

struct Entry {
    std::string key;
    std::function<void(const std::string&)> set;
    std::function<std::string()> get;
};

class Registry {
  public:
    explicit Registry(RunConfig& cfg) {
        add_double("temperature", cfg.temperature);
        add_double("electrolyte.c_b", cfg.ep.c_b);
        add_int("electrolyte.z_s", cfg.ep.z_s);
        add_double("electrolyte.D_plus", cfg.ep.D_plus);
        add_double("electrolyte.D_minus", cfg.ep.D_minus);
        add_double("electrolyte.eps_r", cfg.eps_r_electrolyte);
        add_double("electrolyte.Delta", cfg.ep.Delta);
        add_double("electrolyte.A", cfg.ep.A);
        add_double("electrolyte.phi_be", cfg.ep.phi_be);

        add_double("diamond.eps_r", cfg.eps_r_diamond);
        add_double("diamond.E_gap", cfg.dp.E_gap);
        add_double("diamond.m_eff_n", cfg.dp.m_eff_n);
        add_double("diamond.m_eff_p", cfg.dp.m_eff_p);
        add_double("diamond.D_areal", cfg.dp.D_areal);
        add_double("diamond.d_max", cfg.dp.d_max);
        add_double("diamond.frac_Ns", cfg.dp.frac_Ns);
        add_double("diamond.frac_NV", cfg.dp.frac_NV);
        add_double("diamond.E_d_below_Ec", cfg.dp.E_d_below_Ec);
        add_double("diamond.E_a_above_Ev", cfg.dp.E_a_above_Ev);
        add_double("diamond.N_d2", cfg.dp.N_d2);
        add_double("diamond.E_d2_below_Ec", cfg.dp.E_d2_below_Ec);
        add_double("diamond.z_bulk", cfg.dp.z_bulk);
        add_double("diamond.phi_bd", cfg.dp.phi_bd);

        add_double("nv.D_zfs", cfg.nv.D_zfs);
        add_double("nv.gamma_e", cfg.nv.gamma_e);
        add_double("nv.d_parallel_Hzcm", cfg.d_parallel_Hzcm);
        add_double("nv.d_perp_Hzcm", cfg.d_perp_Hzcm);
        add_double("nv.d_perp_prime_Hzcm", cfg.d_perp_prime_Hzcm);
        add_double("nv.B_z", cfg.nv.B_z);
        add_double("nv.phi_B", cfg.nv.phi_B);

        add_double("readout.alpha", cfg.readout.alpha);
        add_double("readout.beta", cfg.readout.beta_counts);

        entries_.push_back(Entry{
            "noise.species_factor",
            [&cfg](const std::string& v) {
                const long f = parse_long("noise.species_factor", v);
                if (f != 1 && f != 2) {
                    throw ConfigError("config: noise.species_factor must be 1 or 2");
                }
                cfg.noise.species_sum = f == 1 ? electrolyte::SpeciesSum::single
                                               : electrolyte::SpeciesSum::both;
            },
            [&cfg] {
                return std::to_string(static_cast<int>(cfg.noise.species_sum));
            }});
        entries_.push_back(Entry{
            "noise.t2star_convention",
            [&cfg](const std::string& v) {
                if (v == "eq26") {
                    cfg.noise.t2_convention = nv_spin::T2StarConvention::eq26;
                } else if (v == "half") {
                    cfg.noise.t2_convention = nv_spin::T2StarConvention::half;
                } else {
                    throw ConfigError("config: noise.t2star_convention must be eq26 or half");
                }
            },
            [&cfg] {
                return cfg.noise.t2_convention == nv_spin::T2StarConvention::eq26
                           ? std::string("eq26")
                           : std::string("half");
            }});

        add_int("mc.n_particles", cfg.mc.n_particles);
        add_double("mc.box_length", cfg.mc.box_length);
        add_double("mc.area", cfg.mc.area);
        add_double("mc.diffusion", cfg.mc.diffusion);
        add_double("mc.dt", cfg.mc.dt);
        add_long("mc.n_steps", cfg.mc.n_steps);
        add_int("mc.n_bins", cfg.mc.n_bins);
        entries_.push_back(Entry{"mc.seed",
                                 [&cfg](const std::string& v) {
                                     char* end = nullptr;
                                     cfg.mc.seed = std::strtoull(v.c_str(), &end, 10);
                                     if (end == v.c_str() || *end != '\0') {
                                         throw ConfigError("config: bad mc.seed '" + v + "'");
                                     }
                                 },
                                 [&cfg] { return std::to_string(cfg.mc.seed); }});
        add_double("mc.window_fraction", cfg.mc.window_fraction);
        add_int("mc.replicas", cfg.mc.replicas);
        add_long("mc.burnin_steps", cfg.mc.burnin_steps);

        add_double("sweep.cb_min", cfg.sweep_cb_min);
        add_double("sweep.cb_max", cfg.sweep_cb_max);
        add_int("sweep.n_points", cfg.sweep_n_points);
        add_double("sweep.depth", cfg.depth);

        add_double("correlator.t_min", cfg.corr_t_min);
        add_double("correlator.t_max", cfg.corr_t_max);
        add_int("correlator.n_points", cfg.corr_n_points);
        add_double("correlator.V0", cfg.corr_V0);

        add_double("ramsey.tau_min", cfg.ramsey_tau_min);
        add_double("ramsey.tau_max", cfg.ramsey_tau_max);
        add_int("ramsey.n_points", cfg.ramsey_n_points);
        add_double("ramsey.detuning_Hz", cfg.ramsey_detuning_Hz);

        add_double("sensitivity.A", cfg.sens_A);
        add_double("sensitivity.B", cfg.sens_B);
        add_double("sensitivity.tau", cfg.sens_tau);
        add_double("sensitivity.c_b", cfg.sens_cb);
    }

    void set(const std::string& key, const std::string& value) const {
        for (const auto& e : entries_) {
            if (e.key == key) {
                e.set(value);
                return;
            }
        }
        throw ConfigError("config: unknown key '" + key + "'");
    }

    const std::vector<Entry>& entries() const { return entries_; }

  private:
    void add_double(const std::string& key, double& ref) {
        entries_.push_back(Entry{key,
                                 [&ref, key](const std::string& v) { ref = parse_double(key, v); },
                                 [&ref] { return io::fmt_full(ref); }});
    }
    void add_int(const std::string& key, int& ref) {
        entries_.push_back(
            Entry{key,
                  [&ref, key](const std::string& v) { ref = static_cast<int>(parse_long(key, v)); },
                  [&ref] { return std::to_string(ref); }});
    }
    void add_long(const std::string& key, long& ref) {
        entries_.push_back(Entry{key,
                                 [&ref, key](const std::string& v) { ref = parse_long(key, v); },
                                 [&ref] { return std::to_string(ref); }});
    }

    std::vector<Entry> entries_;
};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void RunConfig::finalize() {
    ep.T = temperature;
    dp.T = temperature;
    ep.eps_e = eps_r_electrolyte * constants.eps0;
    dp.eps_d = eps_r_diamond * constants.eps0;
    nv.d_parallel = d_parallel_Hzcm * nv_spin::hz_cm_per_volt;
    nv.d_perp = d_perp_Hzcm * nv_spin::hz_cm_per_volt;
    nv.d_perp_prime = d_perp_prime_Hzcm * nv_spin::hz_cm_per_volt;
    mc.z_s = ep.z_s;
    mc.eps_e = ep.eps_e;
    ep.validate();
    dp.validate();
    nv.validate();
    readout.validate();
    mc.validate();
    if (!(depth > 0.0 && depth < dp.z_bulk)) {
        throw ConfigError("config: sweep.depth must lie in (0, diamond.z_bulk)");
    }
}

std::vector<double> RunConfig::cb_grid() const {
    return pipeline::default_cb_grid(sweep_cb_min, sweep_cb_max, sweep_n_points);
}

void apply_assignment(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("config: expected key=value, got '" + assignment + "'");
    }
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key in '" + assignment + "'");
    Registry(cfg).set(key, value);
}

void apply_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    const Registry reg(cfg);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                              ": expected key=value");
        }
        reg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
}

std::string manifest_text(const RunConfig& cfg, const std::string& command) {
    // The manifest is itself a valid config file: comments carry provenance,
    // the key lines reproduce the run bit for bit.
    std::ostringstream out;
    out << "# nvsense " << version << " manifest\n";
    out << "# command: " << command << "\n";
    out << "# seed: " << cfg.mc.seed << "\n";
    RunConfig copy = cfg;
    const Registry reg(copy);
    for (const auto& e : reg.entries()) {
        out << e.key << "=" << e.get() << "\n";
    }
    return out.str();
}

}  // namespace nvsense::config
