#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nvsense/config.hpp"
#include "nvsense/constants.hpp"

namespace fs = std::filesystem;
using namespace nvsense;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir() {
    static int counter = 0;
    const fs::path d =
        fs::temp_directory_path() / ("nvsense_cli_test_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(counter++));
    fs::create_directories(d);
    return d;
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(NVSENSE_CLI_PATH) + " " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("config registry") {
    config::RunConfig cfg;
    SUBCASE("assignments reach the right fields") {
        config::apply_assignment(cfg, "electrolyte.c_b=2.5");
        config::apply_assignment(cfg, "diamond.z_bulk = 2e-7");
        config::apply_assignment(cfg, "noise.species_factor=2");
        config::apply_assignment(cfg, "noise.t2star_convention=half");
        config::apply_assignment(cfg, "mc.seed=99");
        CHECK(cfg.ep.c_b == 2.5);
        CHECK(cfg.dp.z_bulk == 2e-7);
        CHECK(cfg.noise.species_sum == electrolyte::SpeciesSum::both);
        CHECK(cfg.noise.t2_convention == nv_spin::T2StarConvention::half);
        CHECK(cfg.mc.seed == 99);
    }
    SUBCASE("unknown keys and malformed values are rejected") {
        CHECK_THROWS_AS(config::apply_assignment(cfg, "electrolyte.bogus=1"), ConfigError);
        CHECK_THROWS_AS(config::apply_assignment(cfg, "electrolyte.c_b=abc"), ConfigError);
        CHECK_THROWS_AS(config::apply_assignment(cfg, "no_equals_sign"), ConfigError);
        CHECK_THROWS_AS(config::apply_assignment(cfg, "noise.species_factor=3"), ConfigError);
    }
    SUBCASE("finalize propagates the shared knobs") {
        config::apply_assignment(cfg, "temperature=310");
        config::apply_assignment(cfg, "electrolyte.eps_r=78");
        config::apply_assignment(cfg, "nv.d_perp_Hzcm=20");
        cfg.finalize();
        CHECK(cfg.ep.T == 310.0);
        CHECK(cfg.dp.T == 310.0);
        CHECK(cfg.ep.eps_e == 78.0 * constants.eps0);
        CHECK(cfg.nv.d_perp == doctest::Approx(0.20).epsilon(1e-12));
        CHECK(cfg.mc.z_s == cfg.ep.z_s);
    }
    SUBCASE("manifest round trip") {
        config::apply_assignment(cfg, "electrolyte.c_b=0.25");
        config::apply_assignment(cfg, "mc.seed=314159");
        const std::string m1 = config::manifest_text(cfg, "test");
        config::RunConfig cfg2;
        const fs::path dir = scratch_dir();
        const fs::path file = dir / "manifest.txt";
        std::ofstream(file) << m1;
        config::apply_file(cfg2, file.string());
        CHECK(config::manifest_text(cfg2, "test") == m1);
        CHECK(cfg2.ep.c_b == 0.25);
        CHECK(cfg2.mc.seed == 314159);
    }
}

TEST_CASE("profile command") {
    const fs::path dir = scratch_dir();
    const auto r = run_cli("profile --out " + (dir / "out").string(), dir);
    REQUIRE(r.exit_code == 0);

    const auto dia = read_csv(dir / "out" / "diamond_profile.csv");
    const auto ele = read_csv(dir / "out" / "electrolyte_profile.csv");
    REQUIRE(dia.size() >= 201);  // header + 200 samples
    REQUIRE(ele.size() >= 201);
    CHECK(dia[0] == std::vector<std::string>{"depth_m", "phi_V", "E_Vpm"});

    SUBCASE("depth column is strictly monotone") {
        double prev = -1.0;
        for (size_t i = 1; i < dia.size(); ++i) {
            const double d = std::stod(dia[i][0]);
            CHECK(d > prev);
            prev = d;
        }
    }
    SUBCASE("surface row obeys displacement continuity") {
        const double e_dia = std::stod(dia[1][2]);
        const double e_ele = std::stod(ele[1][2]);
        CHECK(std::abs(80.0 * std::abs(e_ele) - 5.8 * std::abs(e_dia)) <
              1e-9 * 5.8 * std::abs(e_dia));
    }
    SUBCASE("manifest is written and reproduces the run") {
        REQUIRE(fs::exists(dir / "out" / "manifest.txt"));
        const auto r2 = run_cli("profile --config " + (dir / "out" / "manifest.txt").string() +
                                    " --out " + (dir / "out2").string(),
                                dir);
        REQUIRE(r2.exit_code == 0);
        CHECK(slurp(dir / "out" / "diamond_profile.csv") ==
              slurp(dir / "out2" / "diamond_profile.csv"));
        CHECK(slurp(dir / "out" / "electrolyte_profile.csv") ==
              slurp(dir / "out2" / "electrolyte_profile.csv"));
    }
}

TEST_CASE("profile command, unbiased flat case") {
    const fs::path dir = scratch_dir();
    const auto r = run_cli(
        "profile --set electrolyte.phi_be=0 --set diamond.D_areal=0 --out " +
            (dir / "out").string(),
        dir);
    REQUIRE(r.exit_code == 0);
    for (const char* name : {"diamond_profile.csv", "electrolyte_profile.csv"}) {
        const auto rows = read_csv(dir / "out" / name);
        for (size_t i = 1; i < rows.size(); ++i) {
            CHECK(std::stod(rows[i][2]) == 0.0);
        }
    }
}

TEST_CASE("sweep and fit commands") {
    const fs::path dir = scratch_dir();
    const std::string common =
        " --set sweep.cb_min=0.1 --set sweep.cb_max=10 --set sweep.n_points=5 --out ";
    const auto r = run_cli("fit" + common + (dir / "out").string(), dir);
    REQUIRE(r.exit_code == 0);

    SUBCASE("prints the fit constants") {
        double A = 0.0, B = 0.0;
        std::istringstream ss(r.out);
        std::string line;
        while (std::getline(ss, line)) {
            if (line.rfind("A = ", 0) == 0) A = std::stod(line.substr(4));
            if (line.rfind("B = ", 0) == 0) B = std::stod(line.substr(4));
        }
        CHECK(A > 0.0);
        CHECK(B > 0.0);
        CHECK(B < 1.0);
    }
    SUBCASE("writes the sweep table and summary") {
        const auto rows = read_csv(dir / "out" / "sweep.csv");
        REQUIRE(rows.size() == 6);
        CHECK(rows[0][0] == "c_b");
        CHECK(rows[0][6] == "inv_T2star_Hz");
        const auto summary = slurp(dir / "out" / "summary.json");
        CHECK(summary.find("\"fit\"") != std::string::npos);
        CHECK(summary.find("\"config_hash\"") != std::string::npos);
    }
}

TEST_CASE("correlator, ramsey and sensitivity commands") {
    const fs::path dir = scratch_dir();
    SUBCASE("correlator") {
        const auto r = run_cli("correlator --set correlator.n_points=12 --out " +
                                   (dir / "c").string(),
                               dir);
        REQUIRE(r.exit_code == 0);
        const auto rows = read_csv(dir / "c" / "correlator.csv");
        REQUIRE(rows.size() == 13);
        // Quadrature and closed-form columns agree where both apply.
        for (size_t i = 1; i < rows.size(); ++i) {
            const double simple = std::stod(rows[i][1]);
            const double full = std::stod(rows[i][2]);
            CHECK(std::abs(simple - full) <= 1e-5 * std::abs(simple));
        }
    }
    SUBCASE("ramsey") {
        const auto r = run_cli("ramsey --set ramsey.n_points=32 --out " + (dir / "r").string(),
                               dir);
        REQUIRE(r.exit_code == 0);
        const auto rows = read_csv(dir / "r" / "ramsey.csv");
        REQUIRE(rows.size() == 33);
        for (size_t i = 1; i < rows.size(); ++i) {
            const double p0 = std::stod(rows[i][1]);
            CHECK(p0 >= 0.0);
            CHECK(p0 <= 1.0);
        }
    }
    SUBCASE("sensitivity prints the worked estimate") {
        const auto r = run_cli("sensitivity --out " + (dir / "s").string(), dir);
        REQUIRE(r.exit_code == 0);
        const auto pos = r.out.find("eta = ");
        REQUIRE(pos != std::string::npos);
        const double eta = std::stod(r.out.substr(pos + 6));
        CHECK(eta == doctest::Approx(3.27).epsilon(0.016));
    }
}

TEST_CASE("oracle command is bit-reproducible") {
    const fs::path dir = scratch_dir();
    const std::string small =
        "oracle --set mc.n_particles=1200 --set mc.n_steps=3000 --set mc.replicas=4 "
        "--set mc.dt=3e-7 --set mc.n_bins=8 --set mc.window_fraction=0.125 --seed 2024 --out ";
    const auto r1 = run_cli(small + (dir / "o1").string(), dir);
    const auto r2 = run_cli(small + (dir / "o2").string(), dir);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp(dir / "o1" / "oracle_field.csv") == slurp(dir / "o2" / "oracle_field.csv"));
    CHECK(slurp(dir / "o1" / "oracle_density.csv") == slurp(dir / "o2" / "oracle_density.csv"));
    CHECK(r1.out == r2.out);
}

TEST_CASE("exit codes") {
    const fs::path dir = scratch_dir();
    SUBCASE("config errors exit 2") {
        CHECK(run_cli("profile --set bogus.key=1 --out " + (dir / "a").string(), dir).exit_code ==
              2);
        CHECK(run_cli("profile --whatflag --out " + (dir / "b").string(), dir).exit_code == 2);
        CHECK(run_cli("profile --set electrolyte.c_b=-1 --out " + (dir / "c").string(), dir)
                  .exit_code == 2);
    }
    SUBCASE("solver errors exit 3") {
        // kappa*Delta far below the screened regime.
        const auto r = run_cli("profile --set electrolyte.Delta=1e-9 --out " +
                                   (dir / "d").string(),
                               dir);
        CHECK(r.exit_code == 3);
        CHECK(r.err.find("kappa") != std::string::npos);
    }
}
