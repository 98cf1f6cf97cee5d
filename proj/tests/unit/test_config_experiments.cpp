#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "crem/config.hpp"
#include "crem/experiments.hpp"
#include "crem/field.hpp"
#include "crem/io_util.hpp"

using namespace crem;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / "crem_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_into(const std::string& cmd, const std::string& cfg_text, const fs::path& dir,
             int workers) {
    auto cfg = SimConfig::parse_string(cfg_text);
    RunOptions opt;
    opt.out_dir = dir;
    opt.workers = workers;
    return run_experiment(cmd, cfg, opt);
}

std::string first_two_lines(const fs::path& p) {
    std::ifstream in(p);
    std::string a, b;
    std::getline(in, a);
    std::getline(in, b);
    return a + "\n" + b + "\n";
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides, errors name the key") {
    auto cfg = SimConfig::parse_string("t = 6\nbetas = 0.3,0.4;2,0\nreplicas = 16\n");
    CHECK(cfg.t == 6.0);
    CHECK(cfg.speed == "exp:3");
    CHECK(cfg.offspring == "binary");
    REQUIRE(cfg.betas.size() == 2);
    CHECK(cfg.betas[1].sigma == 2.0);
    CHECK(cfg.effective_grid_step() == 0.25);
    CHECK(SimConfig::parse_string("t = 2\n").effective_grid_step() == doctest::Approx(0.1));

    auto check_key = [](const std::string& text, const std::string& key) {
        try {
            (void)SimConfig::parse_string(text);
            FAIL_CHECK("expected ConfigError for ", key);
        } catch (const ConfigError& e) {
            CHECK(e.key == key);
        }
    };
    check_key("betas = 0,0\n", "t");
    check_key("t = -1\n", "t");
    check_key("t = 4\nrho = 1.5\n", "rho");
    check_key("t = 4\nreplicas = 0\n", "replicas");
    check_key("t = 4\nbetas = 1;2\n", "betas");
    check_key("t = 4\nworkers = 2\n", "workers");
    check_key("t = 4\nenvelope_gamma = 1.2\n", "envelope_gamma");
    check_key("t = 4\noffspring = 0.5,0.25,0.25\n", "offspring");  // mean 1.75
}

TEST_CASE("experiments reject betas in the wrong phase, naming the mismatch") {
    auto dir = fresh_dir("phase_mismatch");
    try {
        run_into("b1", "t = 4\nbetas = 2,0\nreplicas = 4\n", dir, 1);
        FAIL_CHECK("b1 accepted a B2 point");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("B2") != std::string::npos);
        CHECK(std::string(e.what()).find("b1") != std::string::npos);
    }
    CHECK_THROWS_AS(run_into("b3", "t = 4\nbetas = 0.3,0.3\nreplicas = 4\n", dir, 1), ConfigError);
    CHECK_THROWS_AS(run_into("b2", "t = 4\nbetas = 0.3,1.1\nreplicas = 4\n", dir, 1), ConfigError);
}

TEST_CASE("csv headers are versioned: golden files per experiment") {
    const fs::path golden = fs::path(CREM_SOURCE_DIR) / "tests" / "golden";
    struct Case {
        const char* name;
        const char* cfg;
    };
    const Case cases[] = {
        {"run", "t = 3\nbetas = 0.3,0.4\nreplicas = 3\n"},
        {"scan", "t = 3\nreplicas = 3\nsigma_max = 1\ntau_max = 1\nsigma_step = 0.5\ntau_step = 0.5\n"},
        {"b1", "t = 3\nbetas = 0.3,0.3\nreplicas = 8\n"},
        {"b2", "t = 3\nbetas = 2,0\nreplicas = 8\n"},
        {"b3", "t = 3\nbetas = 0.3,1.1\nreplicas = 8\n"},
        {"envelope", "t = 3\nenvelope_gamma = 0.3\nreplicas = 8\ngrid_step = 0.25\n"},
        {"oracle", "t = 3\nbetas = 0.3,1.1\n"},
        {"validate-speed", "t = 3\n"},
    };
    for (const auto& c : cases) {
        auto dir = fresh_dir(std::string("golden_") + c.name);
        REQUIRE(run_into(c.name, c.cfg, dir, 1) == 0);
        auto got = first_two_lines(dir / "results.csv");
        auto want = slurp(golden / (std::string(c.name) + ".header"));
        CHECK(got == want);
    }
}

TEST_CASE("outputs are byte-identical across runs and worker counts") {
    struct Case {
        const char* name;
        const char* cfg;
    };
    const Case cases[] = {
        {"run", "t = 4\nbetas = 0.3,0.4;1.8,0.1\nreplicas = 12\nseed = 9\n"},
        {"scan",
         "t = 4\nreplicas = 6\nsigma_max = 2\ntau_max = 2\nsigma_step = 1\ntau_step = 1\nseed = 9\n"},
        {"b1", "t = 4\nbetas = 0.3,0.3\nreplicas = 12\nseed = 9\n"},
        {"b2", "t = 4\nbetas = 2,0\nreplicas = 12\nseed = 9\nsnapshot_b = 6\n"},
        {"b3", "t = 4\nbetas = 0.3,1.1\nreplicas = 150\nseed = 9\n"},
        {"envelope", "t = 4\nenvelope_gamma = 0.3\nreplicas = 12\nseed = 9\n"},
    };
    for (const auto& c : cases) {
        auto d1 = fresh_dir(std::string("det1_") + c.name);
        auto d2 = fresh_dir(std::string("det2_") + c.name);
        auto d8 = fresh_dir(std::string("det8_") + c.name);
        REQUIRE(run_into(c.name, c.cfg, d1, 1) == 0);
        REQUIRE(run_into(c.name, c.cfg, d2, 1) == 0);
        REQUIRE(run_into(c.name, c.cfg, d8, 8) == 0);
        for (const char* f : {"results.csv", "verdicts.json", "provenance.json"}) {
            CHECK(slurp(d1 / f) == slurp(d2 / f));
            CHECK(slurp(d1 / f) == slurp(d8 / f));
        }
    }
}

TEST_CASE("seed override lands in provenance and changes results") {
    auto cfg = SimConfig::parse_string("t = 4\nbetas = 0.3,0.4\nreplicas = 6\nseed = 1\n");
    auto d1 = fresh_dir("seed_a");
    auto d2 = fresh_dir("seed_b");
    RunOptions o1;
    o1.out_dir = d1;
    o1.workers = 1;
    RunOptions o2 = o1;
    o2.out_dir = d2;
    o2.seed_override = 777;
    run_experiment("run", cfg, o1);
    run_experiment("run", cfg, o2);
    CHECK(slurp(d1 / "results.csv") != slurp(d2 / "results.csv"));
    CHECK(slurp(d2 / "provenance.json").find("777") != std::string::npos);
}

TEST_CASE("merging preserves single-replica rows exactly") {
    // Row i of a 4-replica run equals the row of a lone run of replica i.
    FieldParams params;
    params.speed = SpeedFunction::exp_family(3.0);
    params.offspring = OffspringDistribution::binary();
    params.t = 4.0;
    params.rho = 0.5;
    SinkConfig sinks;
    sinks.betas = {{0.3, 0.4}};
    auto kern = select_kernel(KernelKind::Auto);
    auto merged = run_replicas(params, sinks, 123, 4, 2, kern);
    auto lone = run_replica(params, sinks, 123, 2, kern);
    CHECK(merged[2].n_t == lone.n_t);
    CHECK(merged[2].partition[0].log_scale == lone.partition[0].log_scale);
    CHECK(merged[2].partition[0].mantissa == lone.partition[0].mantissa);
    CHECK(merged[2].max_x == lone.max_x);
}

TEST_CASE("beta = (0,0) run column reconstructs n_t exactly") {
    auto dir = fresh_dir("beta_zero");
    REQUIRE(run_into("run", "t = 4\nbetas = 0,0\nreplicas = 5\nseed = 3\n", dir, 1) == 0);
    std::ifstream in(dir / "results.csv");
    std::string line;
    std::getline(in, line);  // schema
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) f.push_back(item);
        REQUIRE(f.size() >= 9);
        double n_t = std::stod(f[1]);
        double log_scale = std::stod(f[6]);
        double m_re = std::stod(f[7]);
        double m_im = std::stod(f[8]);
        CHECK(log_scale == 0.0);
        CHECK(m_re == n_t);
        CHECK(m_im == 0.0);
    }
}
