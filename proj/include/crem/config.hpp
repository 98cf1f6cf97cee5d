#pragma once
// Flat key=value experiment configuration (one experiment per file). All
// defaults are materialized at parse time and printed into provenance.json.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "crem/errors.hpp"
#include "crem/offspring.hpp"
#include "crem/speed_function.hpp"
#include "crem/types.hpp"

namespace crem {

struct SimConfig {
    std::string speed = "exp:3";
    std::string offspring = "binary";
    double t = 0.0;  // required
    double rho = 0.0;
    std::vector<ComplexTemperature> betas;
    std::uint64_t replicas = 256;
    std::uint64_t seed = 1;
    double grid_step = 0.0;  // 0: min(0.05 t, 0.25)
    std::optional<double> envelope_gamma;
    std::optional<double> envelope_c;
    std::vector<double> envelope_c_list = {5.0, 10.0, 20.0, 40.0};
    std::optional<double> snapshot_b;
    double snapshot_w = 0.0;  // 0: sqrt(t)
    std::uint64_t pop_cap = 1ull << 27;
    double phase_factor = 1.0;
    std::string kernel = "auto";
    std::string strict_speed = "auto";  // auto | true | false

    // scan grid
    double sigma_min = 0.0, sigma_max = 2.0, sigma_step = 0.25;
    double tau_min = 0.0, tau_max = 2.0, tau_step = 0.25;
    double boundary_exclusion = 0.2;
    double scan_tol = 0.15;

    double effective_grid_step() const { return grid_step > 0.0 ? grid_step : default_grid_step(t); }
    double effective_snapshot_w() const { return snapshot_w > 0.0 ? snapshot_w : std::sqrt(t); }

    SpeedFunction speed_function() const { return SpeedFunction::parse(speed); }
    OffspringDistribution offspring_distribution() const;

    static SimConfig parse_file(const std::filesystem::path& path);
    static SimConfig parse_string(const std::string& text);
};

}  // namespace crem
