#pragma once
// Experiment recipes behind the CLI subcommands. Every experiment writes
// results.csv, verdicts.json and provenance.json into the output directory;
// outputs are byte-identical across runs and worker counts for a fixed config.

#include <filesystem>
#include <optional>
#include <string>

#include "crem/config.hpp"

namespace crem {

struct RunOptions {
    std::filesystem::path out_dir = ".";
    int workers = 0;  // 0: hardware concurrency
    std::optional<std::uint64_t> seed_override;
};

int run_validate_speed(const SimConfig& cfg, const RunOptions& opt);
int run_plain(const SimConfig& cfg, const RunOptions& opt);
int run_scan(const SimConfig& cfg, const RunOptions& opt);
int run_b1(const SimConfig& cfg, const RunOptions& opt);
int run_b2(const SimConfig& cfg, const RunOptions& opt);
int run_b3(const SimConfig& cfg, const RunOptions& opt);
int run_envelope(const SimConfig& cfg, const RunOptions& opt);
int run_oracle(const SimConfig& cfg, const RunOptions& opt);

// Dispatch by subcommand name; applies the seed override before provenance is
// written so the effective seed is what gets recorded.
int run_experiment(const std::string& name, SimConfig cfg, RunOptions opt);

}  // namespace crem
