#pragma once

#include <string>
#include <vector>

#include "nrbc/kernel.hpp"
#include "nrbc/oracle.hpp"
#include "nrbc/solver.hpp"

namespace nrbc {

// Flat key = value configuration. Lists are comma separated, '#' starts a comment.
struct RunConfig {
    std::string experiment = "table1";

    int d = 2;
    double b0 = 2.0, b = 3.0, c = 5.0;

    DirichletData data;

    int M = 32;
    int N = 50;
    double dt = 1e-3;
    double T = 4.0;
    NewmarkParams newmark;
    int grid = 256;

    std::vector<double> times;
    std::vector<double> dt_list;
    std::vector<int> N_list;
    std::vector<double> omega_list, b_list;
    std::vector<int> orders;
    std::vector<int> dims;
    int n_max = 64;
    std::vector<int> steps_list;
    int direct_max_steps = 10000;
    int r_points = 25, phi_points = 64;

    QuadratureConfig quad;

    std::string out = "out";
    int threads = 1;
    double gate_scale = 1.0;
};

// Defaults for one experiment id; throws ConfigError for unknown ids.
RunConfig default_config(const std::string& experiment);

const std::vector<std::string>& experiment_ids();
const std::vector<std::string>& config_keys();

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
void load_config_file(RunConfig& cfg, const std::string& path);
void parse_config_text(RunConfig& cfg, const std::string& text);

// Re-checks every physical and numerical constraint.
void validate(const RunConfig& cfg);

// Resolved configuration in the same key = value grammar.
std::string to_text(const RunConfig& cfg);

// min(requested, NRBC_MAX_THREADS, hardware threads), at least 1.
int effective_threads(int requested);

}  // namespace nrbc
