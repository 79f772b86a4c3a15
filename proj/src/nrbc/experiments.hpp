#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "nrbc/config.hpp"

namespace nrbc {

struct Gate {
    std::string name;
    double value = 0;
    double limit = 0;
    std::string relation;  // "<=" or ">="
    bool pass = false;
};

Gate gate_le(std::string name, double value, double limit);
Gate gate_ge(std::string name, double value, double limit);

struct ExperimentReport {
    std::string experiment;
    std::vector<Gate> gates;
    std::vector<std::pair<std::string, std::string>> metrics;  // reported, not gated
    std::vector<std::string> files;
    double seconds = 0;
    bool passed() const;
};

// Runs one experiment, writes its CSV files and manifest.txt under cfg.out.
ExperimentReport run_experiment(const RunConfig& cfg);

ExperimentReport run_table1(const RunConfig& cfg);
ExperimentReport run_zeros(const RunConfig& cfg);
ExperimentReport run_wn_profile(const RunConfig& cfg);
ExperimentReport run_nrbc_accuracy(const RunConfig& cfg);
ExperimentReport run_time_convergence(const RunConfig& cfg);
ExperimentReport run_space_convergence(const RunConfig& cfg);
ExperimentReport run_simulate(const RunConfig& cfg);
ExperimentReport run_conv_bench(const RunConfig& cfg);

// Published kernel samples (n, t, sigma) embedded at build time.
struct ReferenceSample {
    int n = 0;
    double t = 0, sigma = 0;
};
std::vector<ReferenceSample> reference_sigma();

// Max over modes 0..M of the discrete L2 and max-norm errors of the solver against
// the exact solution, each mode scaled by |g_n|; one entry per requested time.
struct ModalErrors {
    std::vector<double> l2, max;
};
ModalErrors solver_errors(const RunConfig& cfg, int N, double dt, const std::vector<double>& times);

// Calls fn(i) for i in [0, count) on up to `threads` workers; rethrows the first failure.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

std::string library_version();

}  // namespace nrbc
