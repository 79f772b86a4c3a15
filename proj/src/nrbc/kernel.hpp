#pragma once

#include <string>
#include <vector>

#include "nrbc/specfun.hpp"

namespace nrbc {

// Composite Gauss-Legendre layout for integrals over the positive real axis
// weighted by W_n. Panels shrink geometrically toward the peak of W_n.
struct QuadratureConfig {
    int panels = 12;
    int nodes_per_panel = 24;
    double tail_length = 25.0;      // extent beyond the peak for n >= small_order
    int small_order = 5;
    double small_order_length = 30.0;
    int log_decades = 14;           // n = 0: decade panels toward the origin
    bool verify = true;             // compare against a rule with doubled nodes
    double verify_tol = 1e-11;
};

struct BranchCutRule {
    int n = 0;
    std::vector<double> r, w, W;  // nodes, weights, W_n(r)
    double r_max = 0;
};

// W_n(r) = 1 / (K_n(r)^2 + pi^2 I_n(r)^2)
double eval_W(int n, double r);
double log_W(int n, double r);
// sqrt(1+k^2) + log(k / (1 + sqrt(1+k^2))), k > 0
double theta(double kappa);
// Large-order approximation n sqrt(1+k^2) sech(2 n theta(k)) / pi, k = r/n.
double eval_W_asymptotic(int n, double r);

BranchCutRule build_branch_cut_rule(int n, const QuadratureConfig& cfg);

struct KernelParams {
    int d = 2;       // 2: circular boundary, 3: spherical boundary
    int n = 0;       // mode index; order n (d=2) or n+1/2 (d=3)
    double b = 3.0;  // boundary radius
    double c = 5.0;  // wave speed
    QuadratureConfig quad;
    double zero_tol = 1e-12;
};

// sigma(t) = sum_j pole_coeff_j e^{pole_rate_j t} + sum_i node_coeff_i e^{node_rate_i t}
struct KernelDecomposition {
    KernelParams params;
    ZeroSet zeros;
    std::vector<cplx> pole_coeff, pole_rate;
    std::vector<double> node_coeff, node_rate;
    BranchCutRule rule;
};

KernelDecomposition build_kernel(const KernelParams& p);

double eval_sigma(const KernelDecomposition& k, double t);
double eval_omega(const KernelDecomposition& k, double t);

// One row per pole, branch-cut node and requested time; unused columns hold nan.
void write_kernel_csv(const KernelDecomposition& k, const std::vector<double>& times, const std::string& path);

}  // namespace nrbc
