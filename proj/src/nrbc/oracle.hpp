#pragma once

#include <vector>

#include "nrbc/kernel.hpp"

namespace nrbc {

// Dirichlet data A1 exp(-iota |x - x_s|^2) sin^p(omega t) on the circle r = b0.
struct DirichletData {
    double A1 = 10.0;
    double iota = 0.1;
    double xs = 2.1, ys = 2.1;
    double b0 = 2.0;
    double omega = 31.41592653589793;
    int p = 2;
};

// sin^p(omega t) = sum_k amp_k exp(i freq_k t)
struct TemporalExpansion {
    std::vector<cplx> amp;
    std::vector<double> freq;
    double eval(double t) const;
};

TemporalExpansion sin_power_expansion(double omega, int p);

struct ModalBoundaryCoefficient {
    int n = 0;
    cplx g{0.0, 0.0};  // spatial Fourier coefficient
    TemporalExpansion temporal;
    cplx eval(double t) const { return g * temporal.eval(t); }
};

// Coefficients for n = -M..M, stored in that order.
std::vector<ModalBoundaryCoefficient> modal_coefficients(const DirichletData& data, int M, int grid_size = 256);

struct ExactModalSolution {
    int n = 0;
    double b0 = 2.0, c = 5.0;
    std::vector<cplx> zeros;
    std::vector<cplx> k_next_at_zero;  // exp(z) K_{n+1}(z_j)
    BranchCutRule rule;
};

ExactModalSolution build_exact_mode(int n, double b0, double c, const QuadratureConfig& quad = {});

// Kernel of the exact exterior solution at radius r, unshifted in time.
double eval_Hn(const ExactModalSolution& sol, double r, double t);

// Radius-dependent part of the solution: after the shift t -> t - beta0,
// U(r, .) = sum_q amp_q (e^{rate_q .} * G) + direct G.
struct RadialTerms {
    double r = 0, beta0 = 0;
    std::vector<cplx> amp, damp, rate;
    double direct = 0, ddirect = 0;
};

RadialTerms radial_terms(const ExactModalSolution& sol, double r);

struct ModeField {
    cplx value{0.0, 0.0}, dr{0.0, 0.0}, dt{0.0, 0.0};
};

ModeField eval_exact_mode(const RadialTerms& rt, double c, const ModalBoundaryCoefficient& coeff, double t);
ModeField eval_exact_mode(const ExactModalSolution& sol, const ModalBoundaryCoefficient& coeff, double r, double t);

// |(1/c) dU/dt + dU/dr + U/(2b) - (sigma * U(b, .))(t)| with the convolution done in closed form.
double boundary_residual(const ExactModalSolution& sol, const RadialTerms& at_b, const KernelDecomposition& sigma,
                         const ModalBoundaryCoefficient& coeff, double t);

struct ResidualMetrics {
    double max_error = 0;  // E^(1)
    double sum_error = 0;  // E^(2)
};

ResidualMetrics residual_metrics(const std::vector<double>& per_mode);

// (e^{a T} - e^{b T}) / (a - b) evaluated without cancellation or overflow; Re a, Re b <= 0 expected.
cplx exp_divided_difference(cplx a, cplx b, double T);

}  // namespace nrbc
