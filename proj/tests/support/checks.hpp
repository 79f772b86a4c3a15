#pragma once

// Property checks shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "nrbc/convolution.hpp"
#include "nrbc/errors.hpp"
#include "nrbc/kernel.hpp"
#include "nrbc/solver.hpp"
#include "talbot.hpp"

namespace checks {

using namespace nrbc;

// sigma from its Laplace transform s/c + 1/(2b) + (s/c) K'(sb/c)/K(sb/c)
inline double talbot_sigma(int d, int n, double b, double c, double t) {
    using namespace mp_oracle;
    const mpf bb = b, cc = c;
    auto F = [&](const mpc& s) {
        mpc z = s * bb / cc;
        return s / cc + mpf(1) / (2 * bb) + s / cc * log_derivative_k(n, d == 3, z);
    };
    return talbot_invert(F, t);
}

// Shifted exterior kernel at radius r from exp(z) K_n(z) ratios, tau = t - (r - b0)/c
inline double talbot_hn(int n, double b0, double c, double r, double tau) {
    using namespace mp_oracle;
    const mpf bb = b0, cc = c, rr = r;
    const mpf direct = sqrt(bb / rr);
    auto F = [&](const mpc& s) { return bessel_k_scaled(n, s * rr / cc) / bessel_k_scaled(n, s * bb / cc) - direct; };
    return talbot_invert(F, tau);
}

// Largest |omega(t) - (omega(0) + c int_0^t sigma)| with the integral by 30-point Gauss-Legendre
// on panels graded geometrically toward t = 0, where the fast branch-cut terms live.
inline double omega_sigma_deviation(const KernelDecomposition& k, const std::vector<double>& times) {
    const KernelParams& p = k.params;
    using GL = boost::math::quadrature::gauss<double, 30>;
    auto f = [&](double s) { return eval_sigma(k, s); };
    auto panels = [&](double a, double b) {
        double s = 0;
        int m = std::max(1, int(std::ceil((b - a) / 0.05)));
        for (int i = 0; i < m; ++i) s += GL::integrate(f, a + (b - a) * i / m, a + (b - a) * (i + 1) / m);
        return s;
    };
    double worst = 0, prev_t = 0, integral = 0;
    for (double t : times) {
        if (prev_t == 0) {
            double lo = t * std::ldexp(1.0, -40);
            integral += GL::integrate(f, 0.0, lo);
            double a = lo;
            for (; 2 * a < t; a *= 2) integral += GL::integrate(f, a, 2 * a);
            integral += panels(a, t);
        } else {
            integral += panels(prev_t, t);
        }
        prev_t = t;
        double expect = -(p.d - 1) * p.c / (2 * p.b) + p.c * integral;
        double got = eval_omega(k, t);
        worst = std::max(worst, std::abs(got - expect) / std::max(1.0, std::abs(expect)));
    }
    return worst;
}

// omega = omega(0) + c int sigma written as an exponential sum, with a rate-0 term for the constant
inline ExpSum omega_exp_sum(const KernelDecomposition& k) {
    const KernelParams& p = k.params;
    ExpSum s;
    double constant = -(p.d - 1) * p.c / (2 * p.b);
    for (size_t j = 0; j < k.pole_rate.size(); ++j) {
        cplx a = p.c * k.pole_coeff[j] / k.pole_rate[j];
        s.coeff.push_back(a);
        s.rate.push_back(k.pole_rate[j]);
        constant -= a.real();
    }
    for (size_t i = 0; i < k.node_rate.size(); ++i) {
        double a = p.c * k.node_coeff[i] / k.node_rate[i];
        s.real_coeff.push_back(a);
        s.real_rate.push_back(k.node_rate[i]);
        constant -= a;
    }
    s.real_coeff.push_back(constant);
    s.real_rate.push_back(0.0);
    return s;
}

struct DissipativitySlack {
    // min over signals of (rhs - lhs) / ||v||^2; the inequality holds when >= -tol
    double omega = INFINITY;
    double sigma = INFINITY;
};

// Random piecewise-linear signals on [0, 4b/c]; the convolutions are exact for such signals,
// the outer time integrals use Simpson's rule on a refined grid.
inline DissipativitySlack dissipativity(const KernelDecomposition& k, int signals, unsigned seed) {
    const KernelParams& p = k.params;
    const double T = 4 * p.b / p.c;
    const int panels = 32, sub = 16, steps = panels * sub;
    const double H = T / panels, h = T / steps;
    std::mt19937 rng(seed);
    std::normal_distribution<double> normal;
    KernelConvolver om(omega_exp_sum(k)), sg(k);
    DissipativitySlack out;

    auto simpson = [&](const std::vector<double>& f, int a, int b) {
        double s = f[a] + f[b];
        for (int i = a + 1; i < b; ++i) s += (i - a) % 2 ? 4 * f[i] : 2 * f[i];
        return s * h / 3;
    };

    for (int trial = 0; trial < signals; ++trial) {
        std::vector<double> nodes(panels + 1);
        for (double& x : nodes) x = normal(rng);
        auto v_at = [&](int i) {
            int pnl = std::min(i / sub, panels - 1);
            double u = double(i - pnl * sub) / sub;
            return (1 - u) * nodes[pnl] + u * nodes[pnl + 1];
        };

        // omega * v against v
        {
            om.reset();
            std::vector<double> prod(steps + 1), vsq(steps + 1);
            prod[0] = 0;
            vsq[0] = v_at(0) * v_at(0);
            for (int i = 0; i < steps; ++i) {
                double conv = om.step(v_at(i), v_at(i + 1), h);
                double vi = v_at(i + 1);
                prod[i + 1] = conv * vi;
                vsq[i + 1] = vi * vi;
            }
            double lhs = 0, norm = 0;
            for (int q = 0; q < panels; ++q) {
                lhs += simpson(prod, q * sub, (q + 1) * sub);
                norm += simpson(vsq, q * sub, (q + 1) * sub);
            }
            out.omega = std::min(out.omega, (norm - lhs) / norm);
        }

        // sigma * v against v' with v(0) = 0
        {
            nodes[0] = 0;
            sg.reset();
            std::vector<double> conv(steps + 1, 0.0);
            for (int i = 0; i < steps; ++i) conv[i + 1] = sg.step(v_at(i), v_at(i + 1), h);
            double lhs = 0, dv2 = 0, norm = 0;
            std::vector<double> vsq(steps + 1);
            for (int i = 0; i <= steps; ++i) vsq[i] = v_at(i) * v_at(i);
            for (int q = 0; q < panels; ++q) {
                double slope = (nodes[q + 1] - nodes[q]) / H;
                lhs += slope * simpson(conv, q * sub, (q + 1) * sub);
                dv2 += slope * slope * H;
                norm += simpson(vsq, q * sub, (q + 1) * sub);
            }
            double vT = nodes[panels];
            double rhs = dv2 / p.c + (p.d - 1) / (4 * p.b) * vT * vT;
            out.sigma = std::min(out.sigma, (rhs - lhs) / std::max(norm, dv2));
        }
    }
    return out;
}

// Shortest node spacing of the LGL grid in r divided by c.
inline double explicit_cfl_dt(const SpectralOperator& op) {
    double h = INFINITY;
    for (size_t j = 0; j + 1 < op.lgl.size(); ++j) h = std::min(h, op.lgl[j + 1] - op.lgl[j]);
    return h * 0.5 * (op.b - op.b0) / op.c;
}

struct EnergyRun {
    double e0 = 0;
    double max_ratio = 0;          // max_m E_m / E_0
    double max_step_increase = 0;  // max_m (E_{m+1} - E_m) / E_0
    double final_energy = 0;
    bool finite = true;
};

// Homogeneous problem (no forcing, G = 0) with random smooth initial data built from the first
// few basis functions, marched with the exact boundary condition.
inline EnergyRun energy_run(std::shared_ptr<const SpectralOperator> op, int n, double dt, int steps, unsigned seed,
                            std::shared_ptr<const KernelDecomposition> kernel = nullptr) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Vec a = Vec::Zero(op->N), v = Vec::Zero(op->N);
    for (int k = 0; k < std::min(6, op->N); ++k) {
        a[k] = uni(rng) / (1 + k);
        v[k] = uni(rng) / (1 + k);
    }
    // u0(b) = 0: the boundary estimate behind the energy bound starts from a zero trace
    a.head(std::min(6, op->N)).array() -= a.sum() / std::min(6, op->N);
    ModalProblem prob;
    prob.n = n;
    prob.d = op->d;
    prob.b0 = op->b0;
    prob.b = op->b;
    prob.c = op->c;
    auto raw = op;
    prob.u0 = [raw, a](double r) { return eval_basis_sum(a, to_reference(*raw, r)); };
    prob.u1 = [raw, v](double r) { return eval_basis_sum(v, to_reference(*raw, r)); };
    SolverOptions opts;
    opts.kernel = std::move(kernel);
    ModalSolver solver(prob, op, dt, opts);

    EnergyRun out;
    out.e0 = solver.energy();
    double prev = out.e0;
    out.max_ratio = 1.0;
    for (int m = 0; m < steps; ++m) {
        try {
            solver.step();
        } catch (const IntegrationError&) {
            out.finite = false;
            return out;
        }
        double e = solver.energy();
        if (!std::isfinite(e)) {
            out.finite = false;
            return out;
        }
        out.max_ratio = std::max(out.max_ratio, e / out.e0);
        out.max_step_increase = std::max(out.max_step_increase, (e - prev) / out.e0);
        prev = e;
    }
    out.final_energy = prev;
    return out;
}

}  // namespace checks
