#include "nrbc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nrbc/errors.hpp"
#include "nrbc/extended.hpp"

namespace nrbc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// (e^x - 1) / x
cplx expm1_ratio(cplx x) {
    if (std::abs(x) < 0.1) {
        cplx term = 1.0, sum = 1.0;
        for (int k = 1; k < 16; ++k) {
            term *= x / double(k + 1);
            sum += term;
        }
        return sum;
    }
    return (std::exp(x) - 1.0) / x;
}

}  // namespace

cplx exp_divided_difference(cplx a, cplx b, double T) {
    if (T == 0.0) return 0.0;
    if (a.real() < b.real()) std::swap(a, b);
    return std::exp(a * T) * T * expm1_ratio((b - a) * T);
}

double TemporalExpansion::eval(double t) const {
    cplx s = 0.0;
    for (size_t k = 0; k < amp.size(); ++k) s += amp[k] * std::exp(kI * (freq[k] * t));
    return s.real();
}

TemporalExpansion sin_power_expansion(double omega, int p) {
    if (p < 1) throw DomainError("sin_power_expansion: exponent must be at least 1");
    TemporalExpansion e;
    // (2i)^{-p}
    cplx pre = std::pow(cplx(0.0, 2.0), -p);
    double binom = 1.0;
    for (int k = 0; k <= p; ++k) {
        double sg = (k % 2 == 0) ? 1.0 : -1.0;
        e.amp.push_back(pre * sg * binom);
        e.freq.push_back((p - 2.0 * k) * omega);
        binom = binom * (p - k) / (k + 1.0);
    }
    return e;
}

namespace {

// Accumulated in extended precision so the coefficients stay accurate far below double rounding.
std::vector<cplx> trace_dft(const DirichletData& d, int M, int L) {
    using ext::real;
    const real two_pi = 2 * ext::pi;
    std::vector<real> g(L), cs(L), sn(L);
    for (int j = 0; j < L; ++j) {
        real phi = two_pi * real(j) / real(L);
        cs[j] = ext::cos(phi);
        sn[j] = ext::sin(phi);
        real dx = real(d.b0) * cs[j] - real(d.xs), dy = real(d.b0) * sn[j] - real(d.ys);
        g[j] = real(d.A1) * ext::exp(-real(d.iota) * (dx * dx + dy * dy));
    }
    std::vector<cplx> out(2 * M + 1);
    for (int n = -M; n <= M; ++n) {
        real sr = 0, si = 0;
        for (int j = 0; j < L; ++j) {
            long long m = (((long long)n * j) % L + L) % L;
            sr += g[j] * cs[m];
            si -= g[j] * sn[m];
        }
        out[n + M] = cplx(double(sr / real(L)), double(si / real(L)));
    }
    return out;
}

}  // namespace

std::vector<ModalBoundaryCoefficient> modal_coefficients(const DirichletData& data, int M, int grid_size) {
    if (M < 0) throw DomainError("modal_coefficients: M must be non-negative");
    if (!(data.b0 > 0)) throw DomainError("modal_coefficients: b0 must be positive");
    if (data.p < 1) throw DomainError("modal_coefficients: exponent p must be at least 1");
    if (grid_size < 4 * M || grid_size < 4 || (grid_size & (grid_size - 1)) != 0)
        throw ResolutionError("modal_coefficients: grid size must be a power of two and at least 4M");
    std::vector<cplx> g = trace_dft(data, M, grid_size);
    std::vector<cplx> g2 = trace_dft(data, M, 2 * grid_size);
    double diff = 0.0;
    for (size_t i = 0; i < g.size(); ++i) diff = std::max(diff, std::abs(g[i] - g2[i]));
    double scale = std::max(1.0, std::abs(data.A1));
    if (diff > 1e-14 * scale)
        throw ResolutionError("modal_coefficients: grid of " + std::to_string(grid_size) +
                              " points does not resolve the boundary trace");
    TemporalExpansion te = sin_power_expansion(data.omega, data.p);
    std::vector<ModalBoundaryCoefficient> out;
    for (int n = -M; n <= M; ++n) {
        ModalBoundaryCoefficient c;
        c.n = n;
        c.g = g2[n + M];
        c.temporal = te;
        out.push_back(c);
    }
    return out;
}

ExactModalSolution build_exact_mode(int n, double b0, double c, const QuadratureConfig& quad) {
    if (!(b0 > 0) || !(c > 0)) throw DomainError("build_exact_mode: b0 and c must be positive");
    n = std::abs(n);
    ExactModalSolution s;
    s.n = n;
    s.b0 = b0;
    s.c = c;
    s.zeros = find_zeros({OrderKind::Integer, n}).zeros;
    for (const cplx& z : s.zeros) {
        // K_n'(z_j) = -K_{n+1}(z_j) at a zero of K_n
        ScaledK v = bessel_k_complex(n, z);
        s.k_next_at_zero.push_back(-v.dk);
    }
    s.rule = build_branch_cut_rule(n, quad);
    return s;
}

namespace {

struct NodeTerm {
    double amp = 0, damp = 0, rate = 0;
};

// Branch-cut node contribution at radius r for the kernel shifted by beta0.
NodeTerm node_term(const ExactModalSolution& s, size_t i, double r) {
    const int n = s.n;
    const double rho = s.rule.r[i], x1 = r * rho / s.b0;
    LogBesselIK a = log_bessel_ik(n, x1), b = log_bessel_ik(n, rho);
    double sg = (n % 2 == 0) ? 1.0 : -1.0;
    double E = log_W(n, rho) - (r - s.b0) * rho / s.b0;
    double L1 = a.log_i + b.log_k, L2 = a.log_k + b.log_i;
    double frac = -std::expm1(L2 - L1);
    double pre = sg * (s.c / s.b0) * s.rule.w[i];
    NodeTerm t;
    t.amp = pre * frac * std::exp(L1 + E);
    double t1 = std::exp(a.log_i1 + b.log_k + E);
    double t2 = std::exp(a.log_k1 + b.log_i + E);
    double t3 = (n / x1 - 1.0) * frac * std::exp(L1 + E);
    t.damp = pre * (rho / s.b0) * (t1 + t2 + t3);
    t.rate = -s.c * rho / s.b0;
    return t;
}

}  // namespace

RadialTerms radial_terms(const ExactModalSolution& s, double r) {
    if (!(r >= s.b0) || !std::isfinite(r)) throw DomainError("radial_terms: radius must be at least b0");
    RadialTerms rt;
    rt.r = r;
    rt.beta0 = (r - s.b0) / s.c;
    rt.direct = std::sqrt(s.b0 / r);
    rt.ddirect = -0.5 * rt.direct / r;
    const double cb = s.c / s.b0;
    for (size_t j = 0; j < s.zeros.size(); ++j) {
        cplx z = s.zeros[j];
        ScaledK v = bessel_k_complex(s.n, r * z / s.b0);
        cplx den = s.k_next_at_zero[j];
        rt.amp.push_back(-cb * v.k / den);
        rt.damp.push_back(-cb * (z / s.b0) * (v.dk + v.k) / den);
        rt.rate.push_back(cb * z);
    }
    for (size_t i = 0; i < s.rule.r.size(); ++i) {
        NodeTerm t = node_term(s, i, r);
        rt.amp.push_back(t.amp);
        rt.damp.push_back(t.damp);
        rt.rate.push_back(t.rate);
    }
    return rt;
}

double eval_Hn(const ExactModalSolution& s, double r, double t) {
    if (!(r > s.b0)) throw DomainError("eval_Hn: radius must exceed b0");
    if (!(t >= 0)) throw DomainError("eval_Hn: time must be non-negative");
    RadialTerms rt = radial_terms(s, r);
    cplx sum = 0.0;
    double tau = t - rt.beta0;
    for (size_t q = 0; q < rt.amp.size(); ++q) sum += rt.amp[q] * std::exp(rt.rate[q] * tau);
    return sum.real();
}

ModeField eval_exact_mode(const RadialTerms& rt, double c, const ModalBoundaryCoefficient& coeff, double t) {
    ModeField f;
    double T = t - rt.beta0;
    if (T < 0) return f;
    const TemporalExpansion& te = coeff.temporal;
    cplx u = 0.0, ut = 0.0, ur = 0.0;
    for (size_t k = 0; k < te.amp.size(); ++k) {
        cplx im = kI * te.freq[k];
        cplx em = std::exp(im * T);
        cplx su = rt.direct * em, sut = rt.direct * im * em, sur = rt.ddirect * em;
        for (size_t q = 0; q < rt.amp.size(); ++q) {
            cplx phi = exp_divided_difference(im, rt.rate[q], T);
            su += rt.amp[q] * phi;
            sut += rt.amp[q] * (em + rt.rate[q] * phi);
            sur += rt.damp[q] * phi;
        }
        u += te.amp[k] * su;
        ut += te.amp[k] * sut;
        ur += te.amp[k] * sur;
    }
    f.value = coeff.g * u;
    f.dt = coeff.g * ut;
    // the front position depends on r: d/dr at fixed t picks up -(1/c) d/dT
    f.dr = coeff.g * (ur - ut / c);
    return f;
}

ModeField eval_exact_mode(const ExactModalSolution& s, const ModalBoundaryCoefficient& coeff, double r, double t) {
    if (!(r >= s.b0)) throw DomainError("eval_exact_mode: radius must be at least b0");
    return eval_exact_mode(radial_terms(s, r), s.c, coeff, t);
}

double boundary_residual(const ExactModalSolution& s, const RadialTerms& at_b, const KernelDecomposition& sigma,
                         const ModalBoundaryCoefficient& coeff, double t) {
    if (!(at_b.r > s.b0)) throw DomainError("boundary_residual: boundary radius must exceed b0");
    if (!(t >= 0)) throw DomainError("boundary_residual: time must be non-negative");
    if (coeff.g == cplx(0.0, 0.0)) return 0.0;
    const double T = t - at_b.beta0;
    if (T < 0) return 0.0;
    const TemporalExpansion& te = coeff.temporal;
    const double b = at_b.r;
    // U(b, beta0 + u) = sum_k C_k e^{i mu_k u} + sum_q D_q e^{rate_q u}
    std::vector<cplx> rates, weights;
    for (size_t k = 0; k < te.amp.size(); ++k) {
        cplx im = kI * te.freq[k];
        cplx ck = at_b.direct;
        for (size_t q = 0; q < at_b.amp.size(); ++q) ck += at_b.amp[q] / (im - at_b.rate[q]);
        rates.push_back(im);
        weights.push_back(te.amp[k] * ck);
    }
    for (size_t q = 0; q < at_b.amp.size(); ++q) {
        cplx dq = 0.0;
        for (size_t k = 0; k < te.amp.size(); ++k) dq -= te.amp[k] / (kI * te.freq[k] - at_b.rate[q]);
        rates.push_back(at_b.rate[q]);
        weights.push_back(at_b.amp[q] * dq);
    }
    // sigma * U(b, .) at time T
    cplx conv = 0.0;
    for (size_t p = 0; p < sigma.pole_coeff.size(); ++p) {
        cplx acc = 0.0;
        for (size_t m = 0; m < rates.size(); ++m)
            acc += weights[m] * exp_divided_difference(sigma.pole_rate[p], rates[m], T);
        conv += sigma.pole_coeff[p] * acc;
    }
    for (size_t p = 0; p < sigma.node_coeff.size(); ++p) {
        cplx acc = 0.0;
        for (size_t m = 0; m < rates.size(); ++m)
            acc += weights[m] * exp_divided_difference(sigma.node_rate[p], rates[m], T);
        conv += sigma.node_coeff[p] * acc;
    }
    ModalBoundaryCoefficient unit = coeff;
    unit.g = 1.0;
    ModeField f = eval_exact_mode(at_b, s.c, unit, t);
    cplx lhs = f.dt / s.c + f.dr + f.value / (2.0 * b);
    return std::abs(coeff.g * (lhs - conv));
}

ResidualMetrics residual_metrics(const std::vector<double>& per_mode) {
    ResidualMetrics m;
    for (double e : per_mode) {
        m.max_error = std::max(m.max_error, e);
        m.sum_error += e;
    }
    return m;
}

}  // namespace nrbc
