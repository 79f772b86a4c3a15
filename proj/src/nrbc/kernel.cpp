#include "nrbc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "nrbc/errors.hpp"
#include "nrbc/quadrature.hpp"

namespace nrbc {

namespace {
constexpr double kPi = std::numbers::pi;
}

double log_W(int n, double r) {
    if (n < 0) throw DomainError("W_n: order must be non-negative");
    if (!(r > 0) || !std::isfinite(r)) throw DomainError("W_n: argument must be positive and finite");
    LogBesselIK v = log_bessel_ik(n, r);
    double a = 2.0 * v.log_k, b = 2.0 * (v.log_i + std::log(kPi));
    double m = std::max(a, b);
    return -(m + std::log1p(std::exp(-std::abs(a - b))));
}

double eval_W(int n, double r) { return std::exp(log_W(n, r)); }

double theta(double kappa) {
    if (!(kappa > 0)) throw DomainError("theta: argument must be positive");
    double s = std::sqrt(1.0 + kappa * kappa);
    return s + std::log(kappa / (1.0 + s));
}

double eval_W_asymptotic(int n, double r) {
    if (n < 1) throw DomainError("W_n asymptotic form needs n >= 1");
    if (!(r > 0)) throw DomainError("W_n asymptotic form needs r > 0");
    double k = r / n, s = std::sqrt(1.0 + k * k);
    double x = 2.0 * n * std::abs(theta(k));
    // sech(x) = 2 e^{-x} / (1 + e^{-2x})
    double sech = 2.0 * std::exp(-x) / (1.0 + std::exp(-2.0 * x));
    return n * s * sech / kPi;
}

BranchCutRule build_branch_cut_rule(int n, const QuadratureConfig& cfg) {
    if (n < 0) throw DomainError("branch-cut rule: order must be non-negative");
    if (cfg.panels < 2 || cfg.nodes_per_panel < 2 || !(cfg.tail_length > 0) || !(cfg.small_order_length > 0))
        throw ConfigError("branch-cut rule: invalid quadrature configuration");
    std::vector<double> brk;
    if (n == 0) {
        brk.push_back(0.0);
        for (int k = cfg.log_decades; k >= 1; --k) brk.push_back(std::pow(10.0, -k));
        double R = cfg.small_order_length, x = 1.0;
        while (x < R) {
            brk.push_back(x);
            x *= 2.0;
        }
        brk.push_back(R);
    } else {
        double peak = n * kEyeRealRoot;
        double R = n >= cfg.small_order ? peak + cfg.tail_length : cfg.small_order_length;
        int nl = cfg.panels / 2, nr = cfg.panels - nl;
        // widths h0, 2 h0, 4 h0, ... moving away from the peak
        auto widths = [](double len, int m) {
            std::vector<double> w(m);
            double h0 = len / (std::pow(2.0, m) - 1.0);
            for (int i = 0; i < m; ++i) w[i] = h0 * std::pow(2.0, i);
            return w;
        };
        std::vector<double> wl = widths(peak, nl), wr = widths(R - peak, nr);
        brk.push_back(0.0);
        double x = 0.0;
        for (int i = nl - 1; i >= 0; --i) {
            x += wl[i];
            brk.push_back(i == 0 ? peak : x);
        }
        x = peak;
        for (int i = 0; i < nr; ++i) {
            x += wr[i];
            brk.push_back(i == nr - 1 ? R : x);
        }
    }
    BranchCutRule rule;
    rule.n = n;
    rule.r_max = brk.back();
    const QuadRule& g = gauss_legendre(cfg.nodes_per_panel);
    for (size_t p = 0; p + 1 < brk.size(); ++p) {
        double a = brk[p], b = brk[p + 1], h = 0.5 * (b - a), m = 0.5 * (a + b);
        for (int i = 0; i < cfg.nodes_per_panel; ++i) {
            double r = m + h * g.x[i];
            rule.r.push_back(r);
            rule.w.push_back(h * g.w[i]);
            rule.W.push_back(eval_W(n, r));
        }
    }
    return rule;
}

namespace {

void fill_terms(KernelDecomposition& k, const BranchCutRule& rule) {
    const KernelParams& p = k.params;
    double s = p.c / (p.b * p.b);
    k.pole_coeff.clear();
    k.pole_rate.clear();
    for (const cplx& z : k.zeros.zeros) {
        k.pole_coeff.push_back(s * z);
        k.pole_rate.push_back(p.c * z / p.b);
    }
    k.node_coeff.clear();
    k.node_rate.clear();
    if (p.d == 2) {
        double sg = (p.n % 2 == 0) ? 1.0 : -1.0;
        for (size_t i = 0; i < rule.r.size(); ++i) {
            k.node_coeff.push_back(sg * s * rule.w[i] * rule.W[i]);
            k.node_rate.push_back(-p.c * rule.r[i] / p.b);
        }
    }
}

double sum_sigma(const KernelDecomposition& k, double t) {
    cplx ps = 0.0;
    for (size_t j = 0; j < k.pole_coeff.size(); ++j) ps += k.pole_coeff[j] * std::exp(k.pole_rate[j] * t);
    double ns = 0.0;
    for (size_t i = 0; i < k.node_coeff.size(); ++i) ns += k.node_coeff[i] * std::exp(k.node_rate[i] * t);
    return ps.real() + ns;
}

}  // namespace

KernelDecomposition build_kernel(const KernelParams& p) {
    if (p.d != 2 && p.d != 3) throw DomainError("build_kernel: dimension must be 2 or 3");
    if (p.n < 0) throw DomainError("build_kernel: mode index must be non-negative");
    if (!(p.b > 0) || !(p.c > 0) || !std::isfinite(p.b) || !std::isfinite(p.c))
        throw DomainError("build_kernel: radius and wave speed must be positive");
    KernelDecomposition k;
    k.params = p;
    BesselOrder order{p.d == 2 ? OrderKind::Integer : OrderKind::HalfInteger, p.n};
    k.zeros = find_zeros(order, p.zero_tol);
    if (p.d == 2) k.rule = build_branch_cut_rule(p.n, p.quad);
    fill_terms(k, k.rule);
    if (p.d == 2 && p.quad.verify) {
        QuadratureConfig fine = p.quad;
        fine.nodes_per_panel *= 2;
        KernelDecomposition kf = k;
        fill_terms(kf, build_branch_cut_rule(p.n, fine));
        double tmax = 0.0;
        for (double t : {0.0, 0.1 * p.b / p.c, p.b / p.c, 4.0 * p.b / p.c}) {
            double a = sum_sigma(k, t), b = sum_sigma(kf, t);
            double scale = std::max(1.0, std::abs(b)) * p.c / (p.b * p.b);
            tmax = std::max(tmax, std::abs(a - b) / scale);
        }
        if (tmax > p.quad.verify_tol)
            throw IntegrationError("build_kernel: branch-cut quadrature for n = " + std::to_string(p.n) +
                                   " changed by " + std::to_string(tmax) + " under node doubling");
    }
    return k;
}

double eval_sigma(const KernelDecomposition& k, double t) {
    if (!(t >= 0) || !std::isfinite(t)) throw DomainError("eval_sigma: time must be non-negative");
    return sum_sigma(k, t);
}

double eval_omega(const KernelDecomposition& k, double t) {
    if (!(t >= 0) || !std::isfinite(t)) throw DomainError("eval_omega: time must be non-negative");
    const KernelParams& p = k.params;
    double cb = p.c / p.b;
    cplx ps = 0.0;
    for (const cplx& z : k.zeros.zeros) {
        cplx x = cb * t * z;
        // e^x - 1 without cancellation for small x
        cplx em1 = std::abs(x) < 1e-5 ? x * (1.0 + 0.5 * x) : std::exp(x) - 1.0;
        ps += em1;
    }
    double ns = 0.0;
    if (p.d == 2) {
        double sg = (p.n % 2 == 0) ? 1.0 : -1.0;
        for (size_t i = 0; i < k.rule.r.size(); ++i) {
            double r = k.rule.r[i];
            ns += sg * k.rule.w[i] * k.rule.W[i] / r * (-std::expm1(-cb * t * r));
        }
    }
    return -(p.d - 1) * p.c / (2.0 * p.b) + cb * (ps.real() + ns);
}

void write_kernel_csv(const KernelDecomposition& k, const std::vector<double>& times, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw IoError("write_kernel_csv: cannot open " + path);
    const KernelParams& p = k.params;
    f << "# d=" << p.d << " n=" << p.n << " b=" << p.b << " c=" << p.c << "\n";
    f << "kind,j,x_re,x_im,weight,W,coeff_re,coeff_im,rate_re,rate_im,sigma,omega\n";
    char buf[512];
    auto row = [&](const char* kind, size_t j, double xr, double xi, double w, double W, cplx coeff, cplx rate,
                   double sg, double om) {
        std::snprintf(buf, sizeof buf, "%s,%zu,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e,%.16e\n", kind,
                      j, xr, xi, w, W, coeff.real(), coeff.imag(), rate.real(), rate.imag(), sg, om);
        f << buf;
    };
    const double nan = std::nan("");
    for (size_t j = 0; j < k.pole_rate.size(); ++j)
        row("pole", j, k.zeros.zeros[j].real(), k.zeros.zeros[j].imag(), nan, nan, k.pole_coeff[j], k.pole_rate[j],
            nan, nan);
    for (size_t i = 0; i < k.node_rate.size(); ++i)
        row("node", i, k.rule.r[i], 0.0, k.rule.w[i], k.rule.W[i], k.node_coeff[i], k.node_rate[i], nan, nan);
    for (size_t i = 0; i < times.size(); ++i)
        row("value", i, times[i], 0.0, nan, nan, nan, nan, eval_sigma(k, times[i]), eval_omega(k, times[i]));
    if (!f) throw IoError("write_kernel_csv: write failed for " + path);
}

}  // namespace nrbc
