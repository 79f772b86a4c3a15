#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "checks.hpp"
#include "nrbc/errors.hpp"
#include "nrbc/oracle.hpp"

using namespace nrbc;

namespace {

const double kPi = 3.14159265358979323846;

// (1/2pi) int_0^{2pi} G(b0 cos phi, b0 sin phi) e^{-i n phi} dphi
cplx fourier_coefficient(const DirichletData& d, int n) {
    auto trace = [&](double phi) {
        double dx = d.b0 * std::cos(phi) - d.xs, dy = d.b0 * std::sin(phi) - d.ys;
        return d.A1 * std::exp(-d.iota * (dx * dx + dy * dy));
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double re = GK::integrate([&](double p) { return trace(p) * std::cos(n * p); }, 0.0, 2 * kPi, 15, 1e-15);
    double im = GK::integrate([&](double p) { return -trace(p) * std::sin(n * p); }, 0.0, 2 * kPi, 15, 1e-15);
    return cplx(re, im) / (2 * kPi);
}

}  // namespace

TEST_CASE("sin^p expansion reproduces the power of the sine") {
    for (int p = 1; p <= 6; ++p) {
        TemporalExpansion te = sin_power_expansion(3.7, p);
        for (double t = 0; t < 3; t += 0.093) CHECK(te.eval(t) == doctest::Approx(std::pow(std::sin(3.7 * t), p)).epsilon(1e-14).scale(1));
    }
}

TEST_CASE("Fourier coefficients of the wave-maker trace") {
    DirichletData d;
    auto co = modal_coefficients(d, 48, 256);
    REQUIRE(co.size() == 97);
    CHECK(std::abs(co[48].g - fourier_coefficient(d, 0)) < 1e-12);
    for (int n : {1, 5, 17}) CHECK(std::abs(co[48 + n].g - fourier_coefficient(d, n)) < 1e-12);
    for (int n = 33; n <= 48; ++n) {
        CHECK(std::abs(co[48 + n].g) < 1e-16);
        CHECK(std::abs(co[48 - n].g) < 1e-16);
    }
    for (int n = 1; n <= 48; ++n) CHECK(std::abs(co[48 - n].g - std::conj(co[48 + n].g)) < 1e-15);

    DirichletData zero = d;
    zero.A1 = 0;
    for (const auto& c : modal_coefficients(zero, 8, 64)) CHECK(c.g == cplx(0, 0));

    CHECK_THROWS_AS(modal_coefficients(d, 32, 100), ResolutionError);
    CHECK_THROWS_AS(modal_coefficients(d, 32, 64), ResolutionError);
    CHECK_NOTHROW(modal_coefficients(d, 32, 128));
}

TEST_CASE("exterior kernel agrees with numerical Laplace inversion") {
    double b0 = 2, c = 5;
    for (int n : {0, 3, 10}) {
        ExactModalSolution sol = build_exact_mode(n, b0, c);
        for (double r : {2.5, 4.0}) {
            double beta0 = (r - b0) / c;
            for (double tau : {0.2, 1.0}) {
                double expect = checks::talbot_hn(n, b0, c, r, tau);
                double got = eval_Hn(sol, r, beta0 + tau);
                INFO("n=" << n << " r=" << r << " tau=" << tau << " expect=" << expect << " got=" << got);
                CHECK(std::abs(got - expect) <= 1e-6 * std::abs(expect));
            }
        }
    }
    ExactModalSolution sol = build_exact_mode(2, b0, c);
    CHECK_THROWS_AS(eval_Hn(sol, 2.0, 1.0), DomainError);
    CHECK_THROWS_AS(eval_Hn(sol, 1.5, 1.0), DomainError);
}

TEST_CASE("n = 0 exterior kernel decays at large time") {
    ExactModalSolution sol = build_exact_mode(0, 2, 5);
    double r = 3, beta0 = 0.2, prev = INFINITY;
    for (double tau : {2.0, 4.0, 8.0, 16.0, 32.0}) {
        double h = eval_Hn(sol, r, beta0 + tau);
        CHECK(std::abs(h) < prev);
        prev = std::abs(h);
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("exact mode: causality, boundary recovery and derivatives") {
    DirichletData d;
    d.omega = 10 * kPi;
    auto co = modal_coefficients(d, 8, 256);
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> ur(2.05, 4.5), ut(0.0, 1.0);
    for (int n : {0, 2, 7}) {
        ExactModalSolution sol = build_exact_mode(n, d.b0, 5);
        const ModalBoundaryCoefficient& cf = co[8 + n];

        for (double r : {2.5, 3.0, 4.5}) {
            double beta0 = (r - d.b0) / 5;
            for (double f : {0.0, 0.3, 0.999}) {
                ModeField m = eval_exact_mode(sol, cf, r, f * beta0);
                CHECK(m.value == cplx(0, 0));
                CHECK(m.dr == cplx(0, 0));
                CHECK(m.dt == cplx(0, 0));
            }
        }

        double gmax = std::abs(cf.g);
        for (double t = 0; t <= 5; t += 0.0731)
            CHECK(std::abs(eval_exact_mode(sol, cf, d.b0, t).value - cf.eval(t)) < 1e-8 * gmax);

        const double h = 1e-5;
        for (int i = 0; i < 50; ++i) {
            double r = ur(rng);
            double t = (r - d.b0) / 5 + 0.02 + ut(rng);
            ModeField m = eval_exact_mode(sol, cf, r, t);
            cplx fdt = (eval_exact_mode(sol, cf, r, t + h).value - eval_exact_mode(sol, cf, r, t - h).value) / (2 * h);
            cplx fdr = (eval_exact_mode(sol, cf, r + h, t).value - eval_exact_mode(sol, cf, r - h, t).value) / (2 * h);
            double scale = gmax * 10 * kPi;
            INFO("n=" << n << " r=" << r << " t=" << t);
            CHECK(std::abs(m.dt - fdt) < 1e-6 * std::max(std::abs(m.dt), 1e-3 * scale));
            CHECK(std::abs(m.dr - fdr) < 1e-6 * std::max(std::abs(m.dr), 1e-3 * scale));
        }
    }
    ExactModalSolution sol = build_exact_mode(1, d.b0, 5);
    CHECK_THROWS_AS(eval_exact_mode(sol, co[9], 1.9, 1.0), DomainError);
}

TEST_CASE("boundary residuals of the exact solution") {
    double c = 5;
    DirichletData d;
    d.omega = 10 * kPi;
    d.p = 2;
    const int M = 32;
    auto check = [&](double b, double t, double gate) {
        auto co = modal_coefficients(d, M, 256);
        std::vector<double> per;
        for (int n = 0; n <= M; ++n) {
            ExactModalSolution sol = build_exact_mode(n, d.b0, c);
            KernelParams kp;
            kp.n = n;
            kp.b = b;
            kp.c = c;
            KernelDecomposition k = build_kernel(kp);
            RadialTerms rt = radial_terms(sol, b);
            per.push_back(boundary_residual(sol, rt, k, co[M + n], t));
            if (n > 0) per.push_back(boundary_residual(sol, rt, k, co[M - n], t));
        }
        ResidualMetrics m = residual_metrics(per);
        INFO("b=" << b << " t=" << t << " E1=" << m.max_error << " E2=" << m.sum_error);
        CHECK(m.sum_error <= gate);
        CHECK(m.max_error <= m.sum_error);
    };
    check(2.75, 1.0, 1e-10);
    check(2.22, 10.0, 1e-9);

    ModalBoundaryCoefficient zero;
    zero.g = 0;
    zero.temporal = sin_power_expansion(d.omega, 2);
    ExactModalSolution sol = build_exact_mode(3, d.b0, c);
    KernelParams kp;
    kp.n = 3;
    kp.b = 2.5;
    kp.c = c;
    KernelDecomposition k = build_kernel(kp);
    RadialTerms rt = radial_terms(sol, 2.5);
    for (double t : {0.0, 0.5, 3.0}) CHECK(boundary_residual(sol, rt, k, zero, t) == 0.0);
}

TEST_CASE("residual metrics") {
    ResidualMetrics z = residual_metrics({0, 0, 0});
    CHECK(z.max_error == 0);
    CHECK(z.sum_error == 0);
    ResidualMetrics m = residual_metrics({1e-16, 3e-16, 2e-16});
    CHECK(m.max_error == 3e-16);
    CHECK(m.sum_error == doctest::Approx(6e-16));
}

TEST_CASE("exponential divided difference") {
    cplx a(-1, 2), b(-0.5, -3);
    for (double T : {0.1, 1.0, 7.0}) {
        cplx naive = (std::exp(a * T) - std::exp(b * T)) / (a - b);
        CHECK(std::abs(exp_divided_difference(a, b, T) - naive) < 1e-14 * std::abs(naive) + 1e-300);
    }
    cplx x(-0.3, 4);
    for (double eps : {1e-6, 1e-10, 0.0}) {
        // T e^{xT} (1 + eT/2 + (eT)^2/6 + ...) with T = 2
        cplx got = exp_divided_difference(x, x + eps, 2.0);
        cplx want = 2.0 * std::exp(x * 2.0) * (1 + eps + 2 * eps * eps / 3);
        CHECK(std::abs(got - want) < 1e-13);
    }
    CHECK(exp_divided_difference(a, b, 0.0) == cplx(0, 0));
}
