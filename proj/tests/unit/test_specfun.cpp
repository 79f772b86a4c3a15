#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mp_bessel.hpp"
#include "nrbc/errors.hpp"
#include "nrbc/specfun.hpp"

using namespace nrbc;
namespace mo = mp_oracle;

namespace {

const double kPi = 3.14159265358979323846;

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

double mp_log_i(double nu, double x) { return double(log(mo::bessel_i(mo::mpf(nu), mo::mpf(x)))); }

// exp(z) K_n(z) and exp(z) K_n'(z) from the oracle
void mp_k(int n, cplx z, cplx& k, cplx& dk) {
    mo::mpc zz = mo::to_mp(z);
    mo::mpc k0 = mo::bessel_k_scaled(n, zz), k1 = mo::bessel_k_scaled(n + 1, zz);
    k = mo::to_double(k0);
    dk = mo::to_double(mo::mpf(n) / zz * k0 - k1);
}

int expected_count(BesselOrder o) {
    if (o.kind == OrderKind::HalfInteger) return o.n;
    return 2 * int(std::lround((o.n - 0.5) / 2.0));
}

}  // namespace

TEST_CASE("log_bessel_i near the origin and for large arguments") {
    CHECK(std::abs(log_bessel_i(0, 1e-10)) < 1e-15);
    double r = 100;
    double lead = r - 0.5 * std::log(2 * kPi * r);
    // I_0(r) = e^r / sqrt(2 pi r) (1 + 1/(8r) + ...)
    CHECK(log_bessel_i(0, r) - lead == doctest::Approx(std::log1p(1 / (8 * r) + 9 / (128 * r * r))).epsilon(1e-4));
    CHECK_THROWS_AS(log_bessel_i(0, 0.0), DomainError);
    CHECK_THROWS_AS(log_bessel_i(1, -2.0), DomainError);
}

TEST_CASE("log_bessel_i matches the multiprecision series") {
    CHECK(std::abs(log_bessel_i(7, 3.5) - mp_log_i(7, 3.5)) < 1e-12);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unu(0, 100), ur(0.01, 300);
    for (int i = 0; i < 40; ++i) {
        double nu = unu(rng), x = ur(rng);
        if (i % 3 == 0) nu = std::floor(nu);
        if (i % 3 == 1) nu = std::floor(nu) + 0.5;
        INFO("nu=" << nu << " x=" << x);
        CHECK(std::abs(log_bessel_i(nu, x) - mp_log_i(nu, x)) < 1e-12 * std::max(1.0, std::abs(mp_log_i(nu, x))));
    }
}

TEST_CASE("log_bessel_k closed form, Wronskian and uniform asymptotics") {
    CHECK(log_bessel_k(0.5, 1.0) == doctest::Approx(std::log(std::sqrt(kPi / 2) * std::exp(-1.0))).epsilon(1e-14));
    double w = std::exp(log_bessel_i(3, 2) + log_bessel_k(4, 2)) + std::exp(log_bessel_i(4, 2) + log_bessel_k(3, 2));
    CHECK(w == doctest::Approx(0.5).epsilon(1e-13));

    // K_nu(nu z) ~ sqrt(pi / (2 nu)) e^{-nu eta} / (1 + z^2)^{1/4}
    double nu = 40, z = 0.5, s = std::sqrt(1 + z * z);
    double eta = s + std::log(z / (1 + s));
    double approx = 0.5 * std::log(kPi / (2 * nu)) - nu * eta - 0.25 * std::log(1 + z * z);
    CHECK(std::abs(std::expm1(log_bessel_k(nu, nu * z) - approx)) < 1e-3);
    CHECK_THROWS_AS(log_bessel_k(1, 0.0), DomainError);
}

TEST_CASE("Wronskian holds for random integer orders") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> un(0, 20);
    std::uniform_real_distribution<double> ur(0.1, 50);
    for (int i = 0; i < 200; ++i) {
        int n = un(rng);
        double r = ur(rng);
        LogBesselIK a = log_bessel_ik(n, r);
        double lhs = std::exp(a.log_i + a.log_k1 + std::log(r)) + std::exp(a.log_i1 + a.log_k + std::log(r));
        INFO("n=" << n << " r=" << r);
        CHECK(std::abs(lhs - 1) < 1e-11);
    }
}

TEST_CASE("log_bessel_k matches the multiprecision oracle") {
    for (int n : {0, 1, 4, 12, 30}) {
        for (double x : {0.05, 0.7, 3.0, 17.0, 60.0}) {
            mo::mpc k = mo::bessel_k_scaled(n, mo::mpc(x));
            double expect = double(log(k.real())) - x;
            INFO("n=" << n << " x=" << x);
            CHECK(std::abs(log_bessel_k(n, x) - expect) < 1e-12 * std::max(1.0, std::abs(expect)));
        }
    }
}

TEST_CASE("bessel_k_complex on the real axis, under conjugation and against the oracle") {
    ScaledK k = bessel_k_complex(0, cplx(1, 0));
    CHECK(rel(k.k, std::exp(1.0 + log_bessel_k(0, 1.0))) < 1e-12);

    for (int n : {0, 3, 17}) {
        cplx z(-2.5, 1.7);
        ScaledK a = bessel_k_complex(n, z), b = bessel_k_complex(n, std::conj(z));
        CHECK(rel(b.k, std::conj(a.k)) < 1e-15);
        CHECK(rel(b.dk, std::conj(a.dk)) < 1e-15);
    }

    cplx ok, odk;
    mp_k(5, cplx(-2, 3), ok, odk);
    ScaledK v = bessel_k_complex(5, cplx(-2, 3));
    CHECK(rel(v.k, ok) < 1e-10);
    CHECK(rel(v.dk, odk) < 1e-10);

    CHECK_THROWS_AS(bessel_k_complex(2, cplx(0, 0)), DomainError);
}

TEST_CASE("bessel_k_complex is accurate in the annulus that holds the zeros") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> urad(0.3, 1.5), uarg(-3.1, 3.1);
    for (int n : {2, 10, 24, 40, 64}) {
        for (int i = 0; i < 12; ++i) {
            cplx z = std::polar(urad(rng) * n, uarg(rng));
            cplx ok, odk;
            mp_k(n, z, ok, odk);
            ScaledK v = bessel_k_complex(n, z);
            INFO("n=" << n << " z=" << z);
            CHECK(rel(v.k, ok) < 1e-10);
            CHECK(rel(v.dk, odk) < 1e-10);
        }
    }
}

TEST_CASE("bessel_k_half finite sum") {
    cplx z(0.7, -1.3);
    ScaledK h = bessel_k_half(0, z);
    CHECK(rel(h.k, std::sqrt(kPi / (2.0 * z))) < 1e-15);
    CHECK(std::abs(bessel_k_half(1, cplx(-1, 0)).k) < 1e-15);

    cplx w(2, -1);
    mo::mpc ww = mo::to_mp(w);
    cplx expect = mo::to_double(mo::bessel_k_half_scaled(3, ww));
    CHECK(rel(bessel_k_half(3, w).k, expect) < 1e-12);
    cplx dexpect = mo::to_double(mo::mpf(3.5) / ww * mo::bessel_k_half_scaled(3, ww) - mo::bessel_k_half_scaled(4, ww));
    CHECK(rel(bessel_k_half(3, w).dk, dexpect) < 1e-12);
    CHECK_THROWS_AS(bessel_k_half(2, cplx(0, 0)), DomainError);
}

TEST_CASE("zero counts") {
    CHECK(zero_count({OrderKind::Integer, 5}) == 4);
    CHECK(zero_count({OrderKind::Integer, 0}) == 0);
    CHECK(zero_count({OrderKind::Integer, 1}) == 0);
    CHECK(zero_count({OrderKind::HalfInteger, 7}) == 7);
    for (int n = 0; n <= 64; ++n) {
        for (OrderKind kind : {OrderKind::Integer, OrderKind::HalfInteger}) {
            BesselOrder o{kind, n};
            CHECK(zero_count(o) == expected_count(o));
        }
    }
}

TEST_CASE("closed-form half-order zeros") {
    ZeroSet z1 = find_zeros({OrderKind::HalfInteger, 1});
    REQUIRE(z1.zeros.size() == 1);
    CHECK(std::abs(z1.zeros[0] - cplx(-1, 0)) < 1e-12);

    ZeroSet z2 = find_zeros({OrderKind::HalfInteger, 2});
    REQUIRE(z2.zeros.size() == 2);
    std::vector<cplx> want = {cplx(-1.5, std::sqrt(3.0) / 2), cplx(-1.5, -std::sqrt(3.0) / 2)};
    for (const cplx& w : want) {
        double best = INFINITY;
        for (const cplx& z : z2.zeros) best = std::min(best, std::abs(z - w));
        CHECK(best < 1e-12);
    }
}

TEST_CASE("zero sets satisfy count, sign, closure and residual invariants") {
    std::vector<int> orders;
    for (int n = 0; n <= 20; ++n) orders.push_back(n);
    for (int n : {31, 47, 64}) orders.push_back(n);
    for (int n : orders) {
        for (OrderKind kind : {OrderKind::Integer, OrderKind::HalfInteger}) {
            BesselOrder o{kind, n};
            ZeroSet zs = find_zeros(o, 1e-12);
            INFO("n=" << n << " half=" << (kind == OrderKind::HalfInteger));
            CHECK(int(zs.zeros.size()) == expected_count(o));
            std::vector<cplx> up, down;
            for (size_t j = 0; j < zs.zeros.size(); ++j) {
                const cplx& z = zs.zeros[j];
                CHECK(z.real() < 0);
                CHECK(zs.residual[j] < 1e-12);
                if (z.imag() > 0) up.push_back(z);
                if (z.imag() < 0) down.push_back(std::conj(z));
            }
            auto key = [](const cplx& a, const cplx& b) { return a.imag() < b.imag(); };
            std::sort(up.begin(), up.end(), key);
            std::sort(down.begin(), down.end(), key);
            REQUIRE(up.size() == down.size());
            for (size_t j = 0; j < up.size(); ++j) CHECK(up[j] == down[j]);
        }
    }
}

TEST_CASE("zeros are zeros of the multiprecision K") {
    for (int n : {3, 8, 15, 20}) {
        ZeroSet zs = find_zeros({OrderKind::Integer, n});
        for (const cplx& z : zs.zeros) {
            cplx k, dk;
            mp_k(n, z, k, dk);
            INFO("n=" << n << " z=" << z);
            CHECK(std::abs(k) / std::abs(dk) < 1e-12);
        }
    }
}

TEST_CASE("zeros of K_30 lie on the eye-shaped curve") {
    ZeroSet zs = find_zeros({OrderKind::Integer, 30});
    double left = 0;
    for (const cplx& z : zs.zeros) left = std::min(left, z.real());
    CHECK(std::abs(left / (-30 * kEyeRealRoot) - 1) < 0.05);
    for (const cplx& z : zs.zeros) {
        // leading-order boundary: Re theta(z / n) is close to zero
        CHECK(std::abs(theta_function(z / 30.0).real()) < 0.05);
    }
}
