#pragma once

// Arbitrary-precision modified Bessel functions, used only as test oracles.
// Ascending series near the origin, Hankel's expansion far from it.

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <complex>

namespace mp_oracle {

namespace bmp = boost::multiprecision;
using mpf = bmp::number<bmp::cpp_bin_float<100>, bmp::et_off>;
using mpc = bmp::number<bmp::complex_adaptor<bmp::cpp_bin_float<100>>, bmp::et_off>;

inline mpc to_mp(std::complex<double> z) { return mpc(mpf(z.real()), mpf(z.imag())); }
inline std::complex<double> to_double(const mpc& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

// I_nu(x), x > 0
inline mpf bessel_i(const mpf& nu, const mpf& x) {
    mpf h = x / 2, q = h * h;
    mpf term = pow(h, nu) / boost::math::tgamma(nu + 1);
    mpf sum = term;
    for (int k = 1; k < 100000; ++k) {
        term *= q / (mpf(k) * (k + nu));
        sum += term;
        if (k > x && abs(term) < sum * mpf("1e-95")) break;
    }
    return sum;
}

// K_n(z), integer n >= 0, principal branch, by the ascending series
inline mpc bessel_k_series(int n, const mpc& z) {
    const mpf gamma = boost::math::constants::euler<mpf>();
    mpc h = z / mpf(2), q = h * h;
    mpc hn = 1;
    for (int i = 0; i < n; ++i) hn *= h;

    mpc finite = 0;
    if (n > 0) {
        mpc p = 1;
        mpf fac_a = 1;  // (n-k-1)!
        for (int i = 2; i <= n - 1; ++i) fac_a *= i;
        mpf fac_k = 1;
        for (int k = 0; k < n; ++k) {
            if (k > 0) {
                fac_k *= k;
                fac_a /= (n - k);
                p *= -q;
            }
            finite += p * (fac_a / fac_k);
        }
        finite = finite / (mpf(2) * hn);
    }

    // psi(m+1) = -gamma + H_m
    mpf Hk = 0, Hnk = 0;
    for (int i = 1; i <= n; ++i) Hnk += mpf(1) / i;
    mpf fac_n = 1;
    for (int i = 2; i <= n; ++i) fac_n *= i;
    mpc term = mpc(mpf(1) / fac_n);  // q^k / (k! (n+k)!)
    mpc ipart = term, spart = term * (Hk + Hnk - 2 * gamma);
    for (int k = 1; k < 100000; ++k) {
        term *= q / (mpf(k) * (n + k));
        Hk += mpf(1) / k;
        Hnk += mpf(1) / (n + k);
        ipart += term;
        spart += term * (Hk + Hnk - 2 * gamma);
        if (k > abs(z) && abs(term) * (1 + Hk + Hnk) < mpf("1e-98") * (abs(ipart) + abs(spart)))
            break;
    }
    mpc in = hn * ipart;
    mpf sgn = (n % 2 == 0) ? 1 : -1;
    return finite - sgn * log(h) * in + sgn * hn * spart / mpf(2);
}

// exp(z) K_nu(z) by Hankel's expansion, |z| large
inline mpc bessel_k_hankel_scaled(const mpf& nu, const mpc& z) {
    const mpf pi = boost::math::constants::pi<mpf>();
    mpf mu = 4 * nu * nu;
    mpc term = 1, sum = 1;
    mpf prev = 1;
    for (int k = 1; k < 4000; ++k) {
        term *= (mu - mpf(2 * k - 1) * (2 * k - 1)) / (mpf(8) * k * z);
        mpf a = abs(term);
        if (a == 0) break;
        if (a > prev && k > 2) break;
        sum += term;
        prev = a;
        if (a < mpf("1e-95") * abs(sum)) break;
    }
    return sqrt(pi / (2 * z)) * sum;
}

// exp(z) K_{n+1/2}(z) by the terminating sum
inline mpc bessel_k_half_scaled(int n, const mpc& z) {
    const mpf pi = boost::math::constants::pi<mpf>();
    mpc sum = 0, p = 1;
    mpf c = 1;  // (n+k)! / (k! (n-k)!)
    for (int k = 0; k <= n; ++k) {
        if (k > 0) {
            c *= mpf(n + k) * (n - k + 1) / k;
            p *= 2 * z;
        }
        sum += c / p;
    }
    return sqrt(pi / (2 * z)) * sum;
}

// exp(z) K_n(z) for integer n; the series is used where Hankel's expansion is not accurate
inline mpc bessel_k_scaled(int n, const mpc& z) {
    mpf R = std::max(35.0, 0.5 * n * n);
    if (abs(z) > R) return bessel_k_hankel_scaled(mpf(n), z);
    return exp(z) * bessel_k_series(n, z);
}

// K_nu'(z) / K_nu(z) for nu = n (half = false) or n + 1/2 (half = true)
inline mpc log_derivative_k(int n, bool half, const mpc& z) {
    mpf nu = half ? mpf(n) + mpf(0.5) : mpf(n);
    mpc k0 = half ? bessel_k_half_scaled(n, z) : bessel_k_scaled(n, z);
    mpc k1 = half ? bessel_k_half_scaled(n + 1, z) : bessel_k_scaled(n + 1, z);
    return nu / z - k1 / k0;
}

}  // namespace mp_oracle
