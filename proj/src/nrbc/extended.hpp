#pragma once

// Minimal complex arithmetic in an extended real type. Used where double
// precision loses too many digits to cancellation.

#include <cmath>
#include <complex>

extern "C" {
#include <quadmath.h>
}

namespace nrbc::ext {

using real = __float128;
inline real log(real x) { return logq(x); }
inline real exp(real x) { return expq(x); }
inline real sqrt(real x) { return sqrtq(x); }
inline real sin(real x) { return sinq(x); }
inline real cos(real x) { return cosq(x); }
inline real atan2(real y, real x) { return atan2q(y, x); }
inline real fabs(real x) { return fabsq(x); }
inline real hypot(real x, real y) { return hypotq(x, y); }
inline constexpr double epsilon = 1.93e-34;

// double-double splits of pi and Euler's gamma
inline const real pi = real(3.141592653589793) + real(1.2246467991473532e-16);
inline const real euler_gamma = real(0.5772156649015329) + real(-4.942915152430645e-18);

struct complex {
    real re = 0, im = 0;
    complex() = default;
    complex(real r, real i = 0) : re(r), im(i) {}
    explicit complex(std::complex<double> z) : re(z.real()), im(z.imag()) {}
    std::complex<double> to_double() const { return {double(re), double(im)}; }
};

inline complex operator+(complex a, complex b) { return {a.re + b.re, a.im + b.im}; }
inline complex operator-(complex a, complex b) { return {a.re - b.re, a.im - b.im}; }
inline complex operator-(complex a) { return {-a.re, -a.im}; }
inline complex operator*(complex a, complex b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline complex operator*(complex a, real s) { return {a.re * s, a.im * s}; }
inline complex operator*(real s, complex a) { return {a.re * s, a.im * s}; }
inline complex operator/(complex a, real s) { return {a.re / s, a.im / s}; }
inline complex operator/(complex a, complex b) {
    if (fabs(b.re) >= fabs(b.im)) {
        real r = b.im / b.re, d = b.re + b.im * r;
        return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
    }
    real r = b.re / b.im, d = b.im + b.re * r;
    return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
}
inline complex& operator+=(complex& a, complex b) { return a = a + b; }
inline complex& operator*=(complex& a, complex b) { return a = a * b; }

inline real abs(complex a) { return hypot(a.re, a.im); }
inline complex log(complex a) { return {log(abs(a)), atan2(a.im, a.re)}; }
inline complex exp(complex a) {
    real m = exp(a.re);
    return {m * cos(a.im), m * sin(a.im)};
}
inline complex sqrt(complex a) {
    real m = abs(a);
    if (m == 0) return {0, 0};
    real r = sqrt((m + fabs(a.re)) / 2);
    if (a.re >= 0) return {r, a.im / (2 * r)};
    return {fabs(a.im) / (2 * r), a.im >= 0 ? r : -r};
}

}  // namespace nrbc::ext
