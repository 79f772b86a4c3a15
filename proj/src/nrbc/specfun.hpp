#pragma once

#include <complex>
#include <vector>

namespace nrbc {

using cplx = std::complex<double>;

// Order family: integer n (K_n) or half-integer n + 1/2 (K_{n+1/2}).
enum class OrderKind { Integer, HalfInteger };

struct BesselOrder {
    OrderKind kind = OrderKind::Integer;
    int n = 0;
    double value() const { return kind == OrderKind::Integer ? n : n + 0.5; }
};

// Logarithms of I_nu, I_{nu+1}, K_nu, K_{nu+1} at real x > 0.
struct LogBesselIK {
    double log_i = 0, log_i1 = 0, log_k = 0, log_k1 = 0;
};

LogBesselIK log_bessel_ik(double nu, double x);
double log_bessel_i(double nu, double x);
double log_bessel_k(double nu, double x);

// exp(z) K(z) and exp(z) K'(z) on the principal branch.
struct ScaledK {
    cplx k;
    cplx dk;
};

// K_n for integer n >= 0, complex z != 0, |arg z| <= pi.
ScaledK bessel_k_complex(int n, cplx z);

// K_{n+1/2} from the terminating series.
ScaledK bessel_k_half(int n, cplx z);

ScaledK bessel_k_scaled(BesselOrder order, cplx z);

// exp(-w) I_n(w) for Re w >= 0, together with order n+1.
void bessel_i_scaled_right(int n, cplx w, cplx& i_n, cplx& i_n1);

// Number of zeros of K_nu in the cut plane.
int zero_count(BesselOrder order);

struct ZeroSet {
    BesselOrder order;
    std::vector<cplx> zeros;     // conjugate-closed
    std::vector<double> residual;  // |K| / |K'| at each zero
};

ZeroSet find_zeros(BesselOrder order, double tol = 1e-12);

// Boundary of the asymptotic zero region in kappa = z/n: sqrt(1+k^2) + log(k / (1 + sqrt(1+k^2))).
cplx theta_function(cplx kappa);

// Root of Re theta on the positive real axis.
constexpr double kEyeRealRoot = 0.6627434193491815809747420971;

}  // namespace nrbc
