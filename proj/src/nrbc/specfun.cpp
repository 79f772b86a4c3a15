#include "nrbc/specfun.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "nrbc/errors.hpp"
#include "nrbc/extended.hpp"

namespace nrbc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr cplx kI{0.0, 1.0};

// Taylor coefficients of 1/Gamma(z) about 0, starting at z^1.
constexpr double kRecipGamma[] = {
    1.0,
    0.5772156649015328606,
    -0.6558780715202538811,
    -0.0420026350340952355,
    0.1665386113822914895,
    -0.0421977345555443367,
    -0.0096219715278769736,
    0.0072189432466630995,
    -0.0011651675918590651,
    -0.0002152416741149510,
    0.0001280502823881162,
    -0.0000201348547807882,
    -0.0000012504934821427,
    0.0000011330272319817,
    -0.0000002056338416978,
    0.0000000061160951045,
    0.0000000050020076445,
    -0.0000000011812745705,
    0.0000000001043426712,
    0.0000000000077822634,
    -0.0000000000036968056,
    0.0000000000005100370,
    -0.0000000000000205833,
    -0.0000000000000053481,
    0.0000000000000012268,
    -0.0000000000000001181,
};

// gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
    constexpr int nc = sizeof(kRecipGamma) / sizeof(double);
    double even = 0.0, odd = 0.0, m2 = mu * mu, pw = 1.0;
    // 1/Gamma(1+mu) = sum c_{k+1} mu^k
    for (int k = 0; k < nc; k += 2) {
        even += kRecipGamma[k] * pw;
        if (k + 1 < nc) odd += kRecipGamma[k + 1] * pw;
        pw *= m2;
    }
    gam2 = even;
    gam1 = -odd;
    gampl = even + mu * odd;
    gammi = even - mu * odd;
}

// K_mu and K_{mu+1} for |mu| <= 1/2, returned as logs.
void log_k_small_order(double mu, double x, double& lk, double& lk1) {
    if (std::abs(std::abs(mu) - 0.5) < 1e-15) {
        double l = 0.5 * std::log(kPi / (2.0 * x)) - x;
        lk = l;
        lk1 = mu > 0 ? l + std::log1p(1.0 / x) : l;
        return;
    }
    if (x <= 2.0) {
        double x2 = 0.5 * x, pimu = kPi * mu;
        double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
        double d = -std::log(x2), e = mu * d;
        double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
        double gam1, gam2, gampl, gammi;
        temme_gammas(mu, gam1, gam2, gampl, gammi);
        double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
        double sum = ff;
        e = std::exp(e);
        double p = 0.5 * e / gampl, q = 0.5 / (e * gammi), c = 1.0;
        d = x2 * x2;
        double sum1 = p;
        for (int i = 1; i < 500; ++i) {
            ff = (i * ff + p + q) / (i * double(i) - mu * mu);
            c *= d / i;
            p /= (i - mu);
            q /= (i + mu);
            double del = c * ff;
            sum += del;
            double del1 = c * (p - i * ff);
            sum1 += del1;
            if (std::abs(del) < std::abs(sum) * kEps) break;
        }
        lk = std::log(sum);
        lk1 = std::log(sum1 * 2.0 / x);
        return;
    }
    // Steed's continued fraction, scaled by exp(x)
    double b = 2.0 * (1.0 + x), d = 1.0 / b, h = d, delh = d;
    double q1 = 0.0, q2 = 1.0, a1 = 0.25 - mu * mu;
    double q = a1, c = a1, a = -a1, s = 1.0 + q * delh;
    for (int i = 1; i < 100000; ++i) {
        a -= 2 * i;
        c = -a * c / (i + 1.0);
        double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    h = a1 * h;
    lk = 0.5 * std::log(kPi / (2.0 * x)) - x - std::log(s);
    lk1 = lk + std::log((mu + x + 0.5 - h) / x);
}

// I_{nu+1} / I_nu by the continued fraction.
double ratio_i_real(double nu, double x) {
    const double tiny = 1e-300;
    double f = 2.0 * (nu + 1.0) / x, C = f, D = 0.0;
    for (int j = 2; j < 200000; ++j) {
        double bj = 2.0 * (nu + j) / x;
        D = bj + D;
        if (D == 0) D = tiny;
        C = bj + 1.0 / C;
        if (C == 0) C = tiny;
        D = 1.0 / D;
        double delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < kEps) return 1.0 / f;
    }
    throw ConvergenceError("continued fraction for I ratio did not converge");
}

// ---- complex K_0, K_1 -------------------------------------------------------

constexpr double kSeriesRadius = 20.0;

// exp(w) K_0(w), exp(w) K_1(w) by the ascending series in extended precision.
void k01_series(cplx wd, cplx& k0, cplx& k1) {
    using ext::complex;
    using ext::real;
    complex w(wd);
    complex q = w * w / real(4);
    complex lg = ext::log(w / real(2));
    // I_0, sum H_k t_k
    complex t(1), i0(1), s0(0);
    real h = 0;
    // I_1 / (w/2), sum (psi(k+1)+psi(k+2)) u_k
    complex u(1), i1s(1), s1(0);
    real hk = 0;  // H_k
    s1 = complex(-2 * ext::euler_gamma + 1);
    const real eps = real(1e-36);
    for (int k = 1; k < 1000; ++k) {
        t = t * q / (real(k) * real(k));
        h += real(1) / real(k);
        i0 += t;
        s0 += t * h;
        u = u * q / (real(k) * real(k + 1));
        hk += real(1) / real(k);
        real hk1 = hk + real(1) / real(k + 1);
        i1s += u;
        s1 += u * (hk + hk1 - 2 * ext::euler_gamma);
        real mag = ext::abs(t) + ext::abs(u);
        if (mag < eps * (ext::abs(i0) + ext::abs(s0)) && k > 2) break;
    }
    complex kk0 = -(lg + complex(ext::euler_gamma)) * i0 + s0;
    complex i1 = i1s * w / real(2);
    complex kk1 = complex(1) / w + lg * i1 - (w / real(4)) * s1;
    complex e = ext::exp(w);
    k0 = (kk0 * e).to_double();
    k1 = (kk1 * e).to_double();
}

// exp(w) K_nu(w) from the large-argument expansion.
cplx k_asymptotic(double nu, cplx w) {
    cplx pre = std::sqrt(kPi / (2.0 * w));
    cplx sum = 1.0, term = 1.0;
    double mu = 4.0 * nu * nu, last = 1e300;
    for (int k = 1; k < 200; ++k) {
        term *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k) / w;
        double a = std::abs(term);
        if (a > last) break;
        sum += term;
        last = a;
        if (a < 1e-18 * std::abs(sum)) break;
    }
    return pre * sum;
}

// exp(w) K_k(w), k = n and n+1, Re w >= 0.
void k_right(int n, cplx w, cplx& kn, cplx& kn1) {
    cplx k0, k1;
    if (std::abs(w) <= kSeriesRadius) {
        k01_series(w, k0, k1);
    } else {
        k0 = k_asymptotic(0.0, w);
        k1 = k_asymptotic(1.0, w);
    }
    for (int k = 1; k <= n; ++k) {
        cplx k2 = k0 + (2.0 * k / w) * k1;
        k0 = k1;
        k1 = k2;
    }
    kn = k0;
    kn1 = k1;
}

// exp(w) K_k(w), k = n+1/2 and n+3/2, Re w >= 0.
void k_right_half(int n, cplx w, cplx& kn, cplx& kn1) {
    cplx k0 = std::sqrt(kPi / (2.0 * w));
    cplx k1 = k0 * (1.0 + 1.0 / w);
    for (int k = 1; k <= n; ++k) {
        cplx k2 = k0 + (2.0 * (k + 0.5) / w) * k1;
        k0 = k1;
        k1 = k2;
    }
    kn = k0;
    kn1 = k1;
}

// I_{nu+1}(w) / I_nu(w), modified Lentz.
cplx ratio_i_complex(double nu, cplx w) {
    const double tiny = 1e-300;
    cplx f = 2.0 * (nu + 1.0) / w, C = f, D = 0.0;
    for (int j = 2; j < 1000000; ++j) {
        cplx bj = 2.0 * (nu + double(j)) / w;
        D = bj + D;
        if (std::abs(D) == 0) D = tiny;
        C = bj + 1.0 / C;
        if (std::abs(C) == 0) C = tiny;
        D = 1.0 / D;
        cplx delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < kEps) return 1.0 / f;
    }
    throw ConvergenceError("continued fraction for complex I ratio did not converge");
}

std::string order_name(BesselOrder o) {
    std::ostringstream s;
    if (o.kind == OrderKind::Integer)
        s << "K_" << o.n;
    else
        s << "K_{" << o.n << "+1/2}";
    return s.str();
}

void check_finite(cplx v, const char* where) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw AccuracyError(std::string(where) + ": result overflowed double range");
}

}  // namespace

// ---- real argument ---------------------------------------------------------

LogBesselIK log_bessel_ik(double nu, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("log_bessel_ik: argument must be positive");
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("log_bessel_ik: order must be non-negative");
    int nl = int(nu + 0.5);
    double mu = nu - nl;
    double lk, lk1;
    log_k_small_order(mu, x, lk, lk1);
    // upward recurrence carried as (value, log scale)
    double scale = lk;
    double a = 1.0, b = std::exp(lk1 - lk);
    for (int i = 1; i <= nl; ++i) {
        double c = (mu + i) * (2.0 / x) * b + a;
        a = b;
        b = c;
        if (b > 1e250) {
            a /= b;
            scale += std::log(b);
            b = 1.0;
        }
    }
    LogBesselIK out;
    out.log_k = scale + std::log(a);
    out.log_k1 = scale + std::log(b);
    double r = ratio_i_real(nu, x);
    // Wronskian: I_nu K_{nu+1} + I_{nu+1} K_nu = 1/x
    out.log_i = -std::log(x) - out.log_k - std::log(b / a + r);
    out.log_i1 = out.log_i + std::log(r);
    return out;
}

double log_bessel_i(double nu, double x) { return log_bessel_ik(nu, x).log_i; }
double log_bessel_k(double nu, double x) { return log_bessel_ik(nu, x).log_k; }

// ---- complex argument ------------------------------------------------------

void bessel_i_scaled_right(int n, cplx w, cplx& i_n, cplx& i_n1) {
    if (w.real() < 0) throw DomainError("bessel_i_scaled_right: needs Re w >= 0");
    cplx kn, kn1;
    k_right(n, w, kn, kn1);
    cplx r = ratio_i_complex(double(n), w);
    i_n = 1.0 / (w * (kn1 + r * kn));
    i_n1 = r * i_n;
}

namespace {

// K_nu(w e^{+-i pi}) = e^{-+i pi nu} K_nu(w) -+ i pi I_nu(w), all scaled by exp(z).
ScaledK continue_left(double nu, cplx z, cplx kw, cplx kw1) {
    cplx w = -z;
    double s = std::signbit(z.imag()) ? -1.0 : 1.0;
    cplx r = ratio_i_complex(nu, w);
    cplx iw = 1.0 / (w * (kw1 + r * kw));
    cplx iw1 = r * iw;
    cplx e2 = std::exp(-2.0 * w);
    cplx ph = std::exp(cplx(0.0, -s * kPi * nu));
    cplx ph1 = -ph;
    cplx t1 = ph * e2 * kw, t2 = -s * kI * kPi * iw;
    ScaledK out;
    out.k = t1 + t2;
    cplx k1 = ph1 * e2 * kw1 - s * kI * kPi * iw1;
    out.dk = (nu / z) * out.k - k1;
    double scale = std::abs(t1) + std::abs(t2);
    double scale1 = std::abs(e2 * kw1) + kPi * std::abs(iw1);
    if (std::abs(out.k) < 1e-6 * scale && std::abs(out.dk) < 1e-6 * (scale + scale1))
        throw AccuracyError("Bessel K continuation: cancellation leaves fewer than 10 digits");
    return out;
}

}  // namespace

ScaledK bessel_k_complex(int n, cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("bessel_k_complex: non-finite argument");
    if (z == cplx(0.0, 0.0)) throw DomainError("bessel_k_complex: K_n is singular at z = 0");
    n = std::abs(n);
    ScaledK out;
    if (z.real() >= 0.0) {
        cplx k, k1;
        k_right(n, z, k, k1);
        out.k = k;
        out.dk = (double(n) / z) * k - k1;
    } else {
        cplx kw, kw1;
        k_right(n, -z, kw, kw1);
        out = continue_left(n, z, kw, kw1);
    }
    check_finite(out.k, "bessel_k_complex");
    check_finite(out.dk, "bessel_k_complex");
    return out;
}

namespace {

// Terminating series S(z) = sum a_k (2z)^{-k} and T(z) = sum k a_k (2z)^{-k}.
void half_series(int n, const ext::complex& z, ext::complex& S, ext::complex& T) {
    using ext::complex;
    using ext::real;
    complex u = complex(1) / (real(2) * z);
    std::vector<real> a(n + 1);
    a[0] = 1;
    for (int k = 0; k < n; ++k) a[k + 1] = a[k] * real(n + k + 1) * real(n - k) / real(k + 1);
    S = complex(a[n]);
    T = complex(a[n] * real(n));
    for (int k = n - 1; k >= 0; --k) {
        S = S * u + complex(a[k]);
        T = T * u + complex(a[k] * real(k));
    }
}

}  // namespace

ScaledK bessel_k_half(int n, cplx z) {
    if (n < 0) throw DomainError("bessel_k_half: order must be non-negative");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("bessel_k_half: non-finite argument");
    if (z == cplx(0.0, 0.0)) throw DomainError("bessel_k_half: singular at z = 0");
    ScaledK out;
    if (z.real() >= 0.0) {
        ext::complex S, T, zq(z);
        half_series(n, zq, S, T);
        cplx s = S.to_double(), t = T.to_double();
        cplx pre = std::sqrt(kPi / (2.0 * z));
        out.k = pre * s;
        out.dk = pre * (s * (-1.0 - 1.0 / (2.0 * z)) - t / z);
    } else {
        cplx kw, kw1;
        k_right_half(n, -z, kw, kw1);
        out = continue_left(n + 0.5, z, kw, kw1);
    }
    check_finite(out.k, "bessel_k_half");
    check_finite(out.dk, "bessel_k_half");
    return out;
}

ScaledK bessel_k_scaled(BesselOrder order, cplx z) {
    return order.kind == OrderKind::Integer ? bessel_k_complex(order.n, z) : bessel_k_half(order.n, z);
}

int zero_count(BesselOrder order) {
    if (order.n < 0) throw DomainError("zero_count: order must be non-negative");
    if (order.kind == OrderKind::HalfInteger) return order.n;
    return 2 * ((2 * order.n + 1) / 4);
}

cplx theta_function(cplx kappa) {
    cplx s = std::sqrt(1.0 + kappa * kappa);
    return s + std::log(kappa / (1.0 + s));
}

namespace {

// Seed from the leading-order phase condition 2 nu theta(kappa) = -i pi (nu + 1/2 - 2k).
cplx phase_seed(double nu, int k) {
    double phi = kPi * (nu + 0.5 - 2.0 * k) / (2.0 * nu);
    cplx target(0.0, -phi);
    cplx kappa(kEyeRealRoot * std::cos(phi), -std::sin(phi) * 0.98);
    for (int it = 0; it < 60; ++it) {
        cplx f = theta_function(kappa) - target;
        cplx df = std::sqrt(1.0 + kappa * kappa) / kappa;
        cplx step = f / df;
        double lim = 0.2;
        if (std::abs(step) > lim) step *= lim / std::abs(step);
        kappa -= step;
        if (std::abs(step) < 1e-14) break;
    }
    return -nu * kappa;
}

struct NewtonResult {
    cplx z;
    bool ok = false;
    double residual = 0;
};

NewtonResult newton_k(BesselOrder order, cplx z, const std::vector<cplx>& deflate, double tol) {
    NewtonResult res;
    try {
    double cap = 0.25 * std::max(1.0, order.value());
    for (int it = 0; it < 50; ++it) {
        ScaledK v = bessel_k_scaled(order, z);
        cplx ratio = v.dk / v.k;  // K'/K
        for (const cplx& zk : deflate) ratio -= 1.0 / (z - zk);
        cplx dz = 1.0 / ratio;
        if (std::abs(dz) > cap) dz *= cap / std::abs(dz);
        z -= dz;
        if (std::abs(dz) < 1e-3 * tol * (1.0 + std::abs(z))) break;
    }
    ScaledK v = bessel_k_scaled(order, z);
    res.z = z;
    res.residual = std::abs(v.k) / std::abs(v.dk);
    res.ok = std::isfinite(res.residual) && res.residual < tol;
    } catch (const Error&) {
        res.ok = false;
    }
    return res;
}

// Companion-matrix roots of the half-order polynomial, polished in extended precision.
std::vector<cplx> half_order_roots(int n) {
    using ext::real;
    // S(z) (2z)^n = y^n + a_1 y^{n-1} + ... + a_n, y = 2z = n u
    std::vector<real> a(n + 1);
    a[0] = 1;
    for (int k = 0; k < n; ++k) a[k + 1] = a[k] * real(n + k + 1) * real(n - k) / real(k + 1);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    real sc = 1;
    for (int k = 1; k <= n; ++k) {
        sc *= real(n);
        C(0, k - 1) = -double(a[k] / sc);
    }
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    std::vector<cplx> roots;
    for (int i = 0; i < n; ++i) {
        cplx zr = es.eigenvalues()[i] * (double(n) / 2.0);
        ext::complex z(zr);
        for (int it = 0; it < 40; ++it) {
            ext::complex S, T;
            half_series(n, z, S, T);
            // S' = -T / z
            ext::complex dz = z * S / T;
            z = z + dz;
            if (ext::abs(dz) < real(1e-30) * ext::abs(z)) break;
        }
        roots.push_back(z.to_double());
    }
    return roots;
}

void sort_zeros(std::vector<cplx>& z) {
    std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
        if (a.imag() != b.imag()) return a.imag() > b.imag();
        return a.real() < b.real();
    });
}

}  // namespace

ZeroSet find_zeros(BesselOrder order, double tol) {
    if (order.n < 0) throw DomainError("find_zeros: order must be non-negative");
    if (!(tol > 0)) throw DomainError("find_zeros: tolerance must be positive");
    ZeroSet out;
    out.order = order;
    const int M = zero_count(order);
    if (M == 0) return out;
    const double nu = order.value();
    const int upper_count = M / 2;
    const bool has_real = (M % 2) == 1;
    const double min_sep = 1e-6 * order.n;

    std::vector<cplx> upper;
    cplx real_zero;
    bool real_found = false;

    if (order.kind == OrderKind::HalfInteger) {
        std::vector<cplx> roots = half_order_roots(order.n);
        std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) { return std::abs(a.imag()) < std::abs(b.imag()); });
        size_t start = 0;
        if (has_real) {
            NewtonResult r = newton_k(order, cplx(roots[0].real(), 0.0), {}, tol);
            if (r.ok) {
                real_zero = cplx(r.z.real(), 0.0);
                real_found = true;
            }
            start = 1;
        }
        for (size_t i = start; i < roots.size(); ++i)
            if (roots[i].imag() > 0) upper.push_back(roots[i]);
        bool good = (int)upper.size() == upper_count && (!has_real || real_found);
        for (cplx& z : upper) {
            NewtonResult r = newton_k(order, z, {}, tol);
            if (!r.ok) good = false;
            z = r.z;
        }
        for (size_t i = 0; good && i < upper.size(); ++i)
            for (size_t j = i + 1; j < upper.size(); ++j)
                if (std::abs(upper[i] - upper[j]) < min_sep) good = false;
        if (!good) upper.clear();
    }

    if (upper.empty() && upper_count > 0) {
        for (int k = 1; k <= upper_count; ++k) {
            cplx seed = phase_seed(nu, k);
            NewtonResult r = newton_k(order, seed, {}, tol);
            bool dup = !r.ok || r.z.imag() <= 0;
            for (const cplx& z : upper)
                if (std::abs(z - r.z) < min_sep) dup = true;
            if (dup) {
                // deflate the zeros already found and retry from the seed
                r = newton_k(order, seed, upper, tol);
                for (const cplx& z : upper)
                    if (std::abs(z - r.z) < min_sep) r.ok = false;
                if (r.ok) r = newton_k(order, r.z, {}, tol);
            }
            if (!r.ok || r.z.imag() <= 0)
                throw ConvergenceError("find_zeros: Newton iteration failed for " + order_name(order) +
                                       " near seed (" + std::to_string(seed.real()) + ", " +
                                       std::to_string(seed.imag()) + ")");
            upper.push_back(r.z);
        }
    }
    if (has_real && !real_found) {
        int k = (int)std::lround((nu + 0.5) / 2.0);
        NewtonResult r = newton_k(order, cplx(phase_seed(nu, k).real(), 0.0), {}, tol);
        if (!r.ok) throw ConvergenceError("find_zeros: real zero not found for " + order_name(order));
        real_zero = cplx(r.z.real(), 0.0);
    }

    for (const cplx& z : upper) {
        out.zeros.push_back(z);
        out.zeros.push_back(std::conj(z));
    }
    if (has_real) out.zeros.push_back(real_zero);
    sort_zeros(out.zeros);
    for (size_t i = 0; i < out.zeros.size(); ++i)
        for (size_t j = i + 1; j < out.zeros.size(); ++j)
            if (std::abs(out.zeros[i] - out.zeros[j]) < min_sep)
                throw ConvergenceError("find_zeros: duplicate zeros for " + order_name(order));
    if ((int)out.zeros.size() != M)
        throw ConvergenceError("find_zeros: wrong zero count for " + order_name(order));
    for (const cplx& z : out.zeros) {
        ScaledK v = bessel_k_scaled(order, z);
        out.residual.push_back(std::abs(v.k) / std::abs(v.dk));
    }
    return out;
}

}  // namespace nrbc
