#include "nrbc/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "nrbc/errors.hpp"

namespace nrbc {

namespace {

// L_n(x) and L_n'(x) by the three-term recurrence.
void legendre_pair(int n, double x, double& pn, double& dpn) {
    double p0 = 1.0, p1 = x;
    if (n == 0) {
        pn = 1.0;
        dpn = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    pn = p1;
    if (std::abs(x) == 1.0)
        dpn = (n % 2 == 0 && x < 0 ? -1.0 : 1.0) * 0.5 * n * (n + 1.0);
    else
        dpn = n * (x * p1 - p0) / (x * x - 1.0);
}

QuadRule compute_gl(int n) {
    QuadRule q;
    q.x.resize(n);
    q.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p = 0, dp = 1;
        for (int it = 0; it < 100; ++it) {
            legendre_pair(n, x, p, dp);
            double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        legendre_pair(n, x, p, dp);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        q.x[i] = -x;
        q.x[n - 1 - i] = x;
        q.w[i] = w;
        q.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) q.x[n / 2] = 0.0;
    return q;
}

QuadRule compute_lgl(int n) {
    // interior nodes are the roots of L_n'
    QuadRule q;
    q.x.assign(n + 1, 0.0);
    q.w.assign(n + 1, 0.0);
    q.x[0] = -1.0;
    q.x[n] = 1.0;
    for (int i = 1; i <= (n - 1 + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * i / n);
        for (int it = 0; it < 100; ++it) {
            double p, dp;
            legendre_pair(n, x, p, dp);
            // (1-x^2) L_n'' = 2x L_n' - n(n+1) L_n
            double d2 = (2.0 * x * dp - n * (n + 1.0) * p) / (1.0 - x * x);
            double dx = dp / d2;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        q.x[n - i] = x;
        q.x[i] = -x;
    }
    if (n % 2 == 0) q.x[n / 2] = 0.0;
    for (int i = 0; i <= n; ++i) {
        double p, dp;
        legendre_pair(n, q.x[i], p, dp);
        q.w[i] = 2.0 / (n * (n + 1.0) * p * p);
    }
    return q;
}

}  // namespace

QuadRule gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: need at least one node");
    static std::mutex mu;
    static std::map<int, QuadRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    return cache.emplace(n, compute_gl(n)).first->second;
}

QuadRule gauss_lobatto(int n) {
    if (n < 1) throw DomainError("gauss_lobatto: need at least two nodes");
    static std::mutex mu;
    static std::map<int, QuadRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    return cache.emplace(n, compute_lgl(n)).first->second;
}

QuadRule gauss_legendre(int n, double a, double b) {
    QuadRule q = gauss_legendre(n);
    double h = 0.5 * (b - a), m = 0.5 * (b + a);
    for (int i = 0; i < n; ++i) {
        q.x[i] = m + h * q.x[i];
        q.w[i] *= h;
    }
    return q;
}

void legendre_table(int n, double x, std::vector<double>& p, std::vector<double>& dp) {
    p.assign(n + 1, 0.0);
    dp.assign(n + 1, 0.0);
    p[0] = 1.0;
    if (n == 0) return;
    p[1] = x;
    dp[1] = 1.0;
    for (int k = 1; k < n; ++k) {
        p[k + 1] = ((2.0 * k + 1.0) * x * p[k] - k * p[k - 1]) / (k + 1.0);
        // L_{k+1}' = L_{k-1}' + (2k+1) L_k
        dp[k + 1] = dp[k - 1] + (2.0 * k + 1.0) * p[k];
    }
}

double legendre(int n, double x) {
    double p, dp;
    legendre_pair(n, x, p, dp);
    return p;
}

}  // namespace nrbc
