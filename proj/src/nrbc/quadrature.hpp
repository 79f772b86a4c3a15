#pragma once

#include <vector>

namespace nrbc {

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule with n nodes on [-1, 1].
QuadRule gauss_legendre(int n);

// Gauss-Lobatto-Legendre rule with n+1 nodes on [-1, 1], endpoints included.
QuadRule gauss_lobatto(int n);

// Same rules mapped to [a, b].
QuadRule gauss_legendre(int n, double a, double b);

// L_0..L_n at x, and their derivatives.
void legendre_table(int n, double x, std::vector<double>& p, std::vector<double>& dp);

double legendre(int n, double x);

}  // namespace nrbc
