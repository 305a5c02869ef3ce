#pragma once

#include <vector>

#include "miura/potential.hpp"

namespace miura::oracle {

/// Closed-form positive solution of -y'' + q_{a,b} y = 0 for the square well
/// of height b^2 on (-a, a): constant 1/cosh(ba) to the left, cosh ramp
/// inside, linear growth to the right. The mirror x -> -x gives the second
/// positive solution.
double square_well_solution(double a, double b, double x);
double square_well_solution_derivative(double a, double b, double x);

/// Log-derivative of theta y_+ + (1-theta) y_- for q = lambda delta, where
/// y_+ = 1 + lambda x^+ and y_- = 1 + lambda x^-. theta in {0, 1} gives the
/// two extremal preimages. Heaviside taken left-continuous (H(0) = 0).
double delta_fiber(double lambda, double theta, double x);

/// Resolvent kernel of -d^2/dx^2 + c on the line: e^{-sqrt(c)|x-y|}/(2 sqrt(c)).
double constant_green(double c, double x, double y);

struct FdEig {
    double lambda0 = 0.0;
    std::vector<double> ground; // interior-node samples, L2-normalized
};

/// Lowest Dirichlet eigenvalue of the standard second-order finite-difference
/// matrix on (xa, xb) with n cells. Atoms enter as w/h on their nearest node;
/// the f part of q is sampled and differenced. Sturm-sequence bisection on
/// the tridiagonal, ground vector by inverse iteration.
FdEig fd_lowest_eigenvalue(const Potential& q, double xa, double xb, int n);

/// Solve the FD system (-D2 + q) u = f on (xa, xb) with Dirichlet ends;
/// f holds interior-node samples (size n-1).
std::vector<double> fd_solve(const Potential& q, double xa, double xb, int n,
                             const std::vector<double>& f);

/// Column G(., y_j) of the FD Green matrix: solve against the discrete delta
/// e_j / h at interior node j (1 <= j <= n-1).
std::vector<double> fd_green_column(const Potential& q, double xa, double xb, int n, int j);

} // namespace miura::oracle
