#pragma once

#include <functional>
#include <vector>

namespace conemult {

struct QuadResult {
    double value = 0;
    double error = 0;
    long evaluations = 0;
    bool converged = false;
};

// Globally adaptive Gauss–Kronrod (7/15) on [a, b]; stops when error <= max(abs_tol, rel_tol*|value|).
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                              double rel_tol, int max_intervals = 20000);

struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss–Legendre on [-1, 1].
GaussRule gauss_legendre(int n);
// Generalized Gauss–Laguerre for the weight x^alpha e^{-x} on (0, inf).
GaussRule gauss_laguerre(int n, double alpha = 0.0);

} // namespace conemult
