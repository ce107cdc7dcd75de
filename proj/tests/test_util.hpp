#pragma once

#include "conemult/jordan.hpp"

#include <random>

namespace testutil {

using namespace conemult;

inline RealElement random_element(const Algebra& a, std::mt19937_64& g, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    Vec<double> c(a.dim());
    for (int i = 0; i < a.dim(); ++i) c[i] = nd(g);
    return {a, c};
}

inline Vec<double> random_unit(int d, std::mt19937_64& g) {
    std::normal_distribution<double> nd;
    Vec<double> u(d);
    for (int i = 0; i < d; ++i) u[i] = nd(g);
    return u / u.norm();
}

// Smallest eigenvalue of a symmetric matrix element.
inline double min_eig(const RealElement& x) {
    Eigen::SelfAdjointEigenSolver<Mat<double>> es(to_matrix(x));
    return es.eigenvalues().minCoeff();
}

// A random primitive idempotent.
inline RealElement random_primitive(const Algebra& a, std::mt19937_64& g) {
    if (a.is_spin()) return spin_idempotent(random_unit(a.n - 1, g));
    Vec<double> v = random_unit(a.n, g);
    Mat<double> m = v * v.transpose();
    return from_matrix(a, m);
}

} // namespace testutil
