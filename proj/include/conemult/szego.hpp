#pragma once

#include "conemult/jordan.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace conemult {

struct BudgetExceeded : std::runtime_error {
    BudgetExceeded(const std::string& what, cplx partial, double error)
        : std::runtime_error(what), partial(partial), error(error) {}
    cplx partial;
    double error;
};

// z = x + i y with y in the open cone.
struct TubePoint {
    ComplexElement z;

    RealElement x() const { return real_part(z); }
    RealElement y() const { return imag_part(z); }
    bool in_tube() const { return cone_contains(y()); }
};

// Phi(w) = i (e + w)(e - w)^{-1}; throws SingularityError outside Dom Phi.
ComplexElement cayley(const ComplexElement& w);
// w = (z - i e)(z + i e)^{-1}.
ComplexElement cayley_inverse(const ComplexElement& z);

// 2|z|^2 - 1 < |sum z_j^2|^2 < 1, n >= 3.
bool lie_ball_contains(const Eigen::VectorXcd& z);
// Spin-factor coordinates w = (z_1, i z_2, ..., i z_n), so that Delta(w) = sum z_j^2.
ComplexElement lie_to_spin(const Eigen::VectorXcd& z);
Eigen::VectorXcd spin_to_lie(const ComplexElement& w);

// Spin factor: y_1 - |y'|. Matrices: smallest eigenvalue.
double cone_margin(const RealElement& y);

struct ConformalReport {
    int n = 3;
    long forward_samples = 0;
    long forward_failures = 0;
    long reverse_samples = 0;
    long reverse_failures = 0;
    double min_forward_margin = 0; // smallest cone margin of Im Phi(z) seen
};

// Lie ball -> tube and tube -> Lie ball membership, spin factor of dimension n.
ConformalReport conformal_consistency_check(int n, long samples, std::uint64_t seed);

// Delta(e + x^2)^{-dim/rank}.
double jacobian_density(const RealElement& x);
// |det J_Phi(w)| from central differences of the real 2*dim map (step h); modulus only.
double jacobian_modulus_fd(const ComplexElement& w, double h = 1e-5);

// Points e^{i theta} x, x on the unit sphere, in spin coordinates, with |Delta(e - w)| >= margin.
std::vector<ComplexElement> sample_shilov(int n, long count, double margin, std::uint64_t seed);

// min/max over the samples of Delta(e + x^2)^{dim/rank}, x = Re Phi(w).
// Throws invalid_argument when a sample has |Delta(e - w)| < 1e-3.
std::pair<double, double> compact_jacobian_bounds(const std::vector<ComplexElement>& K);

struct KernelOptions {
    double tol = 1e-8;   // relative
    long budget = 10000000;
    double min_margin = 1e-3;
};

struct KernelSample {
    ComplexElement z;
    RealElement u;
    cplx value;
    double error = 0;
    long evaluations = 0;
    std::string method;
};

// int_cone exp(2 pi i <z - u, xi>) d xi on the light cone, spin factor only. The t and radial
// integrals are exact; the angular integral uses product rules refined by doubling.
KernelSample szego_kernel_quadrature(const ComplexElement& z, const RealElement& u, const KernelOptions& opt = {});

// c_n Delta(zeta / i)^{-n/2}, zeta = z - u, with c_n = Gamma(n) vol(B^{n-1}) / (2 pi)^n and the branch
// continued from zeta = i y.
KernelSample szego_kernel_closed_form(const ComplexElement& z, const RealElement& u);
double szego_light_cone_constant(int n);

// Delta(zeta / i)^p continued along x -> s x, s in [0, 1], from the positive value at s = 0.
cplx tube_power(const ComplexElement& zeta, double p);

// |h(w, w')|^{-n/2}, h = 1 - 2 sum w_j conj(w'_j) + Delta(w) conj(Delta(w')).
double lie_ball_kernel_modulus(const ComplexElement& w, const ComplexElement& wp);

// |S_D| / (|S_T(Phi w, Phi w')| |J(w)|^{1/2} |J(w')|^{1/2}); S_T by quadrature, J by finite differences.
double kernel_relation_ratio(const ComplexElement& w, const ComplexElement& wp, const KernelOptions& opt = {});
// Relative defect |ratio / c0 - 1| for a fitted modulus c0.
double szego_kernel_relation_residual(const ComplexElement& w, const ComplexElement& wp, double c0,
                                      const KernelOptions& opt = {});

struct KernelRelationReport {
    double c0 = 0;
    std::vector<double> residuals; // held-out pairs
};
// Fits c0 on the first pair and evaluates the residual on the remaining ones.
KernelRelationReport kernel_relation_check(int n, int pairs, std::uint64_t seed, const KernelOptions& opt = {});

} // namespace conemult
