#pragma once

#include "conemult/besicovitch.hpp"
#include "conemult/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace conemult {

// Value at t of F^{-1}(1_{sign*xi > 0} * Fourier(1_[a,b])) = (1_[a,b] + i*sign*Hilbert(1_[a,b])) / 2,
// with Hilbert(1_[a,b])(t) = ln|(t-a)/(t-b)| / pi. Throws SingularityError at t = a or t = b.
cplx halfline_projection_1d(double a, double b, double t, int sign = 1);

// inf of |t| * |halfline_projection_1d(a, b, t)| over |t| in [b + delta, t_max], scanned on a fine grid.
double halfline_decay_constant(double a, double b, double delta, double t_max);

// Exact H(1_F)(x) for the half-space multiplier 1_{<xi, normal> < 0}; the normal must be parallel
// to an axis of F. Zero outside the slab over the cross-section (1/2 on its faces).
cplx box_halfspace_image(const Box3& F, const Eigen::Vector3d& normal, const Eigen::Vector3d& x);

// Box-aligned lattice for F: spacing half_a / samples_per_half per axis, n[a] points per axis.
Lattice box_lattice(const Box3& F, std::array<int, 4> n, std::array<double, 3> samples_per_half);

struct BoxImageCheck {
    double rel_l2 = 0;      // aggregated over the boxes, on the comparison region
    double worst_box = 0;   // largest per-box relative L2
    long compared_points = 0;
};

// FFT half-space image of every F_j against the closed form. The comparison region is
// |q0| < h0 + reach with ||q0| - h0| > jump_gap along the normal axis (the closed form is
// log-singular at the jumps).
struct BoxImageOptions {
    int n0 = 1 << 14;
    int n_cross = 8;
    double samples_per_half0 = 64;
    double samples_per_half_cross = 2;
    int pad0 = 4;
    double jump_gap = 0.1;
    double reach = 8.0;
};
BoxImageCheck box_image_fft_check(const BoxFamily& boxes, const BoxImageOptions& opt = {});

struct SquareFunctionOptions {
    std::uint64_t mc_samples = 100000;
    std::uint64_t seed = 1;
    double union_h = 0x1.0p-18;  // raster step for eps_hat
    double lhs_tol = 1e-8;       // absolute quadrature tolerance per box
    bool allow_control = false;  // permits p = 2
};

struct SquareFunctionResult {
    int k = 0;
    int N = 1;
    double p = 1;
    double eps_hat = 0;     // certified upper bound on |union E_j|
    double lhs = 0;         // sum_j int_{Ft_j} |H_j 1_{F_j}|
    double lhs_error = 0;   // quadrature error estimate
    double kappa = 0;       // min over the translates of |H_j 1_{F_j}|
    double rhs_exact = 0;   // (int (sum_j 1_{F_j})^{p/2})^{1/p}
    double rhs_stderr = 0;
    double rhs_holder = 0;  // (sum |F_j|)^{1/2} eps_hat^{1/p - 1/2}
    bool mc_flagged = false; // standard error above 10% of the estimate
};

// eps_hat may be passed in (negative: computed here with opt.union_h).
SquareFunctionResult square_function_v2(const BoxFamily& boxes, double p, const SquareFunctionOptions& opt = {},
                                        double eps_hat = -1);

struct RatioConfig {
    std::vector<int> k_list{3, 4, 5, 6, 7, 8};
    std::vector<double> p_list{1.0};
    SquareFunctionOptions sf;
    double c_p = 1.4142135623730951; // Khintchine constant, configurable
};

struct ExperimentReport {
    SquareFunctionResult sf;
    double ratio = 0;        // lhs / rhs_exact
    double ratio_holder = 0; // lhs / rhs_holder
    double m_lower = 0;      // ratio / c_p
    std::string mode;        // "test" or "control" (p = 2)
    double wall_ms = 0;      // left at 0 unless the caller records timings (breaks byte determinism)
};

ExperimentReport make_report(const SquareFunctionResult& sf, double c_p);
std::vector<ExperimentReport> ratio_experiment(const RatioConfig& cfg);

std::string csv_header();
std::string csv_row(const ExperimentReport& r);
std::string format_double(double v); // 17 significant digits, locale independent

struct RandomSignParams {
    int n = 256;
    double L = 24;
    int pad = 1;
    double ball_radius = kBallRadius;
    int trials = 8;
    std::uint64_t seed = 1;
};

struct RandomSignResult {
    std::vector<double> R;
    std::vector<double> ratio;        // max over trials of ||Sf||_{L1(B)} / ||f||_{Lp(B)}
    std::vector<double> distance;     // relative L2 of the demodulated images to the discrete half-space images
};

// One shared forward transform per box; the cone symbol is evaluated at xi + R n_j on the lattice
// and the modulation e^{2 pi i R <x, n_j>} is applied pointwise. Trial 0 uses all signs +1.
RandomSignResult random_sign_sweep(const BoxFamily& boxes, double p, const std::vector<double>& R_list,
                                   const RandomSignParams& params = {});
double random_sign_norm_lower_bound(const BoxFamily& boxes, double p, int trials, double R_mod,
                                    const RandomSignParams& params = {});

struct TrendOptions {
    std::array<int, 4> n{256, 32, 32, 1};
    double samples_per_half = 4;
    int pad = 2;
    double jump_gap = 0.1;
};

// Relative L2 distance, on a lattice aligned with F_j, between the demodulated cone image
// F^{-1}[1_cone(xi + R n_j) Fourier(1_{F_j})] and the closed-form half-space image, over the region
// ||q0| - h0| > jump_gap. One value per R.
std::vector<double> modulation_trend(const BoxFamily& boxes, int j, const std::vector<double>& R_list,
                                     const TrendOptions& opt = {});

// Relative L2 distance between H(1_{F_0} (x) phi) on a 4D lattice and H^{(3)}(1_{F_0}) (x) phi, for the
// half-space normal (nt_0, normal4). Separable (and exact up to rounding) when normal4 = 0.
double tensor_extension_check(const GridFunction& phi, int k, double normal4 = 0.0);

} // namespace conemult
