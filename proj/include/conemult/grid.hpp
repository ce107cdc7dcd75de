#pragma once

#include "conemult/besicovitch.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace conemult {

using cplx = std::complex<double>;

// Uniform lattice of rank 1..4. Local coordinates q_a = -L_a + i*dx_a, dx_a = 2 L_a / n_a;
// world coordinates x = center + frame * q.
struct Lattice {
    int rank = 1;
    std::array<int, 4> n{1, 1, 1, 1};
    std::array<double, 4> L{1, 1, 1, 1};
    Eigen::MatrixXd frame;  // rank x rank, orthonormal
    Eigen::VectorXd center; // rank

    static Lattice cube(int rank, int n, double L);
    static Lattice aligned(const Eigen::MatrixXd& frame, const Eigen::VectorXd& center, std::array<int, 4> n,
                           std::array<double, 4> L);

    double dx(int a) const { return 2 * L[a] / n[a]; }
    long size() const;
    double cell_volume() const;
    double local(int a, int i) const { return -L[a] + i * dx(a); }
    // Multi-index of a flat (row-major) position.
    std::array<int, 4> unflatten(long idx) const;
    Eigen::VectorXd world(const std::array<int, 4>& i) const;
};

struct GridFunction {
    Lattice lattice;
    std::vector<cplx> values;
    // Half-widths (local, about the lattice center) of a box containing the support; -1 when unknown.
    std::array<double, 4> support{-1, -1, -1, -1};

    explicit GridFunction(const Lattice& lat);
    GridFunction(const Lattice& lat, std::vector<cplx> v);
    long size() const { return static_cast<long>(values.size()); }
    double l2_norm() const;
};

// Samples func at every lattice point; support is left unknown.
GridFunction sample(const Lattice& lat, const std::function<cplx(const Eigen::VectorXd&)>& func);
// Indicator of a box with the value 1/2 on faces (1/4 on edges, 1/8 at corners); rank 3 only.
// Throws invalid_argument if the box is not inside the lattice cube.
GridFunction sample_box(const Lattice& lat, const Box3& box);
double box_indicator(const Box3& box, const Eigen::Vector3d& x);

struct MultiplierSymbol {
    enum class Kind { Cone, HalfSpace, HalfLine };
    Kind kind = Kind::Cone;
    Eigen::VectorXd normal;       // HalfSpace: value 1 where <xi, normal> < 0
    int sign = 1;                 // HalfLine: value 1 where sign * xi > 0
    Eigen::VectorXd shift;        // evaluate at xi + shift when non-empty
    double boundary_value = 0.5;
    double boundary_tol = 1e-12;  // relative to |xi| (at least 1)

    static MultiplierSymbol cone() { return {}; }
    static MultiplierSymbol half_space(const Eigen::VectorXd& normal);
    static MultiplierSymbol half_line(int sign);

    double operator()(const double* xi, int d) const;
    double operator()(const Eigen::VectorXd& xi) const { return (*this)(xi.data(), static_cast<int>(xi.size())); }
};

struct FftOptions {
    std::array<int, 4> pad{1, 1, 1, 1}; // zero-padding factor per axis
};

// Zero-padded forward DFT of f (data at the start of each padded axis).
struct Spectrum {
    Lattice lattice;
    std::array<int, 4> P{1, 1, 1, 1};
    std::vector<cplx> data;
};
// Throws invalid_argument when the support metadata of f exceeds half of the padded extent.
Spectrum forward_spectrum(const GridFunction& f, const FftOptions& opt = {});
// Frequency (world coordinates) of padded index j.
void spectrum_frequency(const Spectrum& s, long j, double* xi);
// Multiply by the symbol, inverse DFT, crop to the original lattice.
GridFunction inverse_with_symbol(const Spectrum& s, const MultiplierSymbol& m);

// Forward DFT, multiply by the symbol on the frequency lattice, inverse DFT, crop.
GridFunction fft_multiplier_apply(const GridFunction& f, const MultiplierSymbol& m, const FftOptions& opt = {});

// In-place complex DFT over the lattice shape (FFTW sign convention, unnormalized).
void fft_inplace(std::vector<cplx>& data, const std::array<int, 4>& n, int rank, bool forward);

// Relative L2 distance of a to b over the points where mask is true (all points if mask is empty).
double relative_l2(const std::vector<cplx>& a, const std::vector<cplx>& b, const std::vector<char>& mask = {});

} // namespace conemult
