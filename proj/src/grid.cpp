#include "conemult/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace conemult {

Lattice Lattice::cube(int rank, int n, double L) {
    if (rank < 1 || rank > 4) throw std::invalid_argument("lattice rank must be 1..4");
    Lattice lat;
    lat.rank = rank;
    for (int a = 0; a < rank; ++a) {
        lat.n[a] = n;
        lat.L[a] = L;
    }
    lat.frame = Eigen::MatrixXd::Identity(rank, rank);
    lat.center = Eigen::VectorXd::Zero(rank);
    return lat;
}

Lattice Lattice::aligned(const Eigen::MatrixXd& frame, const Eigen::VectorXd& center, std::array<int, 4> n,
                         std::array<double, 4> L) {
    const int rank = static_cast<int>(frame.rows());
    if (rank < 1 || rank > 4 || frame.cols() != rank || center.size() != rank)
        throw std::invalid_argument("lattice frame/center shape mismatch");
    if ((frame.transpose() * frame - Eigen::MatrixXd::Identity(rank, rank)).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("lattice frame must be orthonormal");
    Lattice lat;
    lat.rank = rank;
    for (int a = 0; a < rank; ++a) {
        if (n[a] < 1 || !(L[a] > 0)) throw std::invalid_argument("lattice sizes must be positive");
        lat.n[a] = n[a];
        lat.L[a] = L[a];
    }
    lat.frame = frame;
    lat.center = center;
    return lat;
}

long Lattice::size() const {
    long s = 1;
    for (int a = 0; a < rank; ++a) s *= n[a];
    return s;
}

double Lattice::cell_volume() const {
    double v = 1;
    for (int a = 0; a < rank; ++a) v *= dx(a);
    return v;
}

std::array<int, 4> Lattice::unflatten(long idx) const {
    std::array<int, 4> i{0, 0, 0, 0};
    for (int a = rank - 1; a >= 0; --a) {
        i[a] = static_cast<int>(idx % n[a]);
        idx /= n[a];
    }
    return i;
}

Eigen::VectorXd Lattice::world(const std::array<int, 4>& i) const {
    Eigen::VectorXd q(rank);
    for (int a = 0; a < rank; ++a) q[a] = local(a, i[a]);
    return center + frame * q;
}

GridFunction::GridFunction(const Lattice& lat) : lattice(lat), values(lat.size(), cplx(0, 0)) {
    support.fill(-1);
}

GridFunction::GridFunction(const Lattice& lat, std::vector<cplx> v) : lattice(lat), values(std::move(v)) {
    if (static_cast<long>(values.size()) != lat.size()) throw std::invalid_argument("value count does not match lattice");
    support.fill(-1);
}

double GridFunction::l2_norm() const {
    double s = 0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s * lattice.cell_volume());
}

GridFunction sample(const Lattice& lat, const std::function<cplx(const Eigen::VectorXd&)>& func) {
    GridFunction g(lat);
    for (long i = 0; i < g.size(); ++i) g.values[i] = func(lat.world(lat.unflatten(i)));
    return g;
}

double box_indicator(const Box3& box, const Eigen::Vector3d& x) {
    const Eigen::Vector3d q = box.local(x);
    double v = 1;
    for (int a = 0; a < 3; ++a) {
        const double d = std::abs(q[a]) - box.half[a];
        if (d > 1e-10 * (1 + box.half[a])) return 0;
        if (d >= -1e-10 * (1 + box.half[a])) v *= 0.5;
    }
    return v;
}

GridFunction sample_box(const Lattice& lat, const Box3& box) {
    if (lat.rank != 3) throw std::invalid_argument("sample_box needs a rank-3 lattice");
    GridFunction g(lat);
    for (int a = 0; a < 3; ++a) g.support[a] = 0;
    for (const auto& v : box.vertices()) {
        const Eigen::VectorXd q = lat.frame.transpose() * (v - lat.center);
        for (int a = 0; a < 3; ++a) {
            g.support[a] = std::max(g.support[a], std::abs(q[a]));
            if (std::abs(q[a]) > lat.L[a]) throw std::invalid_argument("box is not inside the lattice cube");
        }
    }
#pragma omp parallel for schedule(static)
    for (long i = 0; i < g.size(); ++i) {
        const Eigen::VectorXd x = lat.world(lat.unflatten(i));
        g.values[i] = box_indicator(box, Eigen::Vector3d(x[0], x[1], x[2]));
    }
    return g;
}

MultiplierSymbol MultiplierSymbol::half_space(const Eigen::VectorXd& normal) {
    MultiplierSymbol m;
    m.kind = Kind::HalfSpace;
    m.normal = normal;
    return m;
}

MultiplierSymbol MultiplierSymbol::half_line(int sign) {
    MultiplierSymbol m;
    m.kind = Kind::HalfLine;
    m.sign = sign >= 0 ? 1 : -1;
    return m;
}

double MultiplierSymbol::operator()(const double* xi_in, int d) const {
    double xi[4];
    double r2 = 0;
    for (int a = 0; a < d; ++a) {
        xi[a] = xi_in[a] + (shift.size() ? shift[a] : 0.0);
        r2 += xi[a] * xi[a];
    }
    const double scale = std::max(1.0, std::sqrt(r2));
    double s = 0, tol = boundary_tol * scale;
    switch (kind) {
    case Kind::Cone: {
        double t = 0;
        for (int a = 1; a < d; ++a) t += xi[a] * xi[a];
        s = xi[0] - std::sqrt(t);
        break;
    }
    case Kind::HalfSpace:
        for (int a = 0; a < d; ++a) s -= xi[a] * normal[a];
        tol *= normal.norm();
        break;
    case Kind::HalfLine:
        s = sign * xi[0];
        break;
    }
    if (std::abs(s) <= tol) return boundary_value;
    return s > 0 ? 1.0 : 0.0;
}

namespace {
std::mutex plan_mutex;
}

void fft_inplace(std::vector<cplx>& data, const std::array<int, 4>& n, int rank, bool forward) {
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft(rank, n.data(), p, p, forward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("FFTW planning failed");
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
}

namespace {

void check_symbol(const MultiplierSymbol& m, int d) {
    if (m.kind == MultiplierSymbol::Kind::HalfSpace && m.normal.size() != d)
        throw std::invalid_argument("half-space normal dimension does not match lattice");
    if (m.kind == MultiplierSymbol::Kind::HalfLine && d != 1) throw std::invalid_argument("half-line symbol needs rank 1");
    if (m.kind == MultiplierSymbol::Kind::Cone && d < 2) throw std::invalid_argument("cone symbol needs rank >= 2");
    if (m.shift.size() && m.shift.size() != d) throw std::invalid_argument("symbol shift dimension mismatch");
}

long padded_index(const Lattice& lat, const std::array<int, 4>& P, long i) {
    const auto ix = lat.unflatten(i);
    long j = 0;
    for (int a = 0; a < lat.rank; ++a) j = j * P[a] + ix[a];
    return j;
}

} // namespace

Spectrum forward_spectrum(const GridFunction& f, const FftOptions& opt) {
    const Lattice& lat = f.lattice;
    Spectrum s;
    s.lattice = lat;
    long total = 1;
    for (int a = 0; a < lat.rank; ++a) {
        if (opt.pad[a] < 1) throw std::invalid_argument("padding factor must be >= 1");
        // relative slack so that a support reaching exactly half the period survives rounding
        if (f.support[a] >= 0 && opt.pad[a] * lat.L[a] * (1 + 1e-12) < 2 * f.support[a])
            throw std::invalid_argument("function support exceeds half of the padded lattice");
        s.P[a] = opt.pad[a] * lat.n[a];
        total *= s.P[a];
    }
    s.data.assign(total, cplx(0, 0));
    for (long i = 0; i < f.size(); ++i) s.data[padded_index(lat, s.P, i)] = f.values[i];
    fft_inplace(s.data, s.P, lat.rank, true);
    return s;
}

void spectrum_frequency(const Spectrum& s, long j, double* xi) {
    const Lattice& lat = s.lattice;
    const int d = lat.rank;
    double eta[4];
    for (int a = d - 1; a >= 0; --a) {
        long k = j % s.P[a];
        j /= s.P[a];
        if (k >= (s.P[a] + 1) / 2) k -= s.P[a];
        eta[a] = static_cast<double>(k) / (s.P[a] * lat.dx(a));
    }
    for (int a = 0; a < d; ++a) {
        xi[a] = 0;
        for (int b = 0; b < d; ++b) xi[a] += lat.frame(a, b) * eta[b];
    }
}

GridFunction inverse_with_symbol(const Spectrum& s, const MultiplierSymbol& m) {
    const Lattice& lat = s.lattice;
    const int d = lat.rank;
    check_symbol(m, d);
    std::vector<cplx> buf(s.data.size());
    const long total = static_cast<long>(buf.size());
#pragma omp parallel for schedule(static)
    for (long j = 0; j < total; ++j) {
        double xi[4];
        spectrum_frequency(s, j, xi);
        buf[j] = s.data[j] * m(xi, d);
    }
    fft_inplace(buf, s.P, d, false);
    GridFunction out(lat);
    const double inv = 1.0 / static_cast<double>(total);
    for (long i = 0; i < out.size(); ++i) out.values[i] = buf[padded_index(lat, s.P, i)] * inv;
    return out;
}

GridFunction fft_multiplier_apply(const GridFunction& f, const MultiplierSymbol& m, const FftOptions& opt) {
    check_symbol(m, f.lattice.rank);
    return inverse_with_symbol(forward_spectrum(f, opt), m);
}

double relative_l2(const std::vector<cplx>& a, const std::vector<cplx>& b, const std::vector<char>& mask) {
    if (a.size() != b.size() || (!mask.empty() && mask.size() != a.size()))
        throw std::invalid_argument("relative_l2 size mismatch");
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!mask.empty() && !mask[i]) continue;
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    if (den == 0) return num == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

} // namespace conemult
