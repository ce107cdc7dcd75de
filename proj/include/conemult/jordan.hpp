#pragma once

#include "conemult/errors.hpp"

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace conemult {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using cplx = std::complex<double>;

// Spin factor R x R^{n-1} or real symmetric r x r matrices.
struct Algebra {
    enum class Kind { SpinFactor, SymMatrix };
    Kind kind = Kind::SpinFactor;
    int n = 3; // spin factor dimension, or matrix size r

    static Algebra spin(int n) {
        if (n < 3) throw std::invalid_argument("spin factor needs n >= 3");
        return {Kind::SpinFactor, n};
    }
    static Algebra sym(int r) {
        if (r < 2) throw std::invalid_argument("symmetric matrix algebra needs r >= 2");
        return {Kind::SymMatrix, r};
    }

    int dim() const { return kind == Kind::SpinFactor ? n : n * (n + 1) / 2; }
    int rank() const { return kind == Kind::SpinFactor ? 2 : n; }
    bool is_spin() const { return kind == Kind::SpinFactor; }
    bool operator==(const Algebra& o) const { return kind == o.kind && n == o.n; }
    bool operator!=(const Algebra& o) const { return !(*this == o); }
    std::string name() const {
        return (is_spin() ? "SpinFactor(" : "SymMatrix(") + std::to_string(n) + ")";
    }
};

// SymMatrix coordinates are the upper triangle in row-major order, (0,0),(0,1),...,(r-1,r-1).
inline int sym_index(int r, int i, int j) {
    if (i > j) std::swap(i, j);
    return i * r - i * (i - 1) / 2 + (j - i);
}

template <typename Scalar>
struct Element {
    Algebra algebra;
    Vec<Scalar> coords;

    Element() = default;
    Element(const Algebra& a, Vec<Scalar> c) : algebra(a), coords(std::move(c)) {
        if (coords.size() != a.dim())
            throw std::invalid_argument("coordinate length does not match algebra dimension");
    }

    Scalar operator[](int i) const { return coords[i]; }
    Scalar& operator[](int i) { return coords[i]; }

    Element operator+(const Element& o) const { check(o); return {algebra, coords + o.coords}; }
    Element operator-(const Element& o) const { check(o); return {algebra, coords - o.coords}; }
    Element operator-() const { return {algebra, -coords}; }
    Element operator*(Scalar s) const { return {algebra, coords * s}; }
    friend Element operator*(Scalar s, const Element& x) { return x * s; }
    Element operator/(Scalar s) const { return {algebra, coords / s}; }
    Element& operator+=(const Element& o) { check(o); coords += o.coords; return *this; }
    Element& operator-=(const Element& o) { check(o); coords -= o.coords; return *this; }

    void check(const Element& o) const {
        if (algebra != o.algebra) throw std::invalid_argument("algebra mismatch");
    }
};

using RealElement = Element<double>;
using ComplexElement = Element<cplx>;

template <typename Scalar>
Element<Scalar> zero(const Algebra& a) {
    return {a, Vec<Scalar>::Zero(a.dim())};
}

template <typename Scalar = double>
Element<Scalar> identity(const Algebra& a) {
    Vec<Scalar> c = Vec<Scalar>::Zero(a.dim());
    if (a.is_spin()) {
        c[0] = Scalar(1);
    } else {
        for (int i = 0; i < a.n; ++i) c[sym_index(a.n, i, i)] = Scalar(1);
    }
    return {a, c};
}

template <typename Scalar>
Mat<Scalar> to_matrix(const Element<Scalar>& x) {
    if (x.algebra.is_spin()) throw std::invalid_argument("to_matrix needs a SymMatrix element");
    const int r = x.algebra.n;
    Mat<Scalar> m(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) m(i, j) = m(j, i) = x.coords[sym_index(r, i, j)];
    return m;
}

template <typename Derived>
Element<typename Derived::Scalar> from_matrix(const Algebra& a, const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    if (a.is_spin() || m.rows() != a.n || m.cols() != a.n)
        throw std::invalid_argument("matrix shape does not match algebra");
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("matrix is not symmetric");
    Vec<Scalar> c(a.dim());
    for (int i = 0; i < a.n; ++i)
        for (int j = i; j < a.n; ++j) c[sym_index(a.n, i, j)] = (m(i, j) + m(j, i)) / Scalar(2);
    return {a, c};
}

template <typename Scalar>
Element<Scalar> jordan_product(const Element<Scalar>& x, const Element<Scalar>& y) {
    x.check(y);
    if (x.algebra.is_spin()) {
        const int n = x.algebra.n;
        Vec<Scalar> c(n);
        auto xp = x.coords.tail(n - 1);
        auto yp = y.coords.tail(n - 1);
        // bilinear in both arguments, so no Eigen dot() (it conjugates)
        c[0] = x.coords[0] * y.coords[0] + (xp.array() * yp.array()).sum();
        c.tail(n - 1) = x.coords[0] * yp + y.coords[0] * xp;
        return {x.algebra, c};
    }
    Mat<Scalar> X = to_matrix(x), Y = to_matrix(y);
    Mat<Scalar> Z = (X * Y + Y * X) / Scalar(2);
    return from_matrix(x.algebra, Z);
}

template <typename Scalar>
Element<Scalar> square(const Element<Scalar>& x) {
    return jordan_product(x, x);
}

// Bilinear trace form: Euclidean dot for the spin factor, tr(xy) for matrices.
template <typename Scalar>
Scalar inner(const Element<Scalar>& x, const Element<Scalar>& y) {
    x.check(y);
    if (x.algebra.is_spin()) return (x.coords.array() * y.coords.array()).sum();
    const int r = x.algebra.n;
    Scalar s(0);
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) {
            const int k = sym_index(r, i, j);
            s += (i == j ? Scalar(1) : Scalar(2)) * x.coords[k] * y.coords[k];
        }
    return s;
}

// Norm induced by the trace form (Hermitian extension for complex coordinates).
template <typename Scalar>
double norm(const Element<Scalar>& x) {
    if (x.algebra.is_spin()) return x.coords.norm();
    const int r = x.algebra.n;
    double s = 0;
    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j) s += (i == j ? 1.0 : 2.0) * std::norm(x.coords[sym_index(r, i, j)]);
    return std::sqrt(s);
}

template <typename Scalar>
Scalar determinant(const Element<Scalar>& x) {
    if (x.algebra.is_spin()) {
        const int n = x.algebra.n;
        auto xp = x.coords.tail(n - 1);
        return x.coords[0] * x.coords[0] - (xp.array() * xp.array()).sum();
    }
    return Eigen::PartialPivLU<Mat<Scalar>>(to_matrix(x)).determinant();
}

// Jordan inverse; throws SingularityError when |Δ(x)| <= threshold.
template <typename Scalar>
Element<Scalar> inverse(const Element<Scalar>& x, double threshold = 0.0) {
    const Scalar d = determinant(x);
    if (std::abs(d) <= threshold) throw SingularityError("element is not invertible");
    if (x.algebra.is_spin()) {
        Vec<Scalar> c = -x.coords;
        c[0] = x.coords[0];
        return {x.algebra, c / d};
    }
    Mat<Scalar> inv = to_matrix(x).inverse();
    inv = (inv + inv.transpose()).eval() / Scalar(2);
    return from_matrix(x.algebra, inv);
}

// P(c)x = 2 c∘(c∘x) − c²∘x
template <typename Scalar>
Element<Scalar> quadratic(const Element<Scalar>& c, const Element<Scalar>& x) {
    return jordan_product(c, jordan_product(c, x)) * Scalar(2) - jordan_product(square(c), x);
}

template <typename Scalar>
Element<Scalar> conj(const Element<Scalar>& x) {
    return {x.algebra, x.coords.conjugate()};
}

inline ComplexElement complexify(const RealElement& x) {
    return {x.algebra, x.coords.cast<cplx>()};
}

inline RealElement real_part(const ComplexElement& z) { return {z.algebra, z.coords.real()}; }
inline RealElement imag_part(const ComplexElement& z) { return {z.algebra, z.coords.imag()}; }

inline RealElement spin_element(std::initializer_list<double> v) {
    Vec<double> c(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double t : v) c[i++] = t;
    return {Algebra::spin(static_cast<int>(v.size())), c};
}

// Primitive idempotent (1/2)(1, u) of the spin factor, |u| = 1.
RealElement spin_idempotent(const Vec<double>& u);

struct JordanFrame {
    Algebra algebra;
    std::vector<RealElement> idempotents;
};

// Validates the frame invariants; throws invalid_argument on failure.
JordanFrame make_frame(const Algebra& a, std::vector<RealElement> idempotents);
// Diagonal matrix units, or (1/2)(1, ±e_1) for the spin factor.
JordanFrame standard_frame(const Algebra& a);
// Frame whose first idempotent is the given primitive c1.
JordanFrame frame_from(const RealElement& c1);

struct PeirceSplit {
    RealElement c, x1, x_half, x0;
};

std::vector<double> principal_minors(const RealElement& x, const JordanFrame& frame);
bool cone_contains(const RealElement& x, const JordanFrame& frame);
bool cone_contains(const RealElement& x);
bool is_idempotent(const RealElement& c, double tol = 1e-10);
bool primitive_idempotent_check(const RealElement& c, double tol = 1e-10);
PeirceSplit peirce_decompose(const RealElement& x, const RealElement& c);

struct FillResult {
    enum class Status { Found, NotFillable, Exceeded };
    Status status;
    double radius = 0; // valid for Found
};

double default_r_max(const RealElement& xi);
FillResult filling_radius(const RealElement& xi, const RealElement& c1, double r_max);
inline FillResult filling_radius(const RealElement& xi, const RealElement& c1) {
    return filling_radius(xi, c1, default_r_max(xi));
}

double det_identity_residual(const RealElement& xi, double R, const RealElement& c1);

struct SlicePair {
    bool ambient;
    bool rank2;
};
SlicePair slice_test(const RealElement& xi, const JordanFrame& frame);

} // namespace conemult
