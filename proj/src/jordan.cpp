#include "conemult/jordan.hpp"

#include <cmath>

namespace conemult {

RealElement spin_idempotent(const Vec<double>& u) {
    if (std::abs(u.norm() - 1.0) > 1e-12) throw std::invalid_argument("spin idempotent needs |u| = 1");
    Vec<double> c(u.size() + 1);
    c[0] = 0.5;
    c.tail(u.size()) = 0.5 * u;
    return {Algebra::spin(static_cast<int>(c.size())), c};
}

bool is_idempotent(const RealElement& c, double tol) {
    return norm(square(c) - c) <= tol * std::max(1.0, norm(c));
}

JordanFrame make_frame(const Algebra& a, std::vector<RealElement> idempotents) {
    if (static_cast<int>(idempotents.size()) != a.rank())
        throw std::invalid_argument("frame must have rank(V) idempotents");
    RealElement sum = zero<double>(a);
    for (std::size_t i = 0; i < idempotents.size(); ++i) {
        const auto& ci = idempotents[i];
        if (ci.algebra != a) throw std::invalid_argument("frame idempotent from another algebra");
        if (norm(square(ci) - ci) > 1e-10 * norm(ci)) throw std::invalid_argument("frame element is not idempotent");
        for (std::size_t j = 0; j < i; ++j)
            if (norm(jordan_product(ci, idempotents[j])) > 1e-10)
                throw std::invalid_argument("frame idempotents are not orthogonal");
        sum += ci;
    }
    if (norm(sum - identity(a)) > 1e-10) throw std::invalid_argument("frame does not sum to e");
    return {a, std::move(idempotents)};
}

JordanFrame standard_frame(const Algebra& a) {
    std::vector<RealElement> cs;
    if (a.is_spin()) {
        Vec<double> u = Vec<double>::Zero(a.n - 1);
        u[0] = 1;
        cs.push_back(spin_idempotent(u));
        cs.push_back(spin_idempotent(-u));
    } else {
        for (int i = 0; i < a.n; ++i) {
            RealElement c = zero<double>(a);
            c[sym_index(a.n, i, i)] = 1;
            cs.push_back(c);
        }
    }
    return make_frame(a, std::move(cs));
}

JordanFrame frame_from(const RealElement& c1) {
    if (!primitive_idempotent_check(c1)) throw std::invalid_argument("frame_from needs a primitive idempotent");
    const Algebra& a = c1.algebra;
    if (a.is_spin()) return make_frame(a, {c1, identity(a) - c1});
    // c1 = v v^T; complete v to an orthonormal basis.
    Eigen::SelfAdjointEigenSolver<Mat<double>> es(to_matrix(c1));
    Vec<double> v = es.eigenvectors().col(a.n - 1);
    Eigen::HouseholderQR<Mat<double>> qr(v);
    Mat<double> Q = qr.householderQ();
    std::vector<RealElement> cs;
    for (int i = 0; i < a.n; ++i) {
        Vec<double> q = Q.col(i);
        Mat<double> m = q * q.transpose();
        cs.push_back(from_matrix(a, m));
    }
    cs[0] = c1;
    return make_frame(a, std::move(cs));
}

static void check_frame(const RealElement& x, const JordanFrame& frame) {
    if (frame.algebra != x.algebra) throw std::invalid_argument("frame belongs to another algebra");
    if (static_cast<int>(frame.idempotents.size()) != x.algebra.rank())
        throw std::invalid_argument("incomplete Jordan frame");
}

std::vector<double> principal_minors(const RealElement& x, const JordanFrame& frame) {
    check_frame(x, frame);
    const Algebra& a = x.algebra;
    const int r = a.rank();
    const RealElement e = identity(a);
    std::vector<double> minors(r);
    RealElement c = zero<double>(a);
    for (int l = 0; l < r; ++l) {
        c += frame.idempotents[l];
        if (l == r - 1) {
            minors[l] = determinant(x);
        } else {
            // the subalgebra determinant, extended by the identity on the complement
            minors[l] = determinant(quadratic(c, x) + e - c);
        }
    }
    return minors;
}

bool cone_contains(const RealElement& x, const JordanFrame& frame) {
    for (double m : principal_minors(x, frame))
        if (!(m > 0)) return false;
    return true;
}

bool cone_contains(const RealElement& x) {
    return cone_contains(x, standard_frame(x.algebra));
}

static Mat<double> operator_matrix(const RealElement& c) {
    const Algebra& a = c.algebra;
    Mat<double> P(a.dim(), a.dim());
    for (int i = 0; i < a.dim(); ++i) {
        RealElement b = zero<double>(a);
        b[i] = 1;
        P.col(i) = quadratic(c, b).coords;
    }
    return P;
}

bool primitive_idempotent_check(const RealElement& c, double tol) {
    if (norm(c) <= tol) return false;
    if (!is_idempotent(c, tol)) return false;
    // P(c) projects onto the eigenvalue-1 Peirce space
    Eigen::FullPivLU<Mat<double>> lu(operator_matrix(c));
    lu.setThreshold(1e-8);
    return lu.rank() == 1;
}

PeirceSplit peirce_decompose(const RealElement& x, const RealElement& c) {
    x.check(c);
    if (!primitive_idempotent_check(c)) throw std::invalid_argument("peirce_decompose needs a primitive idempotent");
    const Algebra& a = x.algebra;
    RealElement x1, x0;
    if (a.is_spin()) {
        // V1(c) = R c and V0(c) = R (e - c) for a primitive spin idempotent, both of norm^2 1/2
        const RealElement cc = identity(a) - c;
        x1 = c * (2.0 * inner(x, c));
        x0 = cc * (2.0 * inner(x, cc));
    } else {
        const Mat<double> C = to_matrix(c);
        const Mat<double> D = Mat<double>::Identity(a.n, a.n) - C;
        const Mat<double> X = to_matrix(x);
        Mat<double> m1 = C * X * C, m0 = D * X * D;
        m1 = (m1 + m1.transpose()).eval() / 2;
        m0 = (m0 + m0.transpose()).eval() / 2;
        x1 = from_matrix(a, m1);
        x0 = from_matrix(a, m0);
    }
    return {c, x1, x - x1 - x0, x0};
}

double default_r_max(const RealElement& xi) {
    return 1e6 * (1.0 + norm(xi));
}

FillResult filling_radius(const RealElement& xi, const RealElement& c1, double r_max) {
    xi.check(c1);
    if (!primitive_idempotent_check(c1)) throw std::invalid_argument("filling_radius needs a primitive idempotent");
    if (!(r_max > 0)) throw std::invalid_argument("R_max must be positive");
    using S = FillResult::Status;
    if (inner(xi, c1) <= 0) return {S::NotFillable, 0};
    const JordanFrame frame = standard_frame(xi.algebra);
    const RealElement n = identity(xi.algebra) - c1;
    auto inside = [&](double R) { return cone_contains(xi + n * R, frame); };
    if (inside(0)) return {S::Found, 0};

    double lo = 0, hi = 1e-3 * (1.0 + norm(xi));
    while (!inside(hi)) {
        lo = hi;
        if (hi >= r_max) return {S::Exceeded, 0};
        hi = std::min(2 * hi, r_max);
    }
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (inside(mid) ? hi : lo) = mid;
    }
    return {S::Found, hi};
}

double det_identity_residual(const RealElement& xi, double R, const RealElement& c1) {
    const PeirceSplit s = peirce_decompose(xi, c1);
    const double xc = inner(xi, c1);
    if (xc == 0) throw SingularityError("<xi, c1> = 0 in the determinant identity");
    const double a = xc / inner(c1, c1);
    const Algebra& alg = xi.algebra;
    const RealElement n = identity(alg) - c1;
    // Δ' on V0(c1) is Δ(y + c1)
    const RealElement half_sq_0 = quadratic(n, square(s.x_half));
    const RealElement inner_arg = s.x0 + n * R - half_sq_0 / a;
    const double rhs = a * determinant(inner_arg + c1);
    return std::abs(determinant(xi + n * R) - rhs);
}

SlicePair slice_test(const RealElement& xi, const JordanFrame& frame) {
    check_frame(xi, frame);
    if (xi.algebra.rank() < 3) throw std::invalid_argument("slice_test needs rank >= 3");
    const RealElement& c1 = frame.idempotents[0];
    const RealElement& c2 = frame.idempotents[1];
    const RealElement c12 = c1 + c2;
    if (norm(quadratic(c12, xi) - xi) > 1e-9 * (1.0 + norm(xi)))
        throw std::invalid_argument("element does not lie in the rank-2 subalgebra");
    const RealElement eprime = identity(xi.algebra) - c12;
    const bool ambient = cone_contains(xi + eprime, frame);

    // rank-2 subalgebra as a light cone: ξ = a c1 + d c2 + w, Δ = ad − q(w)
    const double a = inner(xi, c1) / inner(c1, c1);
    const double d = inner(xi, c2) / inner(c2, c2);
    const RealElement w = xi - c1 * a - c2 * d;
    const double q = inner(square(w), c1) / inner(c1, c1);
    const double t = 0.5 * (a + d);
    const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::max(q, 0.0));
    return {ambient, t > rad};
}

} // namespace conemult
