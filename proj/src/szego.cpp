#include "conemult/szego.hpp"

#include "conemult/quadrature.hpp"
#include "conemult/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace conemult {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx I(0, 1);

double coord_norm(const ComplexElement& w) { return w.coords.norm(); }

void require_spin(const Algebra& a, const char* what) {
    if (!a.is_spin()) throw std::invalid_argument(std::string(what) + " is implemented for the spin factor only");
}

// Unit vector in R^d from a counter-based stream.
Eigen::VectorXd unit_vector(const CounterRng& rng, std::uint64_t base, int d) {
    Eigen::VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = rng.normal(base + i);
    return v / v.norm();
}

// Orthogonal matrix whose first column is d (a Householder reflection).
Eigen::MatrixXd frame_with_first(const Eigen::VectorXd& d) {
    const int m = static_cast<int>(d.size());
    Eigen::VectorXd v = d - Eigen::VectorXd::Unit(m, 0);
    if (v.norm() < 1e-14) return Eigen::MatrixXd::Identity(m, m);
    v.normalize();
    return Eigen::MatrixXd::Identity(m, m) - 2 * v * v.transpose();
}

} // namespace

ComplexElement cayley(const ComplexElement& w) {
    const auto e = identity<cplx>(w.algebra);
    const ComplexElement em = e - w;
    const double thr = 1e-12 * (1 + std::pow(coord_norm(w), w.algebra.rank()));
    if (std::abs(determinant(em)) <= thr) throw SingularityError("w is outside Dom Phi: Delta(e - w) vanishes");
    return I * jordan_product(e + w, inverse(em));
}

ComplexElement cayley_inverse(const ComplexElement& z) {
    const auto e = identity<cplx>(z.algebra);
    const ComplexElement zp = z + I * e;
    const double thr = 1e-12 * (1 + std::pow(coord_norm(z), z.algebra.rank()));
    if (std::abs(determinant(zp)) <= thr) throw SingularityError("z is outside the range of Phi: Delta(z + i e) vanishes");
    return jordan_product(z - I * e, inverse(zp));
}

bool lie_ball_contains(const Eigen::VectorXcd& z) {
    if (z.size() < 3) throw std::invalid_argument("Lie ball needs n >= 3");
    cplx s = 0;
    for (int j = 0; j < z.size(); ++j) s += z[j] * z[j];
    const double s2 = std::norm(s);
    return s2 < 1 && 2 * z.squaredNorm() - 1 < s2;
}

ComplexElement lie_to_spin(const Eigen::VectorXcd& z) {
    const int n = static_cast<int>(z.size());
    Vec<cplx> w = z;
    w.tail(n - 1) *= I;
    return {Algebra::spin(n), w};
}

Eigen::VectorXcd spin_to_lie(const ComplexElement& w) {
    require_spin(w.algebra, "spin_to_lie");
    Eigen::VectorXcd z = w.coords;
    z.tail(z.size() - 1) *= -I;
    return z;
}

double cone_margin(const RealElement& y) {
    if (y.algebra.is_spin()) return y[0] - y.coords.tail(y.algebra.n - 1).norm();
    return Eigen::SelfAdjointEigenSolver<Mat<double>>(to_matrix(y), Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

ConformalReport conformal_consistency_check(int n, long samples, std::uint64_t seed) {
    ConformalReport rep;
    rep.n = n;
    rep.min_forward_margin = std::numeric_limits<double>::infinity();
    const CounterRng rng(seed, 0xc0f1);
    std::uint64_t ctr = 0;
    auto forward = [&](const Eigen::VectorXcd& z) {
        ++rep.forward_samples;
        try {
            const RealElement y = imag_part(cayley(lie_to_spin(z)));
            const double m = cone_margin(y);
            rep.min_forward_margin = std::min(rep.min_forward_margin, m);
            if (!cone_contains(y)) ++rep.forward_failures;
        } catch (const SingularityError&) {
            ++rep.forward_failures;
        }
    };
    while (rep.forward_samples < samples) {
        // uniform in the unit ball of C^n, which contains the Lie ball
        Eigen::VectorXd v = unit_vector(rng, ctr, 2 * n);
        ctr += 2 * n;
        v *= std::pow(rng.uniform(ctr++), 1.0 / (2 * n));
        Eigen::VectorXcd z(n);
        for (int j = 0; j < n; ++j) z[j] = cplx(v[j], v[n + j]);
        if (!lie_ball_contains(z)) continue;
        forward(z);
        if (rep.forward_samples % 10 == 0 && rep.forward_samples < samples) {
            // push the same direction to relative distance 1e-3 from the boundary
            double lo = 1, hi = 1.0 / z.norm();
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (lie_ball_contains(mid * z) ? lo : hi) = mid;
            }
            forward(lo * (1 - 1e-3) * z);
        }
    }
    for (long s = 0; s < samples; ++s) {
        Vec<cplx> zc(n);
        Eigen::VectorXd yp(n - 1);
        for (int j = 0; j < n - 1; ++j) yp[j] = rng.normal(ctr++);
        const double y0 = yp.norm() + 0.01 + 2.99 * rng.uniform(ctr++);
        for (int j = 0; j < n; ++j) zc[j] = cplx(-5 + 10 * rng.uniform(ctr++), j == 0 ? y0 : yp[j - 1]);
        ++rep.reverse_samples;
        try {
            if (!lie_ball_contains(spin_to_lie(cayley_inverse({Algebra::spin(n), zc})))) ++rep.reverse_failures;
        } catch (const SingularityError&) {
            ++rep.reverse_failures;
        }
    }
    return rep;
}

double jacobian_density(const RealElement& x) {
    const auto e = identity<double>(x.algebra);
    return std::pow(determinant(e + square(x)), -static_cast<double>(x.algebra.dim()) / x.algebra.rank());
}

double jacobian_modulus_fd(const ComplexElement& w, double h) {
    const int d = w.algebra.dim();
    Eigen::MatrixXd J(2 * d, 2 * d);
    for (int c = 0; c < 2 * d; ++c) {
        ComplexElement wp = w, wm = w;
        const cplx step = c < d ? cplx(h, 0) : cplx(0, h);
        wp[c % d] += step;
        wm[c % d] -= step;
        const Vec<cplx> diff = (cayley(wp).coords - cayley(wm).coords) / (2 * h);
        J.col(c) << diff.real(), diff.imag();
    }
    return std::sqrt(std::abs(J.determinant()));
}

std::vector<ComplexElement> sample_shilov(int n, long count, double margin, std::uint64_t seed) {
    const CounterRng rng(seed, 0x5b11);
    const auto e = identity<cplx>(Algebra::spin(n));
    std::vector<ComplexElement> out;
    std::uint64_t ctr = 0;
    while (static_cast<long>(out.size()) < count) {
        const Eigen::VectorXd x = unit_vector(rng, ctr, n);
        ctr += n;
        const double th = 2 * kPi * rng.uniform(ctr++);
        const ComplexElement w = lie_to_spin(std::exp(I * th) * x.cast<cplx>());
        if (std::abs(determinant(e - w)) >= margin) out.push_back(w);
    }
    return out;
}

std::pair<double, double> compact_jacobian_bounds(const std::vector<ComplexElement>& K) {
    if (K.empty()) throw std::invalid_argument("empty sample set");
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (const auto& w : K) {
        const auto e = identity<cplx>(w.algebra);
        if (std::abs(determinant(e - w)) < 1e-3) throw std::invalid_argument("sample is within 1e-3 of the singular set of Phi");
        const double v = 1 / jacobian_density(real_part(cayley(w)));
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

KernelSample szego_kernel_quadrature(const ComplexElement& z, const RealElement& u, const KernelOptions& opt) {
    require_spin(z.algebra, "szego_kernel_quadrature");
    const ComplexElement zeta = z - complexify(u);
    const RealElement y = imag_part(zeta);
    if (cone_margin(y) < opt.min_margin) throw std::invalid_argument("Im(z) is too close to the cone boundary");
    const int n = z.algebra.n, m = n - 1;
    const cplx z0 = zeta[0];
    const Eigen::VectorXcd zp = zeta.coords.tail(m);
    const Eigen::VectorXd yp = y.coords.tail(m);
    // the integrand peaks where <y', omega> is smallest; put that direction at the pole
    const Eigen::MatrixXd Q = frame_with_first(yp.norm() > 0 ? Eigen::VectorXd(-yp / yp.norm()) : Eigen::VectorXd::Unit(m, 0));
    const Eigen::VectorXcd a = Q.transpose() * zp; // <zeta', Q w> = <Q^T zeta', w>

    // xi = (rho + t, rho omega): the t integral gives i / (2 pi zeta_0), the rho integral
    // Gamma(n - 1) (-2 pi i c)^{-(n - 1)} with c = zeta_0 + <zeta', omega>
    const cplx pref = I / (2 * kPi * z0) * std::tgamma(n - 1.0);
    auto f = [&](const double* w) {
        cplx c = z0;
        for (int k = 0; k < m; ++k) c += a[k] * w[k];
        const cplx b = -2 * kPi * I * c;
        cplx p = 1;
        for (int k = 0; k < n - 1; ++k) p *= b;
        return 1.0 / p;
    };

    auto level = [&](int K, long& evals) {
        const int nth = m - 2; // polar angles on [0, pi]
        const int nphi = 2 * K;
        std::vector<double> th(K), tw(K);
        const GaussRule gl = nth > 0 ? gauss_legendre(K) : GaussRule{};
        for (int i = 0; i < K && nth > 0; ++i) {
            th[i] = 0.5 * kPi * (gl.nodes[i] + 1);
            tw[i] = 0.5 * kPi * gl.weights[i];
        }
        std::vector<int> idx(std::max(nth, 0), 0);
        cplx sum = 0;
        double w[8];
        while (true) {
            double weight = 1, sprod = 1;
            for (int i = 0; i < nth; ++i) {
                const double t = th[idx[i]];
                w[i] = sprod * std::cos(t);
                weight *= tw[idx[i]] * std::pow(std::sin(t), m - 2 - i);
                sprod *= std::sin(t);
            }
            cplx inner = 0;
            for (int j = 0; j < nphi; ++j) {
                const double ph = 2 * kPi * j / nphi;
                w[m - 2] = sprod * std::cos(ph);
                w[m - 1] = sprod * std::sin(ph);
                inner += f(w);
            }
            sum += weight * inner * (2 * kPi / nphi);
            evals += nphi;
            int i = 0;
            for (; i < nth; ++i) {
                if (++idx[i] < K) break;
                idx[i] = 0;
            }
            if (i == nth) break;
        }
        return sum;
    };

    if (m > 8) throw std::invalid_argument("spin factor dimension too large for the angular rule");
    KernelSample out{z, u, 0, 0, 0, "quadrature"};
    long evals = 0;
    int K = 8;
    cplx prev = pref * level(K, evals);
    while (true) {
        K *= 2;
        const long cost = static_cast<long>(std::pow(K, std::max(m - 2, 0))) * 2 * K;
        if (evals + cost > opt.budget)
            throw BudgetExceeded("kernel quadrature did not reach the tolerance within the evaluation budget", prev,
                                 out.error);
        const cplx cur = pref * level(K, evals);
        out.error = std::abs(cur - prev);
        prev = cur;
        if (out.error <= opt.tol * std::abs(cur)) break;
    }
    out.value = prev;
    out.evaluations = evals;
    return out;
}

double szego_light_cone_constant(int n) {
    const double m = n - 1;
    const double ball = std::pow(kPi, m / 2) / std::tgamma(m / 2 + 1);
    return std::tgamma(n) * ball / std::pow(2 * kPi, n);
}

cplx tube_power(const ComplexElement& zeta, double p) {
    const RealElement x = real_part(zeta), y = imag_part(zeta);
    const int steps = 4096;
    auto D = [&](double s) { return determinant(complexify(y) - I * s * complexify(x)); };
    cplx prev = D(0);
    if (!(prev.real() > 0)) throw std::invalid_argument("Im(zeta) is not in the cone");
    double arg = 0;
    for (int k = 1; k <= steps; ++k) {
        const cplx cur = D(static_cast<double>(k) / steps);
        arg += std::arg(cur / prev);
        prev = cur;
    }
    return std::pow(std::abs(prev), p) * std::exp(I * (p * arg));
}

KernelSample szego_kernel_closed_form(const ComplexElement& z, const RealElement& u) {
    require_spin(z.algebra, "szego_kernel_closed_form");
    const ComplexElement zeta = z - complexify(u);
    const int n = z.algebra.n;
    return {z, u, szego_light_cone_constant(n) * tube_power(zeta, -n / 2.0), 0, 0, "closed_form"};
}

double lie_ball_kernel_modulus(const ComplexElement& w, const ComplexElement& wp) {
    require_spin(w.algebra, "lie_ball_kernel_modulus");
    cplx s = 0;
    for (int j = 0; j < w.algebra.n; ++j) s += w[j] * std::conj(wp[j]);
    const cplx h = 1.0 - 2.0 * s + determinant(w) * std::conj(determinant(wp));
    return std::pow(std::abs(h), -w.algebra.n / 2.0);
}

double kernel_relation_ratio(const ComplexElement& w, const ComplexElement& wp, const KernelOptions& opt) {
    require_spin(w.algebra, "kernel_relation_ratio");
    const auto e = identity<cplx>(w.algebra);
    if (!lie_ball_contains(spin_to_lie(w))) throw std::invalid_argument("w is not in the Lie ball");
    if (std::abs(determinant(e - w)) < 1e-3 || std::abs(determinant(e - wp)) < 1e-3)
        throw std::invalid_argument("sample is within 1e-3 of the boundary of Dom Phi");
    const ComplexElement up = cayley(wp);
    const RealElement u = real_part(up);
    if (imag_part(up).coords.norm() > 1e-8 * (1 + u.coords.norm()))
        throw std::invalid_argument("w' is not on the Shilov boundary");
    const KernelSample st = szego_kernel_quadrature(cayley(w), u, opt);
    const double jw = jacobian_modulus_fd(w), jwp = jacobian_modulus_fd(wp);
    return lie_ball_kernel_modulus(w, wp) / (std::abs(st.value) * std::sqrt(jw * jwp));
}

double szego_kernel_relation_residual(const ComplexElement& w, const ComplexElement& wp, double c0,
                                      const KernelOptions& opt) {
    if (!(c0 > 0)) throw std::invalid_argument("fitted constant must be positive");
    return std::abs(kernel_relation_ratio(w, wp, opt) / c0 - 1);
}

KernelRelationReport kernel_relation_check(int n, int pairs, std::uint64_t seed, const KernelOptions& opt) {
    if (pairs < 2) throw std::invalid_argument("need a fit pair and at least one held-out pair");
    const CounterRng rng(seed, 0x4e1a);
    const auto boundary = sample_shilov(n, pairs, 1e-2, seed);
    std::vector<ComplexElement> inner;
    std::uint64_t ctr = 0;
    while (static_cast<int>(inner.size()) < pairs) {
        Eigen::VectorXcd z(n);
        for (int j = 0; j < n; ++j) {
            z[j] = 0.6 * cplx(2 * rng.uniform(ctr) - 1, 2 * rng.uniform(ctr + 1) - 1);
            ctr += 2;
        }
        if (lie_ball_contains(z)) inner.push_back(lie_to_spin(z));
    }
    KernelRelationReport rep;
    rep.c0 = kernel_relation_ratio(inner[0], boundary[0], opt);
    for (int i = 1; i < pairs; ++i)
        rep.residuals.push_back(szego_kernel_relation_residual(inner[i], boundary[i], rep.c0, opt));
    return rep;
}

} // namespace conemult
