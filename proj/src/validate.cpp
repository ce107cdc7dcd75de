#include "conemult/validate.hpp"

#include "conemult/jordan.hpp"
#include "conemult/multiplier.hpp"
#include "conemult/rng.hpp"
#include "conemult/szego.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace conemult {

namespace {

const cplx I(0, 1);

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

Check make_check(std::string name, bool pass, std::string detail) {
    return {std::move(name), pass, std::move(detail)};
}

long budget(long full, bool fast) { return fast ? std::max(1L, full / 2) : full; }

RealElement random_element(const Algebra& a, RngStream& g, double scale = 1.0) {
    Vec<double> c(a.dim());
    for (int i = 0; i < a.dim(); ++i) c[i] = scale * g.normal();
    return {a, c};
}

Vec<double> random_unit(int d, RngStream& g) {
    Vec<double> u(d);
    for (int i = 0; i < d; ++i) u[i] = g.normal();
    return u / u.norm();
}

RealElement random_primitive(const Algebra& a, RngStream& g) {
    if (a.is_spin()) return spin_idempotent(random_unit(a.n - 1, g));
    const Vec<double> v = random_unit(a.n, g);
    const Mat<double> m = v * v.transpose();
    return from_matrix(a, m);
}

double min_eig(const Mat<double>& m) { return Eigen::SelfAdjointEigenSolver<Mat<double>>(m).eigenvalues().minCoeff(); }

const std::vector<Algebra>& small_algebras() {
    static const std::vector<Algebra> a{Algebra::sym(2), Algebra::sym(3), Algebra::sym(4),
                                        Algebra::spin(3), Algebra::spin(4), Algebra::spin(5)};
    return a;
}

} // namespace

std::vector<Check> validate_jordan(bool fast, std::uint64_t seed) {
    std::vector<Check> out;

    {
        // light-cone predicate, half of the samples pushed to within 1e-3 of the boundary
        RngStream g(seed, 1);
        const long samples = budget(10000, fast);
        long disagree = 0;
        for (long t = 0; t < samples; ++t) {
            const Algebra a = Algebra::spin(3 + static_cast<int>(t % 4));
            const auto frame = frame_from(random_primitive(a, g));
            auto x = random_element(a, g);
            if (t % 2) {
                double d = g.uniform(-1e-3, 1e-3);
                if (std::abs(d) < 1e-6) d = d < 0 ? -1e-6 : 1e-6;
                x[0] = x.coords.tail(a.n - 1).norm() + d;
            }
            const bool direct = x[0] > x.coords.tail(a.n - 1).norm();
            disagree += cone_contains(x, frame) != direct;
        }
        out.push_back(make_check("spin cone_contains agrees with xi_1 > |xi'|", disagree == 0,
                                 std::to_string(disagree) + " of " + std::to_string(samples) + " disagree"));
    }

    {
        RngStream g(seed, 2);
        const long samples = budget(1000, fast);
        double worst = 0;
        for (long t = 0; t < samples; ++t) {
            const Algebra& a = small_algebras()[t % small_algebras().size()];
            const auto c = random_primitive(a, g);
            const auto x = random_element(a, g);
            const auto p = peirce_decompose(x, c);
            double e = norm(p.x1 + p.x_half + p.x0 - x);
            e = std::max(e, std::abs(inner(p.x1, p.x_half)));
            e = std::max(e, std::abs(inner(p.x1, p.x0)));
            e = std::max(e, std::abs(inner(p.x_half, p.x0)));
            e = std::max(e, norm(jordan_product(c, p.x1) - p.x1));
            e = std::max(e, norm(jordan_product(c, p.x_half) - p.x_half * 0.5));
            e = std::max(e, norm(jordan_product(c, p.x0)));
            worst = std::max(worst, e);
        }
        out.push_back(make_check("Peirce components reassemble and are L(c) eigenvectors", worst <= 1e-9,
                                 "worst defect " + fmt(worst)));
    }

    {
        RngStream g(seed, 3);
        const long samples = budget(1000, fast);
        long failures = 0;
        for (long t = 0; t < samples; ++t) {
            const Algebra& a = small_algebras()[t % small_algebras().size()];
            const auto c1 = random_primitive(a, g);
            auto xi = random_element(a, g, 3.0);
            if (inner(xi, c1) <= 0) xi = xi + c1 * (std::abs(inner(xi, c1)) * 2 + 1e-3) / inner(c1, c1);
            const auto r = filling_radius(xi, c1);
            bool ok = r.status == FillResult::Status::Found;
            if (ok) ok = cone_contains(xi + (identity(a) - c1) * (r.radius * (1 + 1e-8) + 1e-8));
            failures += !ok;
        }
        out.push_back(make_check("filling radius found when <xi, c1> > 0", failures == 0,
                                 std::to_string(failures) + " failures in " + std::to_string(samples)));
    }

    {
        RngStream g(seed, 4);
        const long samples = budget(1000, fast);
        long failures = 0;
        for (long t = 0; t < samples; ++t) {
            const Algebra& a = small_algebras()[t % small_algebras().size()];
            auto xi = random_element(a, g, 3.0);
            RealElement c1;
            if (t % 8 == 0) {
                // exactly on the hyperplane <xi, c1> = 0
                c1 = standard_frame(a).idempotents[0];
                if (a.is_spin())
                    xi[1] = -xi[0];
                else
                    xi[0] = 0;
            } else {
                c1 = random_primitive(a, g);
                xi = xi - c1 * ((std::abs(inner(xi, c1)) + inner(xi, c1)) / inner(c1, c1));
            }
            bool ok = filling_radius(xi, c1).status == FillResult::Status::NotFillable;
            const auto n = identity(a) - c1;
            for (double R = 1; R <= 1e6; R *= 10) ok = ok && !cone_contains(xi + n * R);
            failures += !ok;
        }
        out.push_back(make_check("no filling when <xi, c1> <= 0, R in {1, ..., 1e6}", failures == 0,
                                 std::to_string(failures) + " failures in " + std::to_string(samples)));
    }

    {
        // xi + R (1, u) reaches the light cone iff <xi, (-1, u)> < 0
        RngStream g(seed, 5);
        const long samples = budget(1000, fast);
        long failures = 0;
        for (long t = 0; t < samples; ++t) {
            const Algebra a = Algebra::spin(3 + static_cast<int>(t % 3));
            const Vec<double> u = random_unit(a.n - 1, g);
            const auto xi = random_element(a, g, 2.0);
            Vec<double> nt(a.n), nj(a.n);
            nt << -1, u;
            nj << 1, u;
            const double side = xi.coords.dot(nt);
            const auto r = filling_radius(xi, spin_idempotent(-u));
            bool ok;
            if (side < 0) {
                // e - c1 = (1, u) / 2
                ok = r.status == FillResult::Status::Found &&
                     cone_contains(RealElement{a, xi.coords + (r.radius / 2 * (1 + 1e-8) + 1e-8) * nj});
            } else {
                ok = r.status == FillResult::Status::NotFillable;
                for (double R = 1; R <= 1e6; R *= 10) ok = ok && !cone_contains(RealElement{a, xi.coords + R * nj});
            }
            failures += !ok;
        }
        out.push_back(make_check("light-cone filling along (1, u) matches the side of (-1, u)", failures == 0,
                                 std::to_string(failures) + " failures in " + std::to_string(samples)));
    }

    for (const Algebra& a : {Algebra::sym(2), Algebra::sym(3), Algebra::sym(4), Algebra::spin(4)}) {
        RngStream g(seed, 6 + static_cast<std::uint64_t>(a.dim()) * 7 + a.is_spin());
        const long samples = budget(1000, fast);
        double worst = 0;
        for (long t = 0; t < samples; ++t) {
            const auto c1 = random_primitive(a, g);
            auto xi = random_element(a, g);
            if (std::abs(inner(xi, c1)) < 1e-3) xi = xi + c1 * 0.1;
            const double R = g.uniform(0, 10);
            const double d = determinant(xi + (identity(a) - c1) * R);
            worst = std::max(worst, det_identity_residual(xi, R, c1) / (1 + std::abs(d)));
        }
        out.push_back(make_check("determinant identity, " + a.name(), worst <= 1e-8, "worst relative residual " + fmt(worst)));
    }

    {
        RngStream g(seed, 40);
        const long samples = budget(1000, fast);
        const Algebra a = Algebra::sym(4);
        const auto frame = standard_frame(a);
        long disagree = 0;
        for (long t = 0; t < samples; ++t) {
            Mat<double> B = Mat<double>::Zero(4, 4);
            B(0, 0) = g.normal() + 0.5;
            B(1, 1) = g.normal() + 0.5;
            B(0, 1) = B(1, 0) = 0.7 * g.normal();
            const auto p = slice_test(from_matrix(a, B), frame);
            Mat<double> amb = B;
            amb(2, 2) += 1;
            amb(3, 3) += 1;
            const bool oracle_amb = min_eig(amb) > 0;
            const bool oracle_blk = min_eig(B.topLeftCorner(2, 2)) > 0;
            disagree += p.ambient != p.rank2 || p.ambient != oracle_amb || p.rank2 != oracle_blk;
        }
        out.push_back(make_check("slice test agrees with the eigenvalue oracles", disagree == 0,
                                 std::to_string(disagree) + " of " + std::to_string(samples) + " disagree"));
    }
    return out;
}

namespace {

GridFunction random_grid_function(const Lattice& lat, std::uint64_t seed, bool zero_mean) {
    RngStream g(seed, 0);
    GridFunction f(lat);
    cplx mean = 0;
    for (auto& v : f.values) {
        v = cplx(g.normal(), g.normal());
        mean += v;
    }
    mean /= static_cast<double>(f.size());
    if (zero_mean)
        for (auto& v : f.values) v -= mean;
    return f;
}

double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double halfline_oracle_error(int n, double L) {
    const Lattice lat = Lattice::cube(1, n, L);
    GridFunction f = sample(lat, [](const Eigen::VectorXd& x) {
        const double a = std::abs(x[0]);
        return cplx(a < 0.5 ? 1.0 : (a == 0.5 ? 0.5 : 0.0), 0);
    });
    f.support[0] = 0.5;
    FftOptions fo;
    fo.pad[0] = 4;
    const GridFunction g = fft_multiplier_apply(f, MultiplierSymbol::half_line(1), fo);
    std::vector<cplx> a, b;
    for (long i = 0; i < g.size(); ++i) {
        const double t = lat.local(0, static_cast<int>(i));
        if (std::abs(t) < 0.6 || std::abs(t) > 3) continue;
        a.push_back(g.values[i]);
        b.push_back(halfline_projection_1d(-0.5, 0.5, t));
    }
    return relative_l2(a, b);
}

} // namespace

std::vector<Check> validate_engine(bool fast, double boundary_value, std::uint64_t seed) {
    std::vector<Check> out;
    const int n3 = fast ? 12 : 16;
    const Lattice lat = Lattice::cube(3, n3, 2.0);

    auto half_space = [&](const Eigen::Vector3d& n) {
        auto m = MultiplierSymbol::half_space(n);
        m.boundary_value = boundary_value;
        return m;
    };

    {
        const GridFunction f = random_grid_function(lat, seed, false);
        double worst = 0;
        for (const Eigen::Vector3d& n : {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(-1, 0.6, 0.8), Eigen::Vector3d(1, 1, 0)}) {
            const auto a = fft_multiplier_apply(f, half_space(n));
            const auto b = fft_multiplier_apply(f, half_space(-n));
            std::vector<cplx> s(a.values.size());
            for (std::size_t i = 0; i < s.size(); ++i) s[i] = a.values[i] + b.values[i];
            worst = std::max(worst, max_abs_diff(s, f.values));
        }
        out.push_back(make_check("complementary half-space projections sum to the identity", worst < 1e-12,
                                 "max deviation " + fmt(worst)));
    }

    {
        const GridFunction f = random_grid_function(lat, seed + 1, true);
        const auto m = half_space(Eigen::Vector3d(1, std::sqrt(2.0), std::sqrt(3.0)));
        const auto once = fft_multiplier_apply(f, m);
        const auto twice = fft_multiplier_apply(once, m);
        const double d = max_abs_diff(once.values, twice.values);
        out.push_back(make_check("half-space projection is idempotent", d < 1e-12, "max deviation " + fmt(d)));

        FftOptions fo;
        fo.pad = {2, 2, 2, 1};
        auto cone = MultiplierSymbol::cone();
        cone.boundary_value = boundary_value;
        double ratio = 0;
        for (const auto& sym : {cone, m}) ratio = std::max(ratio, fft_multiplier_apply(f, sym, fo).l2_norm() / f.l2_norm());
        out.push_back(make_check("indicator multipliers are L2 contractions", ratio <= 1 + 1e-12,
                                 "largest norm ratio " + fmt(ratio)));
    }

    {
        RngStream g(seed, 2);
        Eigen::Matrix<double, 6, 3> c;
        for (int i = 0; i < c.size(); ++i) c(i) = g.normal();
        auto f = [&](const Eigen::VectorXd& x) {
            cplx s = 0;
            for (int i = 0; i < 6; ++i) s += std::exp(-(x - c.row(i).transpose()).squaredNorm()) * cplx(1, i);
            return s;
        };
        auto cone = MultiplierSymbol::cone();
        cone.boundary_value = boundary_value;
        const int n = fast ? 24 : 32;
        const auto ref = fft_multiplier_apply(sample(Lattice::cube(3, n, 6.0), f), cone);
        double worst = 0;
        for (double lambda : {2.0, 4.0}) {
            const auto fl = sample(Lattice::cube(3, n, 6.0 / lambda), [&](const Eigen::VectorXd& x) { return f(lambda * x); });
            worst = std::max(worst, max_abs_diff(fft_multiplier_apply(fl, cone).values, ref.values));
        }
        out.push_back(make_check("cone multiplier commutes with dilations 2 and 4", worst < 1e-6, "max deviation " + fmt(worst)));
    }

    {
        const double e1 = halfline_oracle_error(1 << 16, 32);
        const double e2 = halfline_oracle_error(1 << 17, 64);
        out.push_back(make_check("1D half-line FFT vs closed form", e1 < 1e-3 && e2 <= 0.5 * e1,
                                 "rel L2 " + fmt(e1) + " at 2^16, " + fmt(e2) + " at 2^17"));
    }

    if (!fast) {
        const auto r = box_image_fft_check(build_boxes(build_perron_rectangles(0)));
        out.push_back(make_check("3D box image FFT vs closed form, k = 0", r.rel_l2 < 5e-3, "rel L2 " + fmt(r.rel_l2)));
    }

    {
        const Lattice lat1 = Lattice::cube(1, 16, 2.0);
        GridFunction phi = sample(lat1, [](const Eigen::VectorXd& x) {
            const double r = x[0] * x[0];
            return cplx(r < 1 ? std::exp(-1 / (1 - r)) : 0.0, 0);
        });
        phi.support[0] = 1;
        const double sep = tensor_extension_check(phi, 1);
        const double broken = tensor_extension_check(phi, 1, 0.5);
        out.push_back(make_check("4D tensor extension is separable", sep < 1e-6 && broken > 1e-3,
                                 "distance " + fmt(sep) + ", tilted normal " + fmt(broken)));
    }
    return out;
}

namespace {

Eigen::VectorXcd random_lie_point(int n, RngStream& g) {
    while (true) {
        Eigen::VectorXcd z(n);
        for (int j = 0; j < n; ++j) z[j] = cplx(g.uniform(-1, 1), g.uniform(-1, 1));
        if (lie_ball_contains(z)) return z;
    }
}

ComplexElement random_tube_point(const Algebra& a, RngStream& g, double xmax) {
    Vec<cplx> c(a.dim());
    if (a.is_spin()) {
        Eigen::VectorXd yp(a.n - 1);
        for (int j = 0; j < a.n - 1; ++j) yp[j] = g.normal();
        c[0] = cplx(g.uniform(-xmax, xmax), yp.norm() + 0.05 + g.uniform());
        for (int j = 1; j < a.n; ++j) c[j] = cplx(g.uniform(-xmax, xmax), yp[j - 1]);
        return {a, c};
    }
    Mat<double> x(a.n, a.n), b(a.n, a.n);
    for (int i = 0; i < x.size(); ++i) {
        x(i) = g.uniform(-1, 1);
        b(i) = g.normal();
    }
    const Mat<double> xs = (x + x.transpose()) * (xmax / (2.0 * a.n));
    const Mat<double> y = b * b.transpose() / a.n + 0.1 * Mat<double>::Identity(a.n, a.n);
    return {a, (from_matrix(a, xs).coords.cast<cplx>() + I * from_matrix(a, y).coords.cast<cplx>()).eval()};
}

// Complex symmetric matrix with operator norm below 0.95.
ComplexElement random_disk_point(const Algebra& a, RngStream& g) {
    Mat<cplx> m(a.n, a.n);
    for (int i = 0; i < m.size(); ++i) m(i) = cplx(g.normal(), g.normal());
    m = (m + m.transpose()).eval();
    const double op = Eigen::JacobiSVD<Mat<cplx>>(m).singularValues()[0];
    m *= 0.95 * g.uniform() / op;
    Vec<cplx> c(a.dim());
    for (int i = 0; i < a.n; ++i)
        for (int j = i; j < a.n; ++j) c[sym_index(a.n, i, j)] = m(i, j);
    return {a, c};
}

} // namespace

std::vector<Check> validate_szego(bool fast, std::uint64_t seed) {
    std::vector<Check> out;

    {
        RngStream g(seed, 1);
        const long samples = budget(1000, fast);
        double worst = 0;
        for (int n : {3, 4, 5})
            for (long s = 0; s < samples; ++s) {
                const auto w = lie_to_spin(random_lie_point(n, g));
                worst = std::max(worst, (cayley_inverse(cayley(w)) - w).coords.norm());
                const auto z = random_tube_point(Algebra::spin(n), g, 5);
                worst = std::max(worst, (cayley(cayley_inverse(z)) - z).coords.norm() / (1 + z.coords.norm()));
            }
        const Algebra M = Algebra::sym(3);
        for (long s = 0; s < samples; ++s) {
            const auto w = random_disk_point(M, g);
            worst = std::max(worst, (cayley_inverse(cayley(w)) - w).coords.norm());
            const auto z = random_tube_point(M, g, 5);
            worst = std::max(worst, (cayley(cayley_inverse(z)) - z).coords.norm() / (1 + z.coords.norm()));
        }
        out.push_back(make_check("Cayley round trip, spin factors 3..5 and Sym(3)", worst < 1e-10, "worst residual " + fmt(worst)));
    }

    for (int n : {3, 4, 5}) {
        const auto r = conformal_consistency_check(n, budget(10000, fast), seed + n);
        const long fails = r.forward_failures + r.reverse_failures;
        out.push_back(make_check("Cayley maps Lie ball and tube onto each other, n = " + std::to_string(n), fails == 0,
                                 std::to_string(fails) + " failures in " + std::to_string(r.forward_samples + r.reverse_samples)));
    }

    {
        RngStream g(seed, 2);
        bool positive = true;
        for (const Algebra& a : small_algebras())
            for (int s = 0; s < 100; ++s) positive = positive && jacobian_density(random_element(a, g, 5.0)) > 0;
        bool unit = true;
        for (const Algebra& a : small_algebras()) unit = unit && jacobian_density(zero<double>(a)) == 1.0;
        out.push_back(make_check("Jacobian density positive, equal to 1 at 0", positive && unit, ""));
    }

    const Algebra A = Algebra::spin(3);
    {
        RngStream g(seed, 3);
        KernelOptions opt;
        opt.tol = 1e-9;
        double worst = 0;
        for (int s = 0; s < (fast ? 3 : 5); ++s) {
            const auto z = random_tube_point(A, g, 2);
            RealElement u{A, Vec<double>(3)}, v{A, Vec<double>(3)};
            for (int i = 0; i < 3; ++i) {
                u[i] = g.normal();
                v[i] = 3 * g.normal();
            }
            const auto k0 = szego_kernel_quadrature(z, u, opt);
            const auto k1 = szego_kernel_quadrature(z + complexify(v), u + v, opt);
            worst = std::max(worst, std::abs(k1.value - k0.value) / std::abs(k0.value));
        }
        out.push_back(make_check("kernel translation covariance", worst <= 1e-6, "worst relative defect " + fmt(worst)));

        const auto base = szego_kernel_quadrature(I * identity<cplx>(A), zero<double>(A), opt).value;
        worst = 0;
        for (double lambda : {0.5, 2.0, 7.0}) {
            const auto k = szego_kernel_quadrature(I * lambda * identity<cplx>(A), zero<double>(A), opt).value;
            worst = std::max(worst, std::abs(k - std::pow(lambda, -3) * base) / std::abs(k));
        }
        out.push_back(make_check("kernel scaling by lambda^{-n}", worst <= 1e-6, "worst relative defect " + fmt(worst)));
    }

    {
        KernelOptions opt;
        opt.tol = 1e-6;
        double worst = 0;
        for (int n : {3, 4}) {
            const Algebra B = Algebra::spin(n);
            RngStream g(seed, 10 + n);
            std::vector<cplx> c;
            for (int s = 0; s < (fast ? 10 : 20); ++s) {
                const auto z = random_tube_point(B, g, 2);
                c.push_back(szego_kernel_quadrature(z, zero<double>(B), opt).value * tube_power(z, n / 2.0));
            }
            cplx mean = 0;
            for (auto v : c) mean += v;
            mean /= static_cast<double>(c.size());
            double var = 0;
            for (auto v : c) var += std::norm(v - mean);
            worst = std::max(worst, std::sqrt(var / (c.size() - 1)) / std::abs(mean));
        }
        out.push_back(make_check("kernel times Delta^{n/2} is constant", worst < 1e-3, "largest CV " + fmt(worst)));
    }

    {
        const auto rep = kernel_relation_check(3, fast ? 6 : 11, seed + 100);
        double worst = 0;
        for (double r : rep.residuals) worst = std::max(worst, r);
        out.push_back(make_check("Lie ball and tube kernels agree up to the Jacobian", !rep.residuals.empty() && worst < 5e-2,
                                 "c0 " + fmt(rep.c0) + ", worst held-out residual " + fmt(worst)));
    }
    return out;
}

} // namespace conemult
