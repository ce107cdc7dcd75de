#include <doctest.h>

#include "conemult/szego.hpp"

#include <cmath>
#include <random>

using namespace conemult;

namespace {

const cplx I(0, 1);

Eigen::VectorXcd random_lie_point(int n, std::mt19937_64& g, double scale = 1.0) {
    std::uniform_real_distribution<double> ud(-1, 1);
    while (true) {
        Eigen::VectorXcd z(n);
        for (int j = 0; j < n; ++j) z[j] = scale * cplx(ud(g), ud(g));
        if (lie_ball_contains(z)) return z;
    }
}

ComplexElement random_tube_point(const Algebra& a, std::mt19937_64& g, double xmax = 5) {
    std::uniform_real_distribution<double> ud(-1, 1);
    std::normal_distribution<double> nd;
    Vec<cplx> c(a.dim());
    if (a.is_spin()) {
        Eigen::VectorXd yp(a.n - 1);
        for (int j = 0; j < a.n - 1; ++j) yp[j] = nd(g);
        c[0] = cplx(xmax * ud(g), yp.norm() + 0.05 + std::abs(ud(g)));
        for (int j = 1; j < a.n; ++j) c[j] = cplx(xmax * ud(g), yp[j - 1]);
        return {a, c};
    }
    Mat<double> x(a.n, a.n), b(a.n, a.n);
    for (int i = 0; i < x.size(); ++i) {
        x(i) = ud(g);
        b(i) = nd(g);
    }
    Mat<double> xs = (x + x.transpose()) * (xmax / (2.0 * a.n));
    Mat<double> y = b * b.transpose() / a.n + 0.1 * Mat<double>::Identity(a.n, a.n);
    return {a, (from_matrix(a, xs).coords.cast<cplx>() + I * from_matrix(a, y).coords.cast<cplx>()).eval()};
}

// Complex symmetric matrix with operator norm below 1.
ComplexElement random_disk_point(const Algebra& a, std::mt19937_64& g) {
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(0, 0.95);
    Mat<cplx> m(a.n, a.n);
    for (int i = 0; i < m.size(); ++i) m(i) = cplx(nd(g), nd(g));
    m = (m + m.transpose()).eval();
    const double op = Eigen::JacobiSVD<Mat<cplx>>(m).singularValues()[0];
    m *= ud(g) / op;
    Vec<cplx> c(a.dim());
    for (int i = 0; i < a.n; ++i)
        for (int j = i; j < a.n; ++j) c[sym_index(a.n, i, j)] = m(i, j);
    return {a, c};
}

ComplexElement tube(const RealElement& x, const RealElement& y) { return complexify(x) + I * complexify(y); }

} // namespace

TEST_SUITE("szego") {

TEST_CASE("Cayley transform examples") {
    const Algebra A = Algebra::spin(3);
    const auto e = identity<cplx>(A);
    const auto z0 = cayley(zero<cplx>(A));
    CHECK(z0.coords == (I * e).coords);
    const auto z1 = cayley(complexify(spin_element({0.5, 0, 0})));
    CHECK((z1.coords - (3.0 * I * e).coords).norm() < 1e-15);
    CHECK(cayley_inverse(I * e).coords.norm() == 0.0);
    try {
        cayley(e);
        CHECK(false);
    } catch (const SingularityError& err) {
        CHECK(std::string(err.what()).find("Dom Phi") != std::string::npos);
    }
    CHECK_THROWS_AS(cayley_inverse(-I * e), SingularityError);
    // Delta(e - w) = 0 off the scalar line: w = (1/2, 1/2, 0)
    CHECK_THROWS_AS(cayley(complexify(spin_element({0.5, 0.5, 0}))), SingularityError);
}

TEST_CASE("Cayley round trip, spin factor and symmetric matrices") {
    std::mt19937_64 g(11);
    for (int n : {3, 4, 5}) {
        double worst = 0;
        for (int s = 0; s < 1000; ++s) {
            const auto w = lie_to_spin(random_lie_point(n, g));
            worst = std::max(worst, (cayley_inverse(cayley(w)) - w).coords.norm());
            const auto z = random_tube_point(Algebra::spin(n), g);
            worst = std::max(worst, (cayley(cayley_inverse(z)) - z).coords.norm() / (1 + z.coords.norm()));
        }
        CAPTURE(n);
        CHECK(worst < 1e-10);
    }
    const Algebra M = Algebra::sym(3);
    double worst = 0;
    for (int s = 0; s < 1000; ++s) {
        const auto w = random_disk_point(M, g);
        worst = std::max(worst, (cayley_inverse(cayley(w)) - w).coords.norm());
        const auto z = random_tube_point(M, g);
        CHECK(cone_contains(imag_part(z)));
        worst = std::max(worst, (cayley(cayley_inverse(z)) - z).coords.norm() / (1 + z.coords.norm()));
        CHECK(cone_contains(imag_part(cayley(w))));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("Lie ball membership") {
    CHECK(lie_ball_contains(Eigen::VectorXcd::Zero(3)));
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(3);
    e1[0] = 1;
    CHECK_FALSE(lie_ball_contains(e1));
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(3);
    z[0] = 0.9 * I;
    CHECK(lie_ball_contains(z));
    CHECK_THROWS_AS(lie_ball_contains(Eigen::VectorXcd::Zero(2)), std::invalid_argument);
    // coordinates: Delta(w) = sum z_j^2
    std::mt19937_64 g(3);
    const auto zz = random_lie_point(4, g);
    CHECK(std::abs(determinant(lie_to_spin(zz)) - (zz.transpose() * zz)(0)) < 1e-15);
    CHECK((spin_to_lie(lie_to_spin(zz)) - zz).norm() == 0.0);
}

TEST_CASE("conformal consistency") {
    for (int n : {3, 4, 5}) {
        const auto rep = conformal_consistency_check(n, 2000, 42);
        CAPTURE(n);
        CHECK(rep.forward_samples == 2000);
        CHECK(rep.reverse_samples == 2000);
        CHECK(rep.forward_failures == 0);
        CHECK(rep.reverse_failures == 0);
        CHECK(rep.min_forward_margin > 0);
    }
}

TEST_CASE("Jacobian density") {
    const Algebra A = Algebra::spin(3);
    CHECK(jacobian_density(zero<double>(A)) == 1.0);
    CHECK(jacobian_density(spin_element({1, 0, 0})) == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(jacobian_density(zero<double>(Algebra::sym(3))) == 1.0);
    std::mt19937_64 g(5);
    std::normal_distribution<double> nd;
    const double gen = -2.0 * 3 / 2 * 2, cone = -2.0 * 3 / 2;
    for (int s = 0; s < 50; ++s) {
        RealElement v{A, Vec<double>(3)};
        for (int i = 0; i < 3; ++i) v[i] = nd(g);
        v = v / v.coords.norm();
        const double d1 = jacobian_density(10.0 * v), d2 = jacobian_density(1000.0 * v);
        CHECK(d1 > 0);
        CHECK(d2 > 0);
        const double slope = std::log(d2 / d1) / std::log(100.0);
        CHECK(slope >= gen - 0.05);
        CHECK(slope <= cone + 0.05);
    }
    const auto onc = spin_element({1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 0});
    CHECK(std::log(jacobian_density(1000.0 * onc) / jacobian_density(10.0 * onc)) / std::log(100.0) ==
          doctest::Approx(cone).epsilon(1e-3));
}

TEST_CASE("finite-difference Jacobian matches the density on the boundary") {
    for (int n : {3, 4}) {
        const auto K = sample_shilov(n, 12, 1e-2, 9);
        double lo = 1e300, hi = 0;
        for (const auto& w : K) {
            const double r = jacobian_modulus_fd(w) * jacobian_density(real_part(cayley(w)));
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        CAPTURE(n);
        CHECK(hi / lo - 1 < 1e-6);
        CHECK(lo == doctest::Approx(std::pow(2.0, -n)).epsilon(1e-6));
    }
}

TEST_CASE("compact Jacobian bounds") {
    const auto one = sample_shilov(3, 1, 0.1, 1);
    const auto b1 = compact_jacobian_bounds(one);
    CHECK(b1.first == b1.second);
    CHECK(b1.first > 0);

    // w = e^{i theta} e_1 has |Delta(e - w)| = 4 sin^2(theta / 2)
    double prev = 0;
    for (double margin : {1e-1, 1e-2, 1e-3}) {
        std::vector<ComplexElement> K = sample_shilov(3, 50, 0.5, 2);
        const double th = 2 * std::asin(std::sqrt(margin * (1 + 1e-9)) / 2);
        Eigen::VectorXcd z = Eigen::VectorXcd::Zero(3);
        z[0] = std::exp(I * th);
        K.push_back(lie_to_spin(z));
        const auto b = compact_jacobian_bounds(K);
        CHECK(b.first > 0);
        CHECK(b.second / b.first > prev * 10);
        prev = b.second / b.first;
    }
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(3);
    z[0] = std::exp(I * 1e-3);
    CHECK_THROWS_AS(compact_jacobian_bounds({lie_to_spin(z)}), std::invalid_argument);

    const auto a = compact_jacobian_bounds(sample_shilov(3, 4000, 0.1, 3));
    const auto b = compact_jacobian_bounds(sample_shilov(3, 8000, 0.1, 3));
    CHECK(std::abs(b.first / a.first - 1) < 0.05);
    CHECK(std::abs(b.second / a.second - 1) < 0.05);
}

TEST_CASE("light-cone kernel at i e") {
    for (int n : {3, 4, 5}) {
        const Algebra A = Algebra::spin(n);
        const auto k = szego_kernel_quadrature(I * identity<cplx>(A), zero<double>(A));
        CAPTURE(n);
        CHECK(std::abs(k.value - szego_light_cone_constant(n)) < 1e-8 * szego_light_cone_constant(n));
        CHECK(k.error <= 1e-8 * std::abs(k.value));
    }
    CHECK(szego_light_cone_constant(3) == doctest::Approx(1 / (4 * M_PI * M_PI)).epsilon(1e-15));
}

TEST_CASE("kernel covariance identities") {
    const Algebra A = Algebra::spin(3);
    std::mt19937_64 g(8);
    std::normal_distribution<double> nd;
    KernelOptions opt;
    opt.tol = 1e-9;
    for (int s = 0; s < 5; ++s) {
        const auto z = random_tube_point(A, g, 2);
        RealElement u{A, Vec<double>(3)}, v{A, Vec<double>(3)};
        for (int i = 0; i < 3; ++i) {
            u[i] = nd(g);
            v[i] = 3 * nd(g);
        }
        const auto k0 = szego_kernel_quadrature(z, u, opt);
        const auto k1 = szego_kernel_quadrature(z + complexify(v), u + v, opt);
        CHECK(std::abs(k1.value - k0.value) <= 1e-6 * std::abs(k0.value));
    }
    const auto base = szego_kernel_quadrature(I * identity<cplx>(A), zero<double>(A), opt).value;
    for (double lambda : {0.5, 2.0, 7.0}) {
        const auto k = szego_kernel_quadrature(I * lambda * identity<cplx>(A), zero<double>(A), opt).value;
        CHECK(std::abs(k - std::pow(lambda, -3) * base) <= 1e-6 * std::abs(k));
    }
}

TEST_CASE("kernel power law") {
    for (int n : {3, 4}) {
        const Algebra A = Algebra::spin(n);
        std::mt19937_64 g(10 + n);
        KernelOptions opt;
        opt.tol = 1e-6;
        std::vector<cplx> c;
        for (int s = 0; s < 20; ++s) {
            const auto z = random_tube_point(A, g, 2);
            const auto k = szego_kernel_quadrature(z, zero<double>(A), opt);
            c.push_back(k.value * tube_power(z, n / 2.0));
            const auto cf = szego_kernel_closed_form(z, zero<double>(A));
            CHECK(std::abs(cf.value - k.value) <= 1e-5 * std::abs(k.value));
        }
        cplx mean = 0;
        for (auto v : c) mean += v;
        mean /= static_cast<double>(c.size());
        double var = 0;
        for (auto v : c) var += std::norm(v - mean);
        const double cv = std::sqrt(var / (c.size() - 1)) / std::abs(mean);
        CAPTURE(n);
        CHECK(cv < 1e-3);
    }
}

TEST_CASE("kernel preconditions and budget") {
    const Algebra A = Algebra::spin(3);
    const auto z = tube(spin_element({0, 0, 0}), spin_element({1, 0.9995, 0}));
    CHECK_THROWS_AS(szego_kernel_quadrature(z, zero<double>(A)), std::invalid_argument);
    KernelOptions opt;
    opt.budget = 200;
    try {
        szego_kernel_quadrature(tube(spin_element({0, 0, 0}), spin_element({1, 0.998, 0})), zero<double>(A), opt);
        CHECK(false);
    } catch (const BudgetExceeded& b) {
        CHECK(std::abs(b.partial) > 0);
    }
    CHECK_THROWS_AS(szego_kernel_quadrature(complexify(identity<double>(Algebra::sym(2))) * I,
                                            zero<double>(Algebra::sym(2))),
                    std::invalid_argument);
}

TEST_CASE("kernel relation residual") {
    const auto rep = kernel_relation_check(3, 11, 4);
    CHECK(rep.c0 > 0);
    CHECK(rep.residuals.size() == 10);
    for (double r : rep.residuals) CHECK(r < 5e-2);

    std::mt19937_64 g(2);
    const auto w = lie_to_spin(random_lie_point(3, g, 0.6));
    const auto wp = sample_shilov(3, 1, 1e-2, 6)[0];
    const double c0 = kernel_relation_ratio(w, wp);
    CHECK(szego_kernel_relation_residual(w, wp, c0) == 0.0);

    // w close to the boundary of Dom Phi
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(3);
    z[0] = 0.9999;
    CHECK_THROWS_AS(kernel_relation_ratio(lie_to_spin(z), wp), std::invalid_argument);
}

} // TEST_SUITE
