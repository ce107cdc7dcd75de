#include <doctest.h>

#include "conemult/jordan.hpp"
#include "test_util.hpp"

using namespace conemult;
using namespace testutil;

namespace {

RealElement sym2(double a, double b, double d) {
    Mat<double> m(2, 2);
    m << a, b, b, d;
    return from_matrix(Algebra::sym(2), m);
}

RealElement diag(std::initializer_list<double> v) {
    const int r = static_cast<int>(v.size());
    Vec<double> d(r);
    int i = 0;
    for (double t : v) d[i++] = t;
    Mat<double> m = d.asDiagonal();
    return from_matrix(Algebra::sym(r), m);
}

} // namespace

TEST_SUITE("jordan_core") {

TEST_CASE("algebra descriptor dims and ranks") {
    CHECK(Algebra::spin(5).dim() == 5);
    CHECK(Algebra::spin(5).rank() == 2);
    CHECK(Algebra::sym(4).dim() == 10);
    CHECK(Algebra::sym(4).rank() == 4);
    CHECK_THROWS_AS(Algebra::spin(2), std::invalid_argument);
    CHECK_THROWS_AS(Algebra::sym(1), std::invalid_argument);
}

TEST_CASE("jordan product examples") {
    const auto x = spin_element({2, 1, 0});
    const auto e = identity(x.algebra);
    CHECK(norm(jordan_product(e, x) - x) == doctest::Approx(0));

    const auto p = jordan_product(diag({1, 0}), diag({0, 1}));
    CHECK(norm(p) == 0);

    const auto y = spin_element({0, 1, 0});
    CHECK(norm(jordan_product(y, y) - spin_element({1, 0, 0})) == 0);

    CHECK_THROWS_AS(jordan_product(x, diag({1, 0})), std::invalid_argument);
}

TEST_CASE("jordan product is commutative") {
    std::mt19937_64 g(1);
    for (auto a : {Algebra::spin(4), Algebra::sym(3)}) {
        auto x = random_element(a, g), y = random_element(a, g);
        CHECK(norm(jordan_product(x, y) - jordan_product(y, x)) < 1e-14);
    }
}

TEST_CASE("determinant examples") {
    CHECK(determinant(identity(Algebra::spin(3))) == 1);
    CHECK(determinant(identity(Algebra::sym(3))) == doctest::Approx(1).epsilon(1e-15));
    CHECK(determinant(spin_element({2, 1, 0})) == 3);

    // det(R e + x) > 0 for R = 10 and |x| <= 1, checked against the eigenvalue bound
    std::mt19937_64 g(2);
    const Algebra a = Algebra::sym(3);
    for (int t = 0; t < 200; ++t) {
        auto x = random_element(a, g);
        x = x / std::max(1.0, norm(x));
        const auto y = identity(a) * 10.0 + x;
        CHECK(min_eig(y) >= 9.0);
        CHECK(determinant(y) > 0);
    }
}

TEST_CASE("determinant has degree rank") {
    std::mt19937_64 g(3);
    for (auto a : {Algebra::spin(4), Algebra::sym(3)}) {
        auto x = random_element(a, g);
        CHECK(determinant(x * 2.5) == doctest::Approx(std::pow(2.5, a.rank()) * determinant(x)));
    }
}

TEST_CASE("principal minors examples") {
    for (auto a : {Algebra::spin(3), Algebra::sym(3)}) {
        for (double m : principal_minors(identity(a), standard_frame(a))) CHECK(m == doctest::Approx(1));
    }
    auto m2 = principal_minors(diag({1, -1}), standard_frame(Algebra::sym(2)));
    CHECK(m2[0] == doctest::Approx(1));
    CHECK(m2[1] == doctest::Approx(-1));

    // Intrinsic minor: Δ1 is the c1-coefficient of P(c1)x, ⟨x,c1⟩/⟨c1,c1⟩ = (3/2)/(1/2).
    const auto x = spin_element({2, 1, 0});
    Vec<double> u(2);
    u << 1, 0;
    const auto frame = make_frame(x.algebra, {spin_idempotent(u), spin_idempotent(-u)});
    auto ms = principal_minors(x, frame);
    CHECK(ms[0] == doctest::Approx(3));
    CHECK(ms[1] == doctest::Approx(3));

    JordanFrame incomplete{x.algebra, {spin_idempotent(u)}};
    CHECK_THROWS_AS(principal_minors(x, incomplete), std::invalid_argument);
}

TEST_CASE("principal minors of matrices are leading minors in the standard frame") {
    std::mt19937_64 g(4);
    const Algebra a = Algebra::sym(4);
    auto x = random_element(a, g);
    auto ms = principal_minors(x, standard_frame(a));
    Mat<double> X = to_matrix(x);
    for (int l = 1; l <= 4; ++l) CHECK(ms[l - 1] == doctest::Approx(X.topLeftCorner(l, l).determinant()));
}

TEST_CASE("cone membership examples") {
    CHECK(cone_contains(spin_element({2, 1, 0})));
    CHECK_FALSE(cone_contains(spin_element({1, 2, 0})));
    CHECK_FALSE(cone_contains(sym2(1, 3, 1)));
    CHECK(determinant(sym2(1, 3, 1)) == doctest::Approx(-8));
}

TEST_CASE("spin cone membership agrees with the light-cone test") {
    std::mt19937_64 g(5);
    std::uniform_real_distribution<double> ud(-1e-3, 1e-3);
    for (int n : {3, 4, 6}) {
        const Algebra a = Algebra::spin(n);
        const auto frame = frame_from(random_primitive(a, g));
        int disagree = 0;
        for (int t = 0; t < 2000; ++t) {
            auto x = random_element(a, g);
            if (t % 2) {
                // push toward the boundary, keeping distance >= 1e-6
                double r = x.coords.tail(n - 1).norm();
                double d = ud(g);
                if (std::abs(d) < 1e-6) d = 1e-6;
                x[0] = r + d;
            }
            const bool direct = x[0] > x.coords.tail(n - 1).norm();
            disagree += (cone_contains(x, frame) != direct);
        }
        CHECK(disagree == 0);
    }
}

TEST_CASE("peirce decomposition examples") {
    const Algebra a = Algebra::sym(3);
    const auto c = diag({1, 0, 0});
    auto s = peirce_decompose(c, c);
    CHECK(norm(s.x1 - c) < 1e-15);
    CHECK(norm(s.x_half) < 1e-15);
    CHECK(norm(s.x0) < 1e-15);

    RealElement x = zero<double>(a);
    x[sym_index(3, 0, 1)] = 1;
    s = peirce_decompose(x, c);
    CHECK(norm(s.x_half - x) < 1e-15);
    CHECK(norm(s.x1) < 1e-15);
    CHECK(norm(s.x0) < 1e-15);

    // eigenspace dimensions of L(c): count basis images by rank
    Mat<double> B1(a.dim(), a.dim()), Bh(a.dim(), a.dim()), B0(a.dim(), a.dim());
    for (int i = 0; i < a.dim(); ++i) {
        RealElement b = zero<double>(a);
        b[i] = 1;
        auto sp = peirce_decompose(b, c);
        B1.col(i) = sp.x1.coords;
        Bh.col(i) = sp.x_half.coords;
        B0.col(i) = sp.x0.coords;
    }
    auto rank = [](const Mat<double>& m) {
        Eigen::FullPivLU<Mat<double>> lu(m);
        lu.setThreshold(1e-10);
        return lu.rank();
    };
    CHECK(rank(B1) == 1);
    CHECK(rank(Bh) == 2);
    CHECK(rank(B0) == 3);

    CHECK_THROWS_AS(peirce_decompose(x, diag({2, 0, 0})), std::invalid_argument);
}

TEST_CASE("peirce components reassemble and are L(c) eigenvectors") {
    std::mt19937_64 g(6);
    for (auto a : {Algebra::spin(3), Algebra::spin(5), Algebra::sym(2), Algebra::sym(4)}) {
        for (int t = 0; t < 50; ++t) {
            auto c = random_primitive(a, g);
            auto x = random_element(a, g);
            auto s = peirce_decompose(x, c);
            CHECK(norm(s.x1 + s.x_half + s.x0 - x) < 1e-9);
            CHECK(std::abs(inner(s.x1, s.x_half)) < 1e-9);
            CHECK(std::abs(inner(s.x1, s.x0)) < 1e-9);
            CHECK(std::abs(inner(s.x_half, s.x0)) < 1e-9);
            CHECK(norm(jordan_product(c, s.x1) - s.x1) < 1e-9);
            CHECK(norm(jordan_product(c, s.x_half) - s.x_half * 0.5) < 1e-9);
            CHECK(norm(jordan_product(c, s.x0)) < 1e-9);
        }
    }
}

TEST_CASE("primitive idempotent check examples") {
    CHECK(primitive_idempotent_check(diag({1, 0, 0})));
    CHECK_FALSE(primitive_idempotent_check(diag({1, 1, 0})));
    CHECK_FALSE(primitive_idempotent_check(diag({0, 0, 0})));
    CHECK_FALSE(primitive_idempotent_check(diag({2, 0, 0})));
    for (double th : {0.0, 0.3, 1.0, 2.5, 4.0}) {
        CHECK(primitive_idempotent_check(spin_element({0.5, 0.5 * std::cos(th), 0.5 * std::sin(th)})));
    }
    // the spin identity is idempotent but not primitive
    CHECK_FALSE(primitive_idempotent_check(spin_element({1, 0, 0})));
}

TEST_CASE("filling radius examples") {
    const auto e3 = identity(Algebra::sym(3));
    auto r = filling_radius(e3, diag({1, 0, 0}));
    CHECK(r.status == FillResult::Status::Found);
    CHECK(r.radius == 0);

    r = filling_radius(sym2(1, 3, 0), diag({1, 0}));
    REQUIRE(r.status == FillResult::Status::Found);
    CHECK(r.radius == doctest::Approx(9).epsilon(1e-8));
    CHECK(r.radius >= 9.0);

    Vec<double> u(2);
    u << 1, 0;
    const auto c1 = spin_idempotent(u); // (1/2)(1,1,0)
    const auto xi = spin_element({-1, -1, 0.3});
    CHECK(inner(xi, c1) == doctest::Approx(-1));
    CHECK(filling_radius(xi, c1).status == FillResult::Status::NotFillable);

    CHECK_THROWS_AS(filling_radius(xi, spin_element({1, 0, 0})), std::invalid_argument);

    // R_max too small
    r = filling_radius(sym2(1, 3, 0), diag({1, 0}), 5.0);
    CHECK(r.status == FillResult::Status::Exceeded);
}

TEST_CASE("filling radius is the threshold") {
    std::mt19937_64 g(7);
    const auto frame = standard_frame(Algebra::sym(3));
    for (int t = 0; t < 50; ++t) {
        const Algebra a = Algebra::sym(3);
        auto c1 = random_primitive(a, g);
        auto xi = random_element(a, g, 3.0);
        if (inner(xi, c1) <= 0) xi = -xi;
        auto r = filling_radius(xi, c1);
        REQUIRE(r.status == FillResult::Status::Found);
        const auto n = identity(a) - c1;
        CHECK(cone_contains(xi + n * (r.radius + 1e-8), frame));
        INFO("radius " << r.radius);
        const double below = r.radius - 1e-7 * (1 + r.radius);
        if (below > 0) CHECK_FALSE(cone_contains(xi + n * below, frame));
    }
}

TEST_CASE("light-cone filling matches the half-space side of the normal") {
    std::mt19937_64 g(8);
    const Algebra a = Algebra::spin(3);
    for (int t = 0; t < 300; ++t) {
        Vec<double> u = random_unit(2, g);
        auto xi = random_element(a, g, 2.0);
        Vec<double> nt(3);
        nt << -1, u[0], u[1];
        const double side = xi.coords.dot(nt);
        auto r = filling_radius(xi, spin_idempotent(-u));
        if (side < 0) {
            REQUIRE(r.status == FillResult::Status::Found);
            Vec<double> nj(3);
            nj << 1, u[0], u[1];
            // n = e − c1 = (1,u)/2, so ξ + R (1,u) reaches the cone at R = radius / 2
            RealElement y{a, xi.coords + (r.radius / 2 + 1e-8) * nj};
            CHECK(cone_contains(y));
        } else {
            CHECK(r.status == FillResult::Status::NotFillable);
        }
    }
}

TEST_CASE("determinant identity examples") {
    CHECK(det_identity_residual(sym2(2, 1, 0), 1, diag({1, 0})) < 1e-14);
    CHECK(determinant(sym2(2, 1, 1)) == doctest::Approx(2 * (0 + 1 - 0.5)));
    CHECK(det_identity_residual(diag({2, -3, 0.5}), 4, diag({1, 0, 0})) < 1e-14);

    std::mt19937_64 g(9);
    const Algebra a = Algebra::sym(3);
    for (int t = 0; t < 50; ++t) {
        auto c1 = random_primitive(a, g);
        auto xi = random_element(a, g);
        xi = xi + c1 * (1.0 - inner(xi, c1)); // now ⟨ξ,c1⟩ = 1
        CHECK(inner(xi, c1) == doctest::Approx(1));
        const double d = determinant(xi + (identity(a) - c1) * 5.0);
        CHECK(det_identity_residual(xi, 5, c1) < 1e-8 * (1 + std::abs(d)));
    }
    RealElement z = diag({0, 1});
    CHECK_THROWS_AS(det_identity_residual(z, 1, diag({1, 0})), SingularityError);
}

TEST_CASE("determinant identity holds for the spin factor") {
    std::mt19937_64 g(10);
    const Algebra a = Algebra::spin(4);
    for (int t = 0; t < 100; ++t) {
        auto c1 = random_primitive(a, g);
        auto xi = random_element(a, g);
        const double R = 10 * std::abs(random_element(a, g)[0]);
        const double d = determinant(xi + (identity(a) - c1) * R);
        CHECK(det_identity_residual(xi, R, c1) < 1e-8 * (1 + std::abs(d)));
    }
}

TEST_CASE("slice test examples") {
    const Algebra a = Algebra::sym(3);
    const auto frame = standard_frame(a);
    auto p = slice_test(frame.idempotents[0] + frame.idempotents[1], frame);
    CHECK(p.ambient);
    CHECK(p.rank2);
    p = slice_test(diag({1, -1, 0}), frame);
    CHECK_FALSE(p.ambient);
    CHECK_FALSE(p.rank2);

    CHECK_THROWS_AS(slice_test(identity(Algebra::sym(2)), standard_frame(Algebra::sym(2))), std::invalid_argument);
    CHECK_THROWS_AS(slice_test(identity(a), frame), std::invalid_argument);
}

TEST_CASE("slice test agrees with eigenvalue oracles") {
    std::mt19937_64 g(11);
    const Algebra a = Algebra::sym(4);
    const auto frame = standard_frame(a);
    int agree = 0, positive = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        Mat<double> B = Mat<double>::Zero(4, 4);
        std::normal_distribution<double> nd;
        B(0, 0) = nd(g) + 0.5;
        B(1, 1) = nd(g) + 0.5;
        B(0, 1) = B(1, 0) = 0.7 * nd(g);
        auto xi = from_matrix(a, B);
        auto p = slice_test(xi, frame);
        Eigen::SelfAdjointEigenSolver<Mat<double>> amb(B + Mat<double>(Vec<double>((Vec<double>(4) << 0, 0, 1, 1).finished()).asDiagonal()));
        Eigen::SelfAdjointEigenSolver<Mat<double>> blk(B.topLeftCorner(2, 2));
        CHECK(p.ambient == (amb.eigenvalues().minCoeff() > 0));
        CHECK(p.rank2 == (blk.eigenvalues().minCoeff() > 0));
        agree += (p.ambient == p.rank2);
        positive += p.rank2;
    }
    CHECK(agree == trials);
    CHECK(positive > 50);
    CHECK(positive < trials - 50);
}

} // TEST_SUITE
