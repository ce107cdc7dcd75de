#include <doctest.h>

#include "conemult/besicovitch.hpp"

#include <random>

using namespace conemult;

namespace {

// Sutherland–Hodgman clip of convex polygons; returns the intersection area.
double convex_intersection_area(std::vector<Vector2d> subject, const std::array<Vector2d, 4>& clip) {
    for (int e = 0; e < 4; ++e) {
        const Vector2d a = clip[e], b = clip[(e + 1) % 4];
        auto inside = [&](const Vector2d& p) { return (b - a).x() * (p - a).y() - (b - a).y() * (p - a).x() >= 0; };
        std::vector<Vector2d> out;
        for (std::size_t i = 0; i < subject.size(); ++i) {
            const Vector2d p = subject[i], q = subject[(i + 1) % subject.size()];
            const bool ip = inside(p), iq = inside(q);
            if (ip) out.push_back(p);
            if (ip != iq) {
                const Vector2d d = q - p, ab = b - a;
                const double t = (ab.x() * (a - p).y() - ab.y() * (a - p).x()) / (ab.x() * d.y() - ab.y() * d.x());
                out.push_back(p + t * d);
            }
        }
        subject = out;
        if (subject.empty()) return 0;
    }
    double area = 0;
    for (std::size_t i = 0; i < subject.size(); ++i) {
        const auto& p = subject[i];
        const auto& q = subject[(i + 1) % subject.size()];
        area += p.x() * q.y() - q.x() * p.y();
    }
    return std::abs(area) / 2;
}

Rect2 random_rect(std::mt19937_64& g) {
    std::uniform_real_distribution<double> ud(-1, 1);
    const double th = 3.2 * ud(g);
    return {Vector2d(ud(g), ud(g)), Vector2d(std::cos(th), std::sin(th)), 0.3 + std::abs(ud(g)), 0.05 + 0.5 * std::abs(ud(g))};
}

Box3 random_box(std::mt19937_64& g) {
    std::uniform_real_distribution<double> ud(-1, 1);
    Eigen::Matrix3d m;
    for (int i = 0; i < 9; ++i) m(i) = ud(g);
    Eigen::HouseholderQR<Eigen::Matrix3d> qr(m);
    Eigen::Matrix3d q = qr.householderQ();
    return {Vector3d(ud(g), ud(g), ud(g)), q, Vector3d(0.1 + 0.4 * std::abs(ud(g)), 0.1 + 0.4 * std::abs(ud(g)), 0.05 + 0.2 * std::abs(ud(g)))};
}

} // namespace

TEST_SUITE("besicovitch") {

TEST_CASE("level 1 family") {
    auto fam = build_perron_rectangles(1);
    CHECK(fam.N == 2);
    CHECK(fam.rects.size() == 2);
    CHECK(translates_disjoint(fam));
    double s = 0;
    for (const auto& r : fam.translates()) s += r.area();
    CHECK(s == 1.0);
}

TEST_CASE("family invariants for every level") {
    for (int k = 0; k <= kMaxLevel; ++k) {
        CAPTURE(k);
        auto fam = build_perron_rectangles(k);
        CHECK(fam.N == (1 << k));
        double s = 0;
        for (const auto& r : fam.rects) s += r.area();
        CHECK(s == 1.0);
        for (const auto& c : family_check(fam)) {
            CAPTURE(c.name);
            CHECK(c.pass);
        }
    }
    CHECK_THROWS_AS(build_perron_rectangles(13), std::invalid_argument);
    CHECK_THROWS_AS(build_perron_rectangles(-1), std::invalid_argument);
}

TEST_CASE("construction is deterministic") {
    CHECK(to_json(build_perron_rectangles(7)).dump() == to_json(build_perron_rectangles(7)).dump());
}

TEST_CASE("union measure of a unit square") {
    Rect2 sq{Vector2d(0.3, -0.2), Vector2d(std::cos(0.4), std::sin(0.4)), 1.0, 1.0};
    const double h = std::ldexp(1.0, -10);
    auto m = union_measure(std::vector<Rect2>{sq}, h);
    CHECK(m.error_bound == doctest::Approx(8 * h));
    CHECK(std::abs(m.measure - 1.0) <= m.error_bound);
}

TEST_CASE("union measure of disjoint translates is additive") {
    auto fam = build_perron_rectangles(2);
    auto m = union_measure(fam.translates(), std::ldexp(1.0, -12));
    CHECK(std::abs(m.measure - 1.0) <= m.error_bound);
}

TEST_CASE("union measure against exact clipping for two rectangles") {
    std::mt19937_64 g(1);
    for (int t = 0; t < 30; ++t) {
        Rect2 a = random_rect(g), b = random_rect(g);
        const auto ca = a.corners();
        const double inter = convex_intersection_area({ca.begin(), ca.end()}, b.corners());
        const double exact = a.area() + b.area() - inter;
        auto m = union_measure(std::vector<Rect2>{a, b}, std::ldexp(1.0, -11));
        CHECK(std::abs(m.measure - exact) <= m.error_bound);
    }
}

TEST_CASE("union shrinks from level 3 to level 6") {
    const double h = std::ldexp(1.0, -12);
    auto m3 = union_measure(build_perron_rectangles(3), h);
    auto m6 = union_measure(build_perron_rectangles(6), h);
    CHECK(m6.measure < m3.measure);
    CHECK(m6.upper() < m3.measure - m3.error_bound);
}

TEST_CASE("level 8 union is small") {
    auto m = union_measure(build_perron_rectangles(8), std::ldexp(1.0, -12));
    CHECK(m.upper() < 0.35);
}

TEST_CASE("raster and Monte Carlo agree") {
    for (int k : {3, 6}) {
        auto fam = build_perron_rectangles(k);
        auto m = union_measure(fam, std::ldexp(1.0, -12));
        auto mc = union_measure_mc(fam.rects, 400000, 17);
        CAPTURE(k);
        CHECK(std::abs(m.measure - mc.value) <= m.error_bound + 3 * mc.stderr_);
    }
}

TEST_CASE("rectangle overlap predicate") {
    Rect2 a{Vector2d(0, 0), Vector2d(1, 0), 1, 0.1};
    CHECK(rects_overlap(a, a));
    CHECK_FALSE(rects_overlap(a, a.translated(Vector2d(0, 0.1)))); // touching edges
    CHECK(rects_overlap(a, a.translated(Vector2d(0, 0.09))));
    CHECK_FALSE(pairwise_disjoint(std::vector<Rect2>{a, a}));

    // agrees with exact clipping on random pairs
    std::mt19937_64 g(2);
    int disagreements = 0;
    for (int t = 0; t < 2000; ++t) {
        Rect2 p = random_rect(g), q = random_rect(g);
        const auto cp = p.corners();
        const double inter = convex_intersection_area({cp.begin(), cp.end()}, q.corners());
        if (inter > 1e-9) disagreements += !rects_overlap(p, q);
        if (inter == 0) disagreements += rects_overlap(p, q);
    }
    CHECK(disagreements == 0);
}

TEST_CASE("box overlap predicate agrees with point sampling") {
    std::mt19937_64 g(3);
    std::uniform_real_distribution<double> ud(-1, 1);
    int false_disjoint = 0, overlaps = 0;
    for (int t = 0; t < 300; ++t) {
        Box3 a = random_box(g), b = random_box(g);
        const bool sat = boxes_overlap(a, b);
        bool witness = false;
        for (int s = 0; s < 4000 && !witness; ++s) {
            Vector3d p = a.center + a.axes * Vector3d(ud(g) * a.half[0], ud(g) * a.half[1], ud(g) * a.half[2]);
            witness = b.contains(p);
        }
        if (witness && !sat) ++false_disjoint;
        overlaps += sat;
    }
    CHECK(false_disjoint == 0);
    CHECK(overlaps > 10);

    Box3 unit{Vector3d::Zero(), Matrix3d::Identity(), Vector3d(0.5, 0.5, 0.5)};
    CHECK(boxes_overlap(unit, unit));
    CHECK_FALSE(boxes_overlap(unit, unit.translated(Vector3d(1, 0, 0))));
    const Matrix3d rz = Eigen::AngleAxisd(M_PI / 4, Vector3d::UnitZ()).toRotationMatrix();
    Box3 diamond{Vector3d(0.5 + 0.5 * std::sqrt(2.0) + 0.01, 0, 0), rz, Vector3d(0.5, 0.5, 0.5)};
    CHECK_FALSE(boxes_overlap(unit, diamond));
    CHECK(boxes_overlap(unit, diamond.translated(Vector3d(-0.02, 0, 0))));
    CHECK(boxes_overlap(unit, unit.translated(Vector3d(0.8, 0.1, 0))));
}

TEST_CASE("translates of the level 8 family are disjoint") {
    CHECK(translates_disjoint(build_perron_rectangles(8)));
}

TEST_CASE("boxes from a family") {
    for (int k : {0, 1, 4}) {
        auto bf = build_boxes(build_perron_rectangles(k));
        const double N = bf.N;
        double sum = 0;
        for (const auto& b : bf.boxes) {
            CHECK(b.E.volume() == doctest::Approx(1 / N).epsilon(1e-14));
            CHECK(std::abs(b.F.volume() - 1 / (2 * N)) <= 1e-12);
            const Matrix3d g = b.F.axes.transpose() * b.F.axes;
            CHECK((g - Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
            for (const auto& v : b.F.vertices()) CHECK(b.E.contains(v, 1e-12));
            sum += b.Ft.volume();
        }
        CHECK(std::abs(sum - 0.5) <= 1e-12);
    }
}

TEST_CASE("box geometry check") {
    for (int k : {1, 8}) {
        auto bf = build_boxes(build_perron_rectangles(k));
        for (const auto& c : box_geometry_check(bf)) {
            CAPTURE(k);
            CAPTURE(c.name);
            CAPTURE(c.detail);
            CHECK(c.pass);
        }
        CHECK(union_measure(bf, std::ldexp(1.0, -10)).measure ==
              doctest::Approx(union_measure(build_perron_rectangles(k), std::ldexp(1.0, -10)).measure));
    }
}

TEST_CASE("geometry check flags a broken family") {
    auto bf = build_boxes(build_perron_rectangles(2));
    bf.boxes[1].Ft = bf.boxes[0].Ft;
    auto checks = box_geometry_check(bf);
    CHECK_FALSE(all_pass(checks));
}

TEST_CASE("serialization") {
    auto fam = build_perron_rectangles(3);
    auto j = to_json(fam);
    CHECK(j["N"] == 8);
    CHECK(j["rects"].size() == 8);
    CHECK(j["shift"] == 5.0);
    auto bj = to_json(build_boxes(fam));
    CHECK(bj["boxes"].size() == 8);
    auto svg = to_svg(fam);
    std::size_t count = 0, pos = 0;
    while ((pos = svg.find("<polygon", pos)) != std::string::npos) {
        ++count;
        ++pos;
    }
    CHECK(count == 16);
}

} // TEST_SUITE
