#include "conemult/besicovitch.hpp"
#include "conemult/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace conemult {

std::array<Vector2d, 4> Rect2::corners() const {
    const Vector2d a = 0.5 * length * dir, b = 0.5 * width * normal();
    return {center - a - b, center + a - b, center + a + b, center - a + b};
}

bool Rect2::contains(const Vector2d& p) const {
    const Vector2d d = p - center;
    return std::abs(d.dot(dir)) <= 0.5 * length && std::abs(d.dot(normal())) <= 0.5 * width;
}

std::vector<Rect2> RectangleFamily::translates() const {
    std::vector<Rect2> out;
    out.reserve(rects.size());
    for (int j = 0; j < N; ++j) out.push_back(translate(j));
    return out;
}

std::array<Vector3d, 8> Box3::vertices() const {
    std::array<Vector3d, 8> v;
    for (int m = 0; m < 8; ++m) {
        Vector3d s((m & 1) ? 1 : -1, (m & 2) ? 1 : -1, (m & 4) ? 1 : -1);
        v[m] = center + axes * s.cwiseProduct(half);
    }
    return v;
}

bool Box3::contains(const Vector3d& p, double slack) const {
    const Vector3d q = local(p);
    for (int i = 0; i < 3; ++i)
        if (std::abs(q[i]) > half[i] + slack) return false;
    return true;
}

namespace {

// Horizontal shifts of the elementary triangles. Adjacent groups are merged pairwise;
// the right group slides left until its heart overlaps the left one by a fraction alpha.
std::vector<double> perron_shifts(int k, double base, double alpha) {
    const int N = 1 << k;
    const double beta = base / N;
    std::vector<double> s(N, 0.0);
    struct Group { int lo, hi; double L, R; };
    std::vector<Group> groups;
    for (int j = 0; j < N; ++j) groups.push_back({j, j + 1, j * beta, (j + 1) * beta});
    while (groups.size() > 1) {
        std::vector<Group> next;
        for (std::size_t g = 0; g + 1 < groups.size(); g += 2) {
            const Group& a = groups[g];
            const Group& b = groups[g + 1];
            const double C = (a.R - a.L) + (b.R - b.L);
            const double t = (a.R - b.L) - (1 - alpha) * C;
            for (int j = b.lo; j < b.hi; ++j) s[j] += t;
            next.push_back({a.lo, b.hi, a.L, a.L + alpha * C});
        }
        groups = std::move(next);
    }
    return s;
}

} // namespace

RectangleFamily build_perron_rectangles(int k, double shift) {
    if (k < 0 || k > kMaxLevel) throw std::invalid_argument("level k must be in [0, 12]");
    constexpr double base = 1.0, height = 3.0;
    const double alpha = 1.0 - 1.0 / (2.0 + k / 4.0);
    RectangleFamily fam;
    fam.k = k;
    fam.N = 1 << k;
    fam.shift = shift;
    const double beta = base / fam.N;
    const auto s = perron_shifts(k, base, alpha);
    const Vector2d apex(base / 2, height);
    for (int j = 0; j < fam.N; ++j) {
        const Vector2d mid((j + 0.5) * beta, 0.0);
        const Vector2d u = (apex - mid).normalized();
        const Vector2d foot = mid + Vector2d(s[j], 0.0);
        fam.rects.push_back({foot + 0.5 * u, u, 1.0, 1.0 / fam.N});
    }
    if (!translates_disjoint(fam))
        throw ConstructionFailed("translated rectangles overlap at level " + std::to_string(k));
    return fam;
}

namespace {

struct Bounds {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    void add(const Vector2d& p) {
        x0 = std::min(x0, p.x());
        x1 = std::max(x1, p.x());
        y0 = std::min(y0, p.y());
        y1 = std::max(y1, p.y());
    }
};

Bounds bounds_of(const std::vector<Rect2>& rects) {
    Bounds b;
    for (const auto& r : rects)
        for (const auto& c : r.corners()) b.add(c);
    return b;
}

// x-range where a*x + b lies in [-s, s]; empty if lo > hi.
void clip_slab(double a, double b, double s, double& lo, double& hi) {
    if (std::abs(a) < 1e-300) {
        if (std::abs(b) > s) { lo = 1; hi = 0; }
        return;
    }
    double l = (-s - b) / a, r = (s - b) / a;
    if (l > r) std::swap(l, r);
    lo = std::max(lo, l);
    hi = std::min(hi, r);
}

} // namespace

Measure union_measure(const std::vector<Rect2>& rects, double h) {
    if (!(h > 0)) throw std::invalid_argument("resolution must be positive");
    if (rects.empty()) return {0, 0};
    const Bounds bb = bounds_of(rects);
    const double x0 = std::floor(bb.x0 / h) * h;
    const double y0 = std::floor(bb.y0 / h) * h;
    const long rows = static_cast<long>(std::ceil((bb.y1 - y0) / h)) + 1;

    struct Span { double y0, y1; };
    std::vector<Span> spans;
    double perimeter = 0;
    for (const auto& r : rects) {
        Bounds b;
        for (const auto& c : r.corners()) b.add(c);
        spans.push_back({b.y0, b.y1});
        perimeter += r.perimeter();
    }

    long long cells = 0;
#pragma omp parallel
    {
        std::vector<std::pair<double, double>> iv;
        iv.reserve(rects.size());
#pragma omp for reduction(+ : cells) schedule(static)
        for (long i = 0; i < rows; ++i) {
            const double y = y0 + (i + 0.5) * h;
            iv.clear();
            for (std::size_t j = 0; j < rects.size(); ++j) {
                if (y < spans[j].y0 || y > spans[j].y1) continue;
                const Rect2& r = rects[j];
                const Vector2d n = r.normal();
                double lo = -std::numeric_limits<double>::infinity(), hi = -lo;
                // p = (x, y): (p - c)·d = d.x * x + (y - c.y) d.y - c.x d.x
                clip_slab(r.dir.x(), (y - r.center.y()) * r.dir.y() - r.center.x() * r.dir.x(), 0.5 * r.length, lo, hi);
                clip_slab(n.x(), (y - r.center.y()) * n.y() - r.center.x() * n.x(), 0.5 * r.width, lo, hi);
                if (lo <= hi) iv.emplace_back(lo, hi);
            }
            if (iv.empty()) continue;
            std::sort(iv.begin(), iv.end());
            double a = iv[0].first, b = iv[0].second;
            auto count = [&](double l, double r) {
                const long long m0 = static_cast<long long>(std::ceil((l - x0) / h - 0.5));
                const long long m1 = static_cast<long long>(std::floor((r - x0) / h - 0.5));
                return m1 >= m0 ? m1 - m0 + 1 : 0;
            };
            long long row = 0;
            for (std::size_t t = 1; t < iv.size(); ++t) {
                if (iv[t].first <= b) {
                    b = std::max(b, iv[t].second);
                } else {
                    row += count(a, b);
                    a = iv[t].first;
                    b = iv[t].second;
                }
            }
            row += count(a, b);
            cells += row;
        }
    }
    return {static_cast<double>(cells) * h * h, 2.0 * perimeter * h};
}

Measure union_measure(const RectangleFamily& family, double h) {
    return union_measure(family.rects, h);
}

static Rect2 project_yz(const Box3& E) {
    // E's first axis is e1; the other two span the (y, z) plane
    const Vector2d u = E.axes.col(1).tail<2>();
    return {E.center.tail<2>(), u, 2 * E.half[1], 2 * E.half[2]};
}

Measure union_measure(const BoxFamily& boxes, double h) {
    std::vector<Rect2> rects;
    for (const auto& b : boxes.boxes) rects.push_back(project_yz(b.E));
    return union_measure(rects, h);
}

McEstimate union_measure_mc(const std::vector<Rect2>& rects, std::uint64_t samples, std::uint64_t seed) {
    const Bounds bb = bounds_of(rects);
    const double area = (bb.x1 - bb.x0) * (bb.y1 - bb.y0);
    const CounterRng rng(seed, 0x756e696f6eULL);
    long long hits = 0;
#pragma omp parallel for reduction(+ : hits) schedule(static)
    for (long long i = 0; i < static_cast<long long>(samples); ++i) {
        const Vector2d p(bb.x0 + (bb.x1 - bb.x0) * rng.uniform(2 * i), bb.y0 + (bb.y1 - bb.y0) * rng.uniform(2 * i + 1));
        for (const auto& r : rects)
            if (r.contains(p)) {
                ++hits;
                break;
            }
    }
    const double f = static_cast<double>(hits) / samples;
    return {area * f, area * std::sqrt(f * (1 - f) / samples)};
}

namespace {

bool separated_on(const std::array<Vector2d, 4>& A, const std::array<Vector2d, 4>& B, const Vector2d& axis) {
    double a0 = std::numeric_limits<double>::infinity(), a1 = -a0, b0 = a0, b1 = -a0;
    for (const auto& p : A) {
        a0 = std::min(a0, p.dot(axis));
        a1 = std::max(a1, p.dot(axis));
    }
    for (const auto& p : B) {
        b0 = std::min(b0, p.dot(axis));
        b1 = std::max(b1, p.dot(axis));
    }
    const double tol = 1e-12 * (1 + std::max(std::abs(a1), std::abs(b1)));
    return a1 <= b0 + tol || b1 <= a0 + tol;
}

} // namespace

bool rects_overlap(const Rect2& a, const Rect2& b) {
    const auto A = a.corners(), B = b.corners();
    for (const Vector2d& ax : {a.dir, a.normal(), b.dir, b.normal()})
        if (separated_on(A, B, ax)) return false;
    return true;
}

bool boxes_overlap(const Box3& a, const Box3& b) {
    const Vector3d d = b.center - a.center;
    auto separated = [&](const Vector3d& L) {
        const double len = L.norm();
        if (len < 1e-9) return false; // parallel edge pair, covered by face axes
        double ra = 0, rb = 0;
        for (int i = 0; i < 3; ++i) {
            ra += a.half[i] * std::abs(a.axes.col(i).dot(L));
            rb += b.half[i] * std::abs(b.axes.col(i).dot(L));
        }
        return std::abs(d.dot(L)) >= ra + rb - 1e-12 * len * (1 + d.norm());
    };
    for (int i = 0; i < 3; ++i) {
        if (separated(a.axes.col(i)) || separated(b.axes.col(i))) return false;
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (separated(a.axes.col(i).cross(b.axes.col(j)))) return false;
    return true;
}

template <typename Shape, typename Overlap, typename Extent>
static bool all_pairs_disjoint(const std::vector<Shape>& s, Overlap overlap, Extent extent) {
    // sweep on the first coordinate, then exact SAT
    std::vector<std::pair<double, double>> ext(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) ext[i] = extent(s[i]);
    std::vector<std::size_t> order(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ext[a].first < ext[b].first; });
    for (std::size_t a = 0; a < order.size(); ++a)
        for (std::size_t b = a + 1; b < order.size(); ++b) {
            if (ext[order[b]].first > ext[order[a]].second) break;
            if (overlap(s[order[a]], s[order[b]])) return false;
        }
    return true;
}

bool pairwise_disjoint(const std::vector<Rect2>& rects) {
    return all_pairs_disjoint(rects, rects_overlap, [](const Rect2& r) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& c : r.corners()) {
            lo = std::min(lo, c.x());
            hi = std::max(hi, c.x());
        }
        return std::make_pair(lo, hi);
    });
}

bool pairwise_disjoint(const std::vector<Box3>& boxes) {
    return all_pairs_disjoint(boxes, boxes_overlap, [](const Box3& b) {
        double r = 0;
        for (int i = 0; i < 3; ++i) r += b.half[i] * std::abs(b.axes(1, i));
        return std::make_pair(b.center.y() - r, b.center.y() + r);
    });
}

bool translates_disjoint(const RectangleFamily& family) {
    return pairwise_disjoint(family.translates());
}

bool translates_disjoint(const BoxFamily& boxes) {
    std::vector<Box3> ft;
    for (const auto& b : boxes.boxes) ft.push_back(b.Ft);
    return pairwise_disjoint(ft);
}

BoxFamily build_boxes(const RectangleFamily& family) {
    BoxFamily out;
    out.k = family.k;
    out.N = family.N;
    out.shift = family.shift;
    out.rects = family.rects;
    const double s2 = std::sqrt(2.0);
    for (const auto& r : family.rects) {
        const Vector2d u = r.dir, up = r.normal();
        BoxTriple t;
        const Vector3d c(0.5, r.center.x(), r.center.y());
        Matrix3d ea;
        ea.col(0) = Vector3d(1, 0, 0);
        ea.col(1) = Vector3d(0, u.x(), u.y());
        ea.col(2) = Vector3d(0, up.x(), up.y());
        t.E = {c, ea, Vector3d(0.5, 0.5 * r.length, 0.5 * r.width)};
        // F = (0, c_j) + λ1 (1,−u) + λ2 (1,u) + λ3 (0,u⊥), λ1, λ2 ∈ [0, 1/2], |λ3| ≤ 1/(2N)
        Matrix3d fa;
        fa.col(0) = Vector3d(1, -u.x(), -u.y()) / s2;
        fa.col(1) = Vector3d(1, u.x(), u.y()) / s2;
        fa.col(2) = ea.col(2);
        t.F = {c, fa, Vector3d(s2 / 4, s2 / 4, 0.5 * r.width)};
        t.n = Vector3d(1, u.x(), u.y());
        t.nt = Vector3d(-1, u.x(), u.y());
        t.Ft = t.F.translated(family.shift * t.nt);
        out.boxes.push_back(t);
    }
    return out;
}

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double orthonormality_defect(const Matrix3d& a) {
    return (a.transpose() * a - Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

} // namespace

std::vector<Check> family_check(const RectangleFamily& fam) {
    std::vector<Check> out;
    bool unit = true, widths = true;
    double area = 0, radius = 0;
    for (const auto& r : fam.rects) {
        unit &= std::abs(r.dir.norm() - 1) <= 1e-12;
        widths &= r.width == 1.0 / fam.N && r.length == 1.0;
        area += r.area();
    }
    for (int j = 0; j < fam.N; ++j)
        for (const Rect2& r : {fam.rects[j], fam.translate(j)})
            for (const auto& c : r.corners()) radius = std::max(radius, c.norm());
    bool distinct = true;
    for (int j = 1; j < fam.N; ++j) distinct &= (fam.rects[j].dir - fam.rects[j - 1].dir).norm() > 0;
    out.push_back({"directions are unit vectors", unit, ""});
    out.push_back({"rectangles are 1 x 1/N", widths, ""});
    out.push_back({"directions distinct", distinct, ""});
    out.push_back({"sum |R_j| = 1", area == 1.0, fmt("%.17g", area)});
    out.push_back({"translates pairwise disjoint", translates_disjoint(fam), ""});
    out.push_back({"R_j and translates inside |x| <= 10", radius <= 10.0, fmt("max |x| = %.6g", radius)});
    return out;
}

std::vector<Check> box_geometry_check(const BoxFamily& bf) {
    std::vector<Check> out;
    const double s2 = std::sqrt(2.0);
    double axes_defect = 0, contain_slack = 0, shift_defect = 0, vol_defect = 0, norm_defect = 0, axis_defect = 0,
           radius = 0, proj_defect = 0, vol_sum = 0;
    for (int j = 0; j < static_cast<int>(bf.boxes.size()); ++j) {
        const auto& b = bf.boxes[j];
        for (const Box3* x : {&b.E, &b.F, &b.Ft}) axes_defect = std::max(axes_defect, orthonormality_defect(x->axes));
        for (const auto& v : b.F.vertices()) {
            const Vector3d q = b.E.local(v);
            for (int i = 0; i < 3; ++i) contain_slack = std::min(contain_slack, b.E.half[i] - std::abs(q[i]));
        }
        shift_defect = std::max({shift_defect, (b.Ft.center - b.F.center - bf.shift * b.nt).norm(),
                                 (b.Ft.axes - b.F.axes).cwiseAbs().maxCoeff(), (b.Ft.half - b.F.half).cwiseAbs().maxCoeff()});
        vol_defect = std::max(vol_defect, std::abs(b.F.volume() - 1.0 / (2 * bf.N)));
        vol_sum += b.Ft.volume();
        norm_defect = std::max(norm_defect, std::abs(b.nt.norm() - s2));
        double best = 0;
        for (int i = 0; i < 3; ++i) best = std::max(best, std::abs(b.F.axes.col(i).dot(b.nt)) / b.nt.norm());
        axis_defect = std::max(axis_defect, 1 - best);
        for (const Box3* x : {&b.F, &b.Ft})
            for (const auto& v : x->vertices()) radius = std::max(radius, v.norm());
        // the translate of E projects onto the translate of R_j
        const Rect2 p = project_yz(b.E.translated(bf.shift * b.nt));
        const Rect2 q = bf.rects[j].translated(bf.shift * bf.rects[j].dir);
        proj_defect = std::max({proj_defect, (p.center - q.center).norm(), 1 - std::abs(p.dir.dot(q.dir)),
                                std::abs(p.length - q.length), std::abs(p.width - q.width)});
    }
    out.push_back({"box axes orthonormal", axes_defect <= 1e-12, fmt("defect %.3g", axes_defect)});
    out.push_back({"F_j inside E_j", contain_slack >= -1e-12, fmt("min slack %.3g", contain_slack)});
    out.push_back({"F~_j = F_j + 5 n~_j", shift_defect <= 1e-12, fmt("defect %.3g", shift_defect)});
    out.push_back({"vol(F_j) = 1/(2N)", vol_defect <= 1e-12, fmt("defect %.3g", vol_defect)});
    out.push_back({"sum vol(F~_j) = 1/2", std::abs(vol_sum - 0.5) <= 1e-12, fmt("%.17g", vol_sum)});
    out.push_back({"|n~_j| = sqrt 2", norm_defect <= 1e-12, fmt("defect %.3g", norm_defect)});
    out.push_back({"n~_j along an axis of F_j", axis_defect <= 1e-12, fmt("defect %.3g", axis_defect)});
    out.push_back({"F_j, F~_j inside ball of radius 20", radius <= kBallRadius, fmt("max |x| = %.6g", radius)});
    out.push_back({"projection of E~_j is R~_j", proj_defect <= 1e-12, fmt("defect %.3g", proj_defect)});
    const bool boxes_disjoint = translates_disjoint(bf);
    std::vector<Rect2> rt;
    for (const auto& r : bf.rects) rt.push_back(r.translated(bf.shift * r.dir));
    const bool rects_disjoint = pairwise_disjoint(rt);
    out.push_back({"F~_j pairwise disjoint", boxes_disjoint, ""});
    out.push_back({"disjointness agrees with planar translates", boxes_disjoint == rects_disjoint, ""});
    return out;
}

nlohmann::json to_json(const RectangleFamily& fam) {
    nlohmann::json rects = nlohmann::json::array();
    for (const auto& r : fam.rects)
        rects.push_back({{"center", {r.center.x(), r.center.y()}},
                         {"direction", {r.dir.x(), r.dir.y()}},
                         {"length", r.length},
                         {"width", r.width}});
    return {{"format", "conemult.rectangles"}, {"version", 1}, {"k", fam.k}, {"N", fam.N}, {"shift", fam.shift}, {"rects", rects}};
}

static nlohmann::json box_json(const Box3& b) {
    nlohmann::json axes = nlohmann::json::array();
    for (int i = 0; i < 3; ++i) axes.push_back({b.axes(0, i), b.axes(1, i), b.axes(2, i)});
    return {{"center", {b.center.x(), b.center.y(), b.center.z()}}, {"axes", axes}, {"half_extents", {b.half.x(), b.half.y(), b.half.z()}}};
}

nlohmann::json to_json(const BoxFamily& bf) {
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto& b : bf.boxes)
        boxes.push_back({{"E", box_json(b.E)},
                         {"F", box_json(b.F)},
                         {"F_translate", box_json(b.Ft)},
                         {"n", {b.n.x(), b.n.y(), b.n.z()}},
                         {"n_tilde", {b.nt.x(), b.nt.y(), b.nt.z()}}});
    return {{"format", "conemult.boxes"}, {"version", 1}, {"k", bf.k}, {"N", bf.N}, {"shift", bf.shift}, {"boxes", boxes}};
}

std::string to_svg(const RectangleFamily& fam) {
    std::vector<Rect2> all = fam.rects;
    for (const auto& r : fam.translates()) all.push_back(r);
    const Bounds bb = bounds_of(all);
    const double pad = 0.2, scale = 100.0;
    const double w = (bb.x1 - bb.x0 + 2 * pad) * scale, h = (bb.y1 - bb.y0 + 2 * pad) * scale;
    std::ostringstream os;
    auto X = [&](double x) { return fmt("%.4f", (x - bb.x0 + pad) * scale); };
    auto Y = [&](double y) { return fmt("%.4f", (bb.y1 + pad - y) * scale); };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt("%.1f", w) << "\" height=\"" << fmt("%.1f", h)
       << "\" viewBox=\"0 0 " << fmt("%.4f", w) << ' ' << fmt("%.4f", h) << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    auto poly = [&](const Rect2& r, const char* colour) {
        os << "<polygon fill=\"" << colour << "\" fill-opacity=\"0.5\" stroke=\"none\" points=\"";
        bool first = true;
        for (const auto& c : r.corners()) {
            os << (first ? "" : " ") << X(c.x()) << ',' << Y(c.y());
            first = false;
        }
        os << "\"/>\n";
    };
    for (const auto& r : fam.rects) poly(r, "#1f4e9c");
    for (const auto& r : fam.translates()) poly(r, "#c0392b");
    os << "</svg>\n";
    return os.str();
}

} // namespace conemult
