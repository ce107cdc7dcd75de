#pragma once

#include "conemult/errors.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace conemult {

using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

struct Rect2 {
    Vector2d center;
    Vector2d dir; // long axis, unit
    double length = 1.0;
    double width = 1.0;

    Vector2d normal() const { return {-dir.y(), dir.x()}; }
    std::array<Vector2d, 4> corners() const;
    bool contains(const Vector2d& p) const;
    Rect2 translated(const Vector2d& v) const { return {center + v, dir, length, width}; }
    double area() const { return length * width; }
    double perimeter() const { return 2 * (length + width); }
};

struct RectangleFamily {
    int k = 0;
    int N = 1;
    double shift = 5.0;
    std::vector<Rect2> rects;

    Rect2 translate(int j) const { return rects[j].translated(shift * rects[j].dir); }
    std::vector<Rect2> translates() const;
};

struct Box3 {
    Vector3d center;
    Matrix3d axes; // orthonormal columns
    Vector3d half;

    std::array<Vector3d, 8> vertices() const;
    double volume() const { return 8 * half.prod(); }
    // Box coordinates of p along each axis.
    Vector3d local(const Vector3d& p) const { return axes.transpose() * (p - center); }
    bool contains(const Vector3d& p, double slack = 0.0) const;
    Box3 translated(const Vector3d& v) const { return {center + v, axes, half}; }
};

struct BoxTriple {
    Box3 E, F, Ft;
    Vector3d n;  // (1, u_j)
    Vector3d nt; // (-1, u_j)
};

struct BoxFamily {
    int k = 0;
    int N = 1;
    double shift = 5.0;
    std::vector<Rect2> rects; // the planar family the boxes come from
    std::vector<BoxTriple> boxes;
};

struct Measure {
    double measure;
    double error_bound;
    double upper() const { return measure + error_bound; }
};

constexpr int kMaxLevel = 12;

// Perron-tree family with N = 2^k rectangles; k = 0 gives a single rectangle.
RectangleFamily build_perron_rectangles(int k, double shift = 5.0);

// Scanline raster of the union; counts cell centres of an h-grid inside the union.
Measure union_measure(const std::vector<Rect2>& rects, double h);
Measure union_measure(const RectangleFamily& family, double h);
// Measure of the union of the E_j projected to the last two coordinates (equal to |⋃E_j|).
Measure union_measure(const BoxFamily& boxes, double h);

struct McEstimate {
    double value;
    double stderr_;
};
McEstimate union_measure_mc(const std::vector<Rect2>& rects, std::uint64_t samples, std::uint64_t seed);

// Separating-axis tests on interiors (touching counts as disjoint).
bool rects_overlap(const Rect2& a, const Rect2& b);
bool boxes_overlap(const Box3& a, const Box3& b);
bool pairwise_disjoint(const std::vector<Rect2>& rects);
bool pairwise_disjoint(const std::vector<Box3>& boxes);

bool translates_disjoint(const RectangleFamily& family);
bool translates_disjoint(const BoxFamily& boxes);

BoxFamily build_boxes(const RectangleFamily& family);

constexpr double kBallRadius = 20.0;
std::vector<Check> box_geometry_check(const BoxFamily& boxes);
// Planar invariants: unit directions, widths, total area, disjoint translates, |x| <= 10.
std::vector<Check> family_check(const RectangleFamily& family);

nlohmann::json to_json(const RectangleFamily& family);
nlohmann::json to_json(const BoxFamily& boxes);
std::string to_svg(const RectangleFamily& family);

} // namespace conemult
