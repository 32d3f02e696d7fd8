#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

namespace splintcad {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Oriented plane: points x with dot(normal, x) == offset lie on it.
struct Plane {
    Vec3 normal{0.0, 0.0, 1.0};
    double offset = 0.0;

    Plane() = default;
    Plane(const Vec3& n, double d);
    static Plane from_point_normal(const Vec3& point, const Vec3& n);

    double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
    Vec3 project(const Vec3& p) const { return p - signed_distance(p) * normal; }
};

struct Aabb {
    Vec3 lo{kInf, kInf, kInf};
    Vec3 hi{-kInf, -kInf, -kInf};

    void expand(const Vec3& p);
    void expand(const Aabb& b);
    Vec3 center() const { return 0.5 * (lo + hi); }
    Vec3 extent() const { return hi - lo; }
    bool empty() const { return lo.x() > hi.x(); }
    bool overlaps(const Aabb& b, double tol = 0.0) const;
    double distance_sq(const Vec3& p) const;
    Aabb inflated(double m) const;
};

// Closest point on triangle (a,b,c) to p. Ericson, Real-Time Collision Detection 5.1.5.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

double point_triangle_distance_sq(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Closest pair of points between two segments p1+s*(q1-p1), p2+t*(q2-p2).
double segment_segment_distance_sq(const Vec3& p1, const Vec3& q1,
                                   const Vec3& p2, const Vec3& q2);

// Minimum distance between two triangles (0 when they intersect or touch).
double triangle_triangle_distance(const std::array<Vec3, 3>& t1,
                                  const std::array<Vec3, 3>& t2);

// Moller 1997 interval test; shared boundary contact counts as intersecting.
bool triangles_intersect(const std::array<Vec3, 3>& t1, const std::array<Vec3, 3>& t2);

// Ray/triangle intersection (Moller-Trumbore), returns parameter t >= 0 along dir.
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir,
                                   const Vec3& a, const Vec3& b, const Vec3& c);

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

// Interval of heights z such that dist((x, y, z), triangle) <= radius.
// Distance along a line to a convex set is convex, so the sublevel set is one
// interval; empty() when the column misses the inflated triangle.
struct HeightInterval {
    double lo = kInf;
    double hi = -kInf;
    bool empty() const { return lo > hi; }
};
HeightInterval column_triangle_band(double x, double y,
                                    const Vec3& a, const Vec3& b, const Vec3& c,
                                    double radius);

}  // namespace splintcad
