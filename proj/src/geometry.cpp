#include "splintcad/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace splintcad {

Plane::Plane(const Vec3& n, double d) : normal(n), offset(d) {
    double len = normal.norm();
    if (len <= 0.0) throw std::invalid_argument("Plane: zero normal");
    normal /= len;
    offset = d / len;
}

Plane Plane::from_point_normal(const Vec3& point, const Vec3& n) {
    Vec3 u = n.normalized();
    return Plane(u, u.dot(point));
}

void Aabb::expand(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
}

void Aabb::expand(const Aabb& b) {
    lo = lo.cwiseMin(b.lo);
    hi = hi.cwiseMax(b.hi);
}

bool Aabb::overlaps(const Aabb& b, double tol) const {
    for (int k = 0; k < 3; ++k) {
        if (lo[k] > b.hi[k] + tol || b.lo[k] > hi[k] + tol) return false;
    }
    return true;
}

double Aabb::distance_sq(const Vec3& p) const {
    double d2 = 0.0;
    for (int k = 0; k < 3; ++k) {
        double d = std::max({lo[k] - p[k], 0.0, p[k] - hi[k]});
        d2 += d * d;
    }
    return d2;
}

Aabb Aabb::inflated(double m) const {
    Aabb b;
    b.lo = lo - Vec3::Constant(m);
    b.hi = hi + Vec3::Constant(m);
    return b;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        double v = d1 / (d1 - d3);
        return a + v * ab;
    }

    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        double w = d2 / (d2 - d6);
        return a + w * ac;
    }

    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + w * (c - b);
    }

    double denom = 1.0 / (va + vb + vc);
    double v = vb * denom, w = vc * denom;
    return a + ab * v + ac * w;
}

double point_triangle_distance_sq(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    return (p - closest_point_on_triangle(p, a, b, c)).squaredNorm();
}

double segment_segment_distance_sq(const Vec3& p1, const Vec3& q1,
                                   const Vec3& p2, const Vec3& q2) {
    // Ericson 5.1.9
    Vec3 d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    double s = 0.0, t = 0.0;
    const double eps = 1e-30;
    if (a <= eps && e <= eps) {
        return r.squaredNorm();
    }
    if (a <= eps) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        double c = d1.dot(r);
        if (e <= eps) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            double b = d1.dot(d2);
            double denom = a * e - b * b;
            if (denom > eps) {
                s = std::clamp((b * f - c * e) / denom, 0.0, 1.0);
            }
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    Vec3 c1 = p1 + d1 * s;
    Vec3 c2 = p2 + d2 * t;
    return (c1 - c2).squaredNorm();
}

namespace {

// Does segment [p,q] cross triangle (a,b,c)? Boundary hits count.
bool segment_crosses_triangle(const Vec3& p, const Vec3& q,
                              const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 dir = q - p;
    Vec3 e1 = b - a, e2 = c - a;
    Vec3 pv = dir.cross(e2);
    double det = e1.dot(pv);
    if (std::abs(det) < 1e-14) return false;  // parallel; coplanar handled elsewhere
    double inv = 1.0 / det;
    Vec3 tv = p - a;
    double u = tv.dot(pv) * inv;
    if (u < -1e-12 || u > 1.0 + 1e-12) return false;
    Vec3 qv = tv.cross(e1);
    double v = dir.dot(qv) * inv;
    if (v < -1e-12 || u + v > 1.0 + 1e-12) return false;
    double t = e2.dot(qv) * inv;
    return t >= -1e-12 && t <= 1.0 + 1e-12;
}

bool coplanar_overlap(const std::array<Vec3, 3>& t1, const std::array<Vec3, 3>& t2,
                      const Vec3& n) {
    // Project both onto the dominant axis plane and test 2D overlap.
    int drop = 0;
    Vec3 an = n.cwiseAbs();
    if (an.y() > an.x()) drop = 1;
    if (an.z() > an[drop]) drop = 2;
    int i0 = (drop + 1) % 3, i1 = (drop + 2) % 3;

    auto orient = [&](const Vec3& a, const Vec3& b, const Vec3& c) {
        return (b[i0] - a[i0]) * (c[i1] - a[i1]) - (b[i1] - a[i1]) * (c[i0] - a[i0]);
    };
    auto on_segment = [&](const Vec3& a, const Vec3& b, const Vec3& c) {
        // c collinear with ab: does it lie within the bounding range?
        return std::min(a[i0], b[i0]) <= c[i0] && c[i0] <= std::max(a[i0], b[i0]) &&
               std::min(a[i1], b[i1]) <= c[i1] && c[i1] <= std::max(a[i1], b[i1]);
    };
    auto seg2_hit = [&](const Vec3& p, const Vec3& q, const Vec3& r, const Vec3& s) {
        double o1 = orient(p, q, r), o2 = orient(p, q, s);
        double o3 = orient(r, s, p), o4 = orient(r, s, q);
        if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 &&
            o4 != 0)
            return true;
        if (o1 == 0 && on_segment(p, q, r)) return true;
        if (o2 == 0 && on_segment(p, q, s)) return true;
        if (o3 == 0 && on_segment(r, s, p)) return true;
        if (o4 == 0 && on_segment(r, s, q)) return true;
        return false;
    };
    auto point_in = [&](const Vec3& p, const std::array<Vec3, 3>& t) {
        double s1 = orient(t[0], t[1], p);
        double s2 = orient(t[1], t[2], p);
        double s3 = orient(t[2], t[0], p);
        bool has_neg = s1 < 0 || s2 < 0 || s3 < 0;
        bool has_pos = s1 > 0 || s2 > 0 || s3 > 0;
        return !(has_neg && has_pos);
    };

    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (seg2_hit(t1[i], t1[(i + 1) % 3], t2[j], t2[(j + 1) % 3])) return true;
    return point_in(t1[0], t2) || point_in(t2[0], t1);
}

}  // namespace

bool triangles_intersect(const std::array<Vec3, 3>& t1, const std::array<Vec3, 3>& t2) {
    for (int i = 0; i < 3; ++i) {
        if (segment_crosses_triangle(t1[i], t1[(i + 1) % 3], t2[0], t2[1], t2[2])) return true;
        if (segment_crosses_triangle(t2[i], t2[(i + 1) % 3], t1[0], t1[1], t1[2])) return true;
    }
    // Coplanar (or nearly): edge tests above miss parallel configurations.
    Vec3 n1 = (t1[1] - t1[0]).cross(t1[2] - t1[0]);
    double n1n = n1.norm();
    if (n1n < 1e-30) return false;
    n1 /= n1n;
    double d0 = n1.dot(t2[0] - t1[0]);
    double d1 = n1.dot(t2[1] - t1[0]);
    double d2 = n1.dot(t2[2] - t1[0]);
    double scale = 1e-12 * std::max({t1[0].norm(), t1[1].norm(), t2[0].norm(), 1.0});
    if (std::abs(d0) > scale || std::abs(d1) > scale || std::abs(d2) > scale) return false;
    return coplanar_overlap(t1, t2, n1);
}

double triangle_triangle_distance(const std::array<Vec3, 3>& t1,
                                  const std::array<Vec3, 3>& t2) {
    if (triangles_intersect(t1, t2)) return 0.0;
    double d2 = kInf;
    for (int i = 0; i < 3; ++i) {
        d2 = std::min(d2, point_triangle_distance_sq(t1[i], t2[0], t2[1], t2[2]));
        d2 = std::min(d2, point_triangle_distance_sq(t2[i], t1[0], t1[1], t1[2]));
    }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            d2 = std::min(d2, segment_segment_distance_sq(t1[i], t1[(i + 1) % 3],
                                                          t2[j], t2[(j + 1) % 3]));
    return std::sqrt(d2);
}

std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir,
                                   const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 e1 = b - a, e2 = c - a;
    Vec3 pv = dir.cross(e2);
    double det = e1.dot(pv);
    if (std::abs(det) < 1e-14) return std::nullopt;
    double inv = 1.0 / det;
    Vec3 tv = origin - a;
    double u = tv.dot(pv) * inv;
    if (u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
    Vec3 qv = tv.cross(e1);
    double v = dir.dot(qv) * inv;
    if (v < -1e-12 || u + v > 1.0 + 1e-12) return std::nullopt;
    double t = e2.dot(qv) * inv;
    if (t < -1e-12) return std::nullopt;
    return t;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

HeightInterval column_triangle_band(double x, double y,
                                    const Vec3& a, const Vec3& b, const Vec3& c,
                                    double radius) {
    HeightInterval band;
    // Horizontal (2D) distance from the column to the triangle's footprint.
    Vec3 a2(a.x(), a.y(), 0.0), b2(b.x(), b.y(), 0.0), c2(c.x(), c.y(), 0.0);
    Vec3 p2(x, y, 0.0);
    Vec3 q2 = closest_point_on_triangle(p2, a2, b2, c2);
    double rho2 = (p2 - q2).squaredNorm();
    if (rho2 > radius * radius) return band;

    // A z value known to be inside the band: take the triangle point whose
    // footprint realizes the 2D minimum; its height is at 3D distance <= radius.
    double zlo = std::min({a.z(), b.z(), c.z()}) - radius;
    double zhi = std::max({a.z(), b.z(), c.z()}) + radius;
    auto dist = [&](double z) {
        return std::sqrt(point_triangle_distance_sq(Vec3(x, y, z), a, b, c));
    };
    // Seed: closest z on the vertical span, refined by ternary search on the
    // convex distance profile.
    double lo = zlo, hi = zhi;
    for (int it = 0; it < 60; ++it) {
        double m1 = lo + (hi - lo) / 3.0;
        double m2 = hi - (hi - lo) / 3.0;
        if (dist(m1) <= dist(m2)) hi = m2; else lo = m1;
    }
    double zmid = 0.5 * (lo + hi);
    if (dist(zmid) > radius) return band;  // grazing miss at boundary precision

    // Bisect each flank of the convex profile to the radius crossing.
    auto solve = [&](double zin, double zout) {
        for (int it = 0; it < 60; ++it) {
            double m = 0.5 * (zin + zout);
            if (dist(m) <= radius) zin = m; else zout = m;
        }
        return zin;
    };
    band.lo = (dist(zlo) <= radius) ? zlo : solve(zmid, zlo);
    band.hi = (dist(zhi) <= radius) ? zhi : solve(zmid, zhi);
    return band;
}

}  // namespace splintcad
