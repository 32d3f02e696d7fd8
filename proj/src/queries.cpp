#include "splintcad/queries.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace splintcad {

namespace {

// Barycentric coordinates of p in triangle (a,b,c), clamped to the simplex.
Vec3 barycentric(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 v0 = b - a, v1 = c - a, v2 = p - a;
    double d00 = v0.dot(v0), d01 = v0.dot(v1), d11 = v1.dot(v1);
    double d20 = v2.dot(v0), d21 = v2.dot(v1);
    double denom = d00 * d11 - d01 * d01;
    if (std::abs(denom) < 1e-30) return Vec3(1.0, 0.0, 0.0);
    double v = (d11 * d20 - d01 * d21) / denom;
    double w = (d00 * d21 - d01 * d20) / denom;
    return Vec3(1.0 - v - w, v, w);
}

uint64_t edge_key(uint32_t a, uint32_t b) {
    if (a > b) std::swap(a, b);
    return (uint64_t(a) << 32) | b;
}

}  // namespace

SignedDistanceField::SignedDistanceField(const TriangleMesh& mesh, const Bvh& bvh,
                                         double boundary_band)
    : mesh_(&mesh), bvh_(&bvh), boundary_band_(boundary_band) {
    // Average face normals per undirected edge for edge pseudo-normals.
    std::unordered_map<uint64_t, std::pair<Vec3, int>> acc;
    for (size_t i = 0; i < mesh.triangle_count(); ++i) {
        Vec3 fn = mesh.face_normal(i);
        const auto& t = mesh.triangles()[i];
        for (int k = 0; k < 3; ++k) {
            auto& slot = acc[edge_key(t[static_cast<size_t>(k)], t[(static_cast<size_t>(k) + 1) % 3])];
            slot.first += fn;
            slot.second += 1;
        }
    }
    edge_normals_.resize(mesh.triangle_count() * 3, Vec3::Zero());
    edge_is_boundary_.resize(mesh.triangle_count() * 3, 0);
    for (size_t i = 0; i < mesh.triangle_count(); ++i) {
        const auto& t = mesh.triangles()[i];
        for (int k = 0; k < 3; ++k) {
            const auto& slot = acc[edge_key(t[static_cast<size_t>(k)], t[(static_cast<size_t>(k) + 1) % 3])];
            Vec3 n = slot.first;
            double len = n.norm();
            edge_normals_[i * 3 + static_cast<size_t>(k)] = len > 0 ? Vec3(n / len) : Vec3::Zero();
            if (slot.second == 1) {
                edge_is_boundary_[i * 3 + static_cast<size_t>(k)] = 1;
                const Vec3& pa = mesh.vertices()[t[static_cast<size_t>(k)]];
                const Vec3& pb = mesh.vertices()[t[(static_cast<size_t>(k) + 1) % 3]];
                boundary_edges_.push_back({t[static_cast<size_t>(k)], t[(static_cast<size_t>(k) + 1) % 3]});
                (void)pa;
                (void)pb;
            }
        }
    }
    mesh.vertex_normals();  // precompute
}

SignedDistanceResult SignedDistanceField::evaluate(const Vec3& p) const {
    auto near = bvh_->nearest(p);
    SignedDistanceResult out;
    out.closest = near.point;
    out.triangle = near.triangle;

    const auto& t = mesh_->triangles()[near.triangle];
    auto [a, b, c] = mesh_->triangle_points(near.triangle);
    Vec3 bc = barycentric(near.point, a, b, c);

    const double feat_tol = 1e-9;
    Vec3 normal;
    int zero_count = (bc[0] < feat_tol) + (bc[1] < feat_tol) + (bc[2] < feat_tol);
    if (zero_count == 0) {
        normal = mesh_->face_normal(near.triangle);
    } else if (zero_count == 1) {
        // Edge feature: edge k connects corners k and k+1, opposite corner k+2.
        int opposite = bc[0] < feat_tol ? 0 : (bc[1] < feat_tol ? 1 : 2);
        int k = (opposite + 1) % 3;
        normal = edge_normals_[near.triangle * 3 + static_cast<size_t>(k)];
    } else {
        // Vertex feature.
        int corner = bc[0] >= feat_tol ? 0 : (bc[1] >= feat_tol ? 1 : 2);
        normal = mesh_->vertex_normals()[t[static_cast<size_t>(corner)]];
    }

    Vec3 delta = p - near.point;
    double sign = normal.dot(delta) >= 0.0 ? 1.0 : -1.0;
    out.distance = sign * near.distance;

    if (!boundary_edges_.empty() && boundary_band_ > 0.0) {
        double band2 = boundary_band_ * boundary_band_;
        for (const auto& e : boundary_edges_) {
            const Vec3& pa = mesh_->vertices()[e[0]];
            const Vec3& pb = mesh_->vertices()[e[1]];
            if (point_triangle_distance_sq(near.point, pa, pb, pb) <= band2) {
                out.near_open_boundary = true;
                break;
            }
        }
    }
    return out;
}

double Polyline::length() const {
    double len = 0.0;
    for (size_t i = 0; i + 1 < points.size(); ++i) len += (points[i + 1] - points[i]).norm();
    if (closed && points.size() > 1) len += (points.front() - points.back()).norm();
    return len;
}

std::vector<Polyline> plane_section(const TriangleMesh& mesh, const Plane& plane) {
    struct Seg {
        Vec3 a, b;
    };
    std::vector<Seg> segs;
    std::vector<double> dist(mesh.vertex_count());
    for (size_t i = 0; i < mesh.vertex_count(); ++i) {
        double d = plane.signed_distance(mesh.vertices()[i]);
        // Nudge on-plane vertices to one side so each section edge is emitted
        // exactly once, by the triangle on the other side.
        dist[i] = (std::abs(d) < 1e-12) ? 1e-12 : d;
    }
    for (const auto& t : mesh.triangles()) {
        Vec3 pts[2];
        int np = 0;
        for (int k = 0; k < 3 && np < 2; ++k) {
            uint32_t i0 = t[static_cast<size_t>(k)], i1 = t[(static_cast<size_t>(k) + 1) % 3];
            double d0 = dist[i0], d1 = dist[i1];
            if (d0 * d1 < 0.0) {
                double s = d0 / (d0 - d1);
                pts[np++] = mesh.vertices()[i0] + s * (mesh.vertices()[i1] - mesh.vertices()[i0]);
            }
        }
        // Sub-nanometre slivers come from on-plane vertices; drop them so the
        // chaining sees each section edge once.
        if (np == 2 && (pts[0] - pts[1]).squaredNorm() > 1e-18) {
            segs.push_back({pts[0], pts[1]});
        }
    }

    // Chain segments by quantised endpoints.
    auto key_of = [](const Vec3& p) {
        auto q = [](double x) { return static_cast<int64_t>(std::llround(x * 1e7)); };
        return std::array<int64_t, 3>{q(p.x()), q(p.y()), q(p.z())};
    };
    std::map<std::array<int64_t, 3>, std::vector<size_t>> ends;
    for (size_t i = 0; i < segs.size(); ++i) {
        ends[key_of(segs[i].a)].push_back(i);
        ends[key_of(segs[i].b)].push_back(i);
    }

    std::vector<char> used(segs.size(), 0);
    std::vector<Polyline> out;
    for (size_t start = 0; start < segs.size(); ++start) {
        if (used[start]) continue;
        used[start] = 1;
        Polyline line;
        line.points.push_back(segs[start].a);
        line.points.push_back(segs[start].b);
        // Extend forward from the tail, then backward from the head.
        for (int pass = 0; pass < 2; ++pass) {
            bool extended = true;
            while (extended) {
                extended = false;
                const Vec3& tip = (pass == 0) ? line.points.back() : line.points.front();
                auto it = ends.find(key_of(tip));
                if (it == ends.end()) break;
                for (size_t cand : it->second) {
                    if (used[cand]) continue;
                    Vec3 tip_now = (pass == 0) ? line.points.back() : line.points.front();
                    Vec3 next;
                    if ((segs[cand].a - tip_now).squaredNorm() < 1e-18) {
                        next = segs[cand].b;
                    } else if ((segs[cand].b - tip_now).squaredNorm() < 1e-18) {
                        next = segs[cand].a;
                    } else {
                        continue;
                    }
                    used[cand] = 1;
                    if (pass == 0) {
                        line.points.push_back(next);
                    } else {
                        line.points.insert(line.points.begin(), next);
                    }
                    ends[key_of(next)];  // ensure key exists for the new tip
                    extended = true;
                    break;
                }
            }
        }
        if (line.points.size() > 2 &&
            (line.points.front() - line.points.back()).squaredNorm() < 1e-18) {
            line.points.pop_back();
            line.closed = true;
        }
        out.push_back(std::move(line));
    }
    return out;
}

IntersectionReport meshes_intersect(const TriangleMesh& a, const TriangleMesh& b,
                                    double tolerance, size_t max_pairs) {
    IntersectionReport rep;
    if (a.empty() || b.empty()) return rep;
    Bvh ba(a), bb(b);
    rep.intersecting = ba.against(bb, tolerance, &rep.pairs, max_pairs);
    return rep;
}

double min_mesh_distance(const TriangleMesh& a, const Bvh& bvh_a,
                         const TriangleMesh& b, const Bvh& bvh_b) {
    double best = kInf;
    for (const auto& v : a.vertices()) best = std::min(best, bvh_b.nearest(v).distance);
    for (const auto& v : b.vertices()) best = std::min(best, bvh_a.nearest(v).distance);
    return best;
}

}  // namespace splintcad
