#include "splintcad/bvh.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace splintcad {

namespace {
constexpr uint32_t kLeafSize = 4;

Aabb triangle_box(const TriangleMesh& m, uint32_t tri) {
    Aabb b;
    for (int k = 0; k < 3; ++k) b.expand(m.triangle_vertex(tri, k));
    return b;
}
}  // namespace

Bvh::Bvh(const TriangleMesh& mesh) : mesh_(&mesh) {
    if (mesh.empty()) throw std::invalid_argument("Bvh: empty mesh");
    uint32_t n = static_cast<uint32_t>(mesh.triangle_count());
    tri_order_.resize(n);
    std::iota(tri_order_.begin(), tri_order_.end(), 0u);
    centroids_.resize(n);
    for (uint32_t i = 0; i < n; ++i) centroids_[i] = mesh.centroid_of(i);
    nodes_.reserve(2 * n);
    build(0, n);
}

int32_t Bvh::build(uint32_t first, uint32_t count) {
    int32_t idx = static_cast<int32_t>(nodes_.size());
    nodes_.emplace_back();
    Aabb box;
    for (uint32_t i = first; i < first + count; ++i) {
        box.expand(triangle_box(*mesh_, tri_order_[i]));
    }
    nodes_[static_cast<size_t>(idx)].box = box;

    if (count <= kLeafSize) {
        nodes_[static_cast<size_t>(idx)].first = first;
        nodes_[static_cast<size_t>(idx)].count = count;
        return idx;
    }

    Vec3 ext = box.extent();
    int axis = 0;
    if (ext.y() > ext.x()) axis = 1;
    if (ext.z() > ext[axis]) axis = 2;

    uint32_t mid = first + count / 2;
    std::nth_element(tri_order_.begin() + first, tri_order_.begin() + mid,
                     tri_order_.begin() + first + count, [&](uint32_t a, uint32_t b) {
                         if (centroids_[a][axis] != centroids_[b][axis])
                             return centroids_[a][axis] < centroids_[b][axis];
                         return a < b;
                     });

    int32_t l = build(first, mid - first);
    int32_t r = build(mid, first + count - mid);
    nodes_[static_cast<size_t>(idx)].left = l;
    nodes_[static_cast<size_t>(idx)].right = r;
    return idx;
}

Bvh::NearestResult Bvh::nearest(const Vec3& p) const {
    NearestResult best;
    nearest_rec(0, p, best);
    return best;
}

void Bvh::nearest_rec(int32_t node, const Vec3& p, NearestResult& best) const {
    const Node& n = nodes_[static_cast<size_t>(node)];
    if (n.box.distance_sq(p) >= best.distance * best.distance) return;
    if (n.left < 0) {
        for (uint32_t i = n.first; i < n.first + n.count; ++i) {
            uint32_t tri = tri_order_[i];
            auto [a, b, c] = mesh_->triangle_points(tri);
            Vec3 q = closest_point_on_triangle(p, a, b, c);
            double d = (p - q).norm();
            // Tie-break on triangle id for deterministic results.
            if (d < best.distance || (d == best.distance && tri < best.triangle)) {
                best.distance = d;
                best.point = q;
                best.triangle = tri;
            }
        }
        return;
    }
    double dl = nodes_[static_cast<size_t>(n.left)].box.distance_sq(p);
    double dr = nodes_[static_cast<size_t>(n.right)].box.distance_sq(p);
    if (dl <= dr) {
        nearest_rec(n.left, p, best);
        nearest_rec(n.right, p, best);
    } else {
        nearest_rec(n.right, p, best);
        nearest_rec(n.left, p, best);
    }
}

std::vector<Bvh::RayHit> Bvh::ray_hits(const Vec3& origin, const Vec3& dir) const {
    std::vector<RayHit> hits;
    Vec3 inv_dir;
    for (int k = 0; k < 3; ++k) {
        inv_dir[k] = (dir[k] != 0.0) ? 1.0 / dir[k] : kInf;
    }
    auto slab_hit = [&](const Aabb& b) {
        double tmin = 0.0, tmax = kInf;
        for (int k = 0; k < 3; ++k) {
            double t1 = (b.lo[k] - origin[k]) * inv_dir[k];
            double t2 = (b.hi[k] - origin[k]) * inv_dir[k];
            if (t1 > t2) std::swap(t1, t2);
            if (dir[k] == 0.0) {
                if (origin[k] < b.lo[k] || origin[k] > b.hi[k]) return false;
                continue;
            }
            tmin = std::max(tmin, t1);
            tmax = std::min(tmax, t2);
            if (tmin > tmax) return false;
        }
        return true;
    };

    std::vector<int32_t> stack{0};
    while (!stack.empty()) {
        const Node& n = nodes_[static_cast<size_t>(stack.back())];
        stack.pop_back();
        if (!slab_hit(n.box)) continue;
        if (n.left < 0) {
            for (uint32_t i = n.first; i < n.first + n.count; ++i) {
                uint32_t tri = tri_order_[i];
                auto [a, b, c] = mesh_->triangle_points(tri);
                if (auto t = ray_triangle(origin, dir, a, b, c)) {
                    hits.push_back({*t, tri});
                }
            }
        } else {
            stack.push_back(n.right);
            stack.push_back(n.left);
        }
    }
    std::sort(hits.begin(), hits.end(), [](const RayHit& a, const RayHit& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.triangle < b.triangle;
    });
    return hits;
}

void Bvh::collect_overlaps(const Aabb& box, double margin, std::vector<uint32_t>& out) const {
    std::vector<int32_t> stack{0};
    while (!stack.empty()) {
        const Node& n = nodes_[static_cast<size_t>(stack.back())];
        stack.pop_back();
        if (!n.box.overlaps(box, margin)) continue;
        if (n.left < 0) {
            for (uint32_t i = n.first; i < n.first + n.count; ++i) out.push_back(tri_order_[i]);
        } else {
            stack.push_back(n.right);
            stack.push_back(n.left);
        }
    }
}

bool Bvh::against(const Bvh& other, double tol,
                  std::vector<std::pair<uint32_t, uint32_t>>* pairs,
                  size_t max_pairs) const {
    bool found = false;
    std::vector<uint32_t> candidates;
    for (uint32_t i = 0; i < mesh_->triangle_count(); ++i) {
        Aabb box = triangle_box(*mesh_, i);
        candidates.clear();
        other.collect_overlaps(box, tol, candidates);
        if (candidates.empty()) continue;
        std::sort(candidates.begin(), candidates.end());
        auto t1 = mesh_->triangle_points(i);
        for (uint32_t j : candidates) {
            auto t2 = other.mesh().triangle_points(j);
            if (triangle_triangle_distance(t1, t2) <= tol) {
                found = true;
                if (!pairs) return true;
                pairs->emplace_back(i, j);
                if (pairs->size() >= max_pairs) return true;
            }
        }
    }
    return found;
}

}  // namespace splintcad
