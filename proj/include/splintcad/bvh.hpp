#pragma once

#include <cstdint>
#include <vector>

#include "splintcad/mesh.hpp"

namespace splintcad {

// Bounding-volume hierarchy over the triangles of one mesh. The mesh must
// outlive the index; both are immutable after construction and safe for
// concurrent queries.
class Bvh {
public:
    struct NearestResult {
        double distance = kInf;
        Vec3 point = Vec3::Zero();  // closest point on the surface
        uint32_t triangle = UINT32_MAX;
    };
    struct RayHit {
        double t;
        uint32_t triangle;
    };

    explicit Bvh(const TriangleMesh& mesh);

    const TriangleMesh& mesh() const { return *mesh_; }

    NearestResult nearest(const Vec3& p) const;

    // All ray/surface hits with t >= 0, sorted ascending by t.
    std::vector<RayHit> ray_hits(const Vec3& origin, const Vec3& dir) const;

    // Triangle ids whose AABB comes within `margin` of box.
    void collect_overlaps(const Aabb& box, double margin,
                          std::vector<uint32_t>& out) const;

    // True if any triangle lies within `tol` of triangle `tri` of `other`
    // (contact counts). Offending pairs appended to `pairs` if non-null.
    bool against(const Bvh& other, double tol,
                 std::vector<std::pair<uint32_t, uint32_t>>* pairs,
                 size_t max_pairs = SIZE_MAX) const;

private:
    struct Node {
        Aabb box;
        int32_t left = -1;   // child index; leaf when left < 0
        int32_t right = -1;
        uint32_t first = 0;  // range into tri_order_ for leaves
        uint32_t count = 0;
    };

    int32_t build(uint32_t first, uint32_t count);
    void nearest_rec(int32_t node, const Vec3& p, NearestResult& best) const;

    const TriangleMesh* mesh_;
    std::vector<Node> nodes_;
    std::vector<uint32_t> tri_order_;
    std::vector<Vec3> centroids_;
};

}  // namespace splintcad
