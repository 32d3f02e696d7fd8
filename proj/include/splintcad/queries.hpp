#pragma once

#include <vector>

#include "splintcad/bvh.hpp"
#include "splintcad/mesh.hpp"

namespace splintcad {

struct SignedDistanceResult {
    double distance = 0.0;       // signed; positive on the outward-normal side
    Vec3 closest = Vec3::Zero();
    uint32_t triangle = UINT32_MAX;
    bool near_open_boundary = false;  // closest point within band of a boundary edge
};

// Point-to-surface signed distance. Sign from the angle-weighted pseudo-normal
// of the closest feature, which stays consistent on open scan shells.
class SignedDistanceField {
public:
    SignedDistanceField(const TriangleMesh& mesh, const Bvh& bvh,
                        double boundary_band = 1.0);

    SignedDistanceResult evaluate(const Vec3& p) const;
    double operator()(const Vec3& p) const { return evaluate(p).distance; }

private:
    const TriangleMesh* mesh_;
    const Bvh* bvh_;
    double boundary_band_;
    std::vector<Vec3> edge_normals_;          // per directed slot tri*3+k, averaged face normals
    std::vector<char> edge_is_boundary_;
    std::vector<std::array<uint32_t, 2>> boundary_edges_;
};

// Section polyline in a given plane; closed when the loop wraps around.
struct Polyline {
    std::vector<Vec3> points;
    bool closed = false;
    double length() const;
};

// Exact plane/triangle intersection segments chained into polylines.
std::vector<Polyline> plane_section(const TriangleMesh& mesh, const Plane& plane);

struct IntersectionReport {
    bool intersecting = false;
    std::vector<std::pair<uint32_t, uint32_t>> pairs;  // capped sample of offenders
};

// True iff some triangle of a is within tol of penetrating b (contact counts).
IntersectionReport meshes_intersect(const TriangleMesh& a, const TriangleMesh& b,
                                    double tolerance, size_t max_pairs = 64);

// Minimum vertex-to-surface distance from mesh a's vertices to surface b
// (also checks b's vertices against a so grazing configs are caught).
double min_mesh_distance(const TriangleMesh& a, const Bvh& bvh_a,
                         const TriangleMesh& b, const Bvh& bvh_b);

}  // namespace splintcad
