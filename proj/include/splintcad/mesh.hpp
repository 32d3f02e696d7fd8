#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "splintcad/geometry.hpp"
#include "splintcad/transform.hpp"

namespace splintcad {

// Indexed triangle surface. Units are millimetres throughout.
class TriangleMesh {
public:
    using Triangle = std::array<uint32_t, 3>;

    TriangleMesh() = default;
    TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles);

    const std::vector<Vec3>& vertices() const { return vertices_; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    std::vector<Vec3>& mutable_vertices() { return vertices_; }

    size_t vertex_count() const { return vertices_.size(); }
    size_t triangle_count() const { return triangles_.size(); }
    bool empty() const { return triangles_.empty(); }

    Vec3 triangle_vertex(size_t tri, int corner) const {
        return vertices_[triangles_[tri][static_cast<size_t>(corner)]];
    }
    std::array<Vec3, 3> triangle_points(size_t tri) const;
    Vec3 face_normal(size_t tri) const;  // unit; (0,0,0) for degenerate
    double area(size_t tri) const;
    Vec3 centroid_of(size_t tri) const;

    // Angle-weighted per-vertex normals; recomputed lazily after edits.
    const std::vector<Vec3>& vertex_normals() const;
    void invalidate_normals() { normals_.clear(); }

    double total_area() const;
    // Signed volume via divergence theorem; meaningful for watertight meshes.
    double signed_volume() const;
    Vec3 centroid() const;  // area-weighted surface centroid
    Aabb bounds() const;

    // Merges vertices within merge_tol, drops zero-area triangles and
    // out-of-range indices. Returns number of triangles dropped.
    size_t cleanup(double merge_tol = 1e-6, double min_area = 1e-10);

    void transform(const RigidTransform& T);

    // Edges of boundary (used by exactly one triangle). Empty for watertight.
    std::vector<std::array<uint32_t, 2>> boundary_edges() const;
    bool is_watertight() const;  // every edge shared by exactly 2 triangles, consistent winding
    int euler_characteristic() const;

    // Partition by shared-edge connectivity, largest first; ties by lowest
    // contained triangle index for determinism.
    std::vector<TriangleMesh> connected_components() const;
    TriangleMesh submesh(const std::vector<uint32_t>& triangle_ids) const;

    void append(const TriangleMesh& other);

private:
    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    mutable std::vector<Vec3> normals_;
};

TriangleMesh apply_transform(const TriangleMesh& mesh, const RigidTransform& T);

}  // namespace splintcad
