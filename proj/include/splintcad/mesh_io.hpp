#pragma once

#include <string>

#include "splintcad/mesh.hpp"

namespace splintcad {

enum class MeshFormat { Auto, StlBinary, StlAscii, PlyBinary, PlyAscii, Obj };

struct LoadStats {
    size_t raw_vertices = 0;
    size_t raw_triangles = 0;
    size_t merged_vertices = 0;
    size_t dropped_triangles = 0;
};

// Loads and cleans a mesh (duplicate vertices within 1e-6 mm merged,
// degenerate triangles dropped). Throws std::runtime_error on unreadable or
// malformed files and on empty results.
TriangleMesh load_mesh(const std::string& path, MeshFormat format = MeshFormat::Auto,
                       LoadStats* stats = nullptr);

// Format Auto picks binary STL/PLY by extension. Throws on empty meshes and
// unwritable paths.
void save_mesh(const TriangleMesh& mesh, const std::string& path,
               MeshFormat format = MeshFormat::Auto);

// PLY with one extra per-vertex float property (deviation maps etc.).
void save_ply_with_scalar(const TriangleMesh& mesh, const std::vector<double>& scalar,
                          const std::string& property_name, const std::string& path);

}  // namespace splintcad
