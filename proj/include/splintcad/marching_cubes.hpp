#pragma once

#include <functional>

#include "splintcad/mesh.hpp"

namespace splintcad {

// Isosurface extraction at phi = 0 (negative inside) by marching tetrahedra
// on the Freudenthal 6-tet lattice decomposition. The decomposition is
// face-consistent between cells, so the output is closed whenever the field
// is positive on the whole grid boundary. fill_layer(k, values) must write
// the (nx+1)*(ny+1) lattice values of z-layer k, row-major, x fastest.
TriangleMesh marching_tets(int nx, int ny, int nz, const Vec3& origin, double step,
                           const std::function<void(int, std::vector<double>&)>& fill_layer);

}  // namespace splintcad
