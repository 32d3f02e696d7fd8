#include "splintcad/marching_cubes.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

namespace splintcad {

namespace {

// Freudenthal decomposition: six tets around the 0-7 diagonal, one per
// axis-insertion order. Corner c encodes (x, y, z) bits as c = x + 2y + 4z.
constexpr std::array<std::array<int, 4>, 6> kTets = {{
    {0, 1, 3, 7},  // x, y, z
    {0, 1, 5, 7},  // x, z, y
    {0, 2, 3, 7},  // y, x, z
    {0, 2, 6, 7},  // y, z, x
    {0, 4, 5, 7},  // z, x, y
    {0, 4, 6, 7},  // z, y, x
}};

Vec3 corner_offset(int c) {
    return Vec3(c & 1 ? 1.0 : 0.0, c & 2 ? 1.0 : 0.0, c & 4 ? 1.0 : 0.0);
}

// Orientation sign of each canonical tet (constant over the lattice).
std::array<double, 6> tet_parity() {
    std::array<double, 6> out{};
    for (size_t t = 0; t < kTets.size(); ++t) {
        Vec3 a = corner_offset(kTets[t][0]);
        Mat3 m;
        m.col(0) = corner_offset(kTets[t][1]) - a;
        m.col(1) = corner_offset(kTets[t][2]) - a;
        m.col(2) = corner_offset(kTets[t][3]) - a;
        out[t] = m.determinant() > 0 ? 1.0 : -1.0;
    }
    return out;
}

}  // namespace

TriangleMesh marching_tets(int nx, int ny, int nz, const Vec3& origin, double step,
                           const std::function<void(int, std::vector<double>&)>& fill_layer) {
    const size_t layer_size = static_cast<size_t>(nx + 1) * (ny + 1);
    std::vector<double> layer0(layer_size), layer1(layer_size);

    std::vector<Vec3> vertices;
    std::vector<TriangleMesh::Triangle> triangles;
    std::unordered_map<uint64_t, uint32_t> edge_vertex;
    edge_vertex.reserve(1 << 16);

    auto point_id = [&](int i, int j, int k) {
        return (static_cast<uint64_t>(k) * (ny + 1) + j) * (nx + 1) + i;
    };
    auto lattice_point = [&](uint64_t id) {
        uint64_t i = id % static_cast<uint64_t>(nx + 1);
        uint64_t rem = id / static_cast<uint64_t>(nx + 1);
        uint64_t j = rem % static_cast<uint64_t>(ny + 1);
        uint64_t k = rem / static_cast<uint64_t>(ny + 1);
        return origin + step * Vec3(static_cast<double>(i), static_cast<double>(j),
                                    static_cast<double>(k));
    };

    const std::array<double, 6> parity = tet_parity();

    fill_layer(0, layer0);
    for (int k = 0; k < nz; ++k) {
        fill_layer(k + 1, layer1);
        auto value_at = [&](int i, int j, int dz) -> double {
            const std::vector<double>& l = dz ? layer1 : layer0;
            return l[static_cast<size_t>(j) * (nx + 1) + i];
        };

        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                double vals[8];
                uint64_t ids[8];
                bool any_in = false, any_out = false;
                for (int c = 0; c < 8; ++c) {
                    int ci = i + (c & 1 ? 1 : 0);
                    int cj = j + (c & 2 ? 1 : 0);
                    int ck = (c & 4 ? 1 : 0);
                    vals[c] = value_at(ci, cj, ck);
                    ids[c] = point_id(ci, cj, k + ck);
                    (vals[c] < 0.0 ? any_in : any_out) = true;
                }
                if (!any_in || !any_out) continue;

                for (size_t t = 0; t < kTets.size(); ++t) {
                    int corner[4];
                    for (int m = 0; m < 4; ++m) corner[m] = kTets[t][m];

                    // Stable partition: inside corners first, tracking swap
                    // parity to keep winding consistent with tet orientation.
                    double flip = parity[t];
                    int inside = 0;
                    for (int m = 0; m < 4; ++m) {
                        if (vals[corner[m]] < 0.0) {
                            int idx = m;
                            while (idx > inside) {
                                std::swap(corner[idx], corner[idx - 1]);
                                flip = -flip;
                                --idx;
                            }
                            ++inside;
                        }
                    }
                    if (inside == 0 || inside == 4) continue;

                    auto edge_point = [&](int a, int b) -> uint32_t {
                        uint64_t ia = ids[a], ib = ids[b];
                        uint64_t key = ia < ib ? (ia << 32 | ib) : (ib << 32 | ia);
                        auto it = edge_vertex.find(key);
                        if (it != edge_vertex.end()) return it->second;
                        double va = vals[a], vb = vals[b];
                        double s = va / (va - vb);
                        s = std::clamp(s, 1e-6, 1.0 - 1e-6);
                        Vec3 pa = lattice_point(ia), pb = lattice_point(ib);
                        uint32_t idx = static_cast<uint32_t>(vertices.size());
                        vertices.push_back(pa + s * (pb - pa));
                        edge_vertex.emplace(key, idx);
                        return idx;
                    };
                    auto emit = [&](uint32_t a, uint32_t b, uint32_t c, bool reversed) {
                        if (a == b || b == c || a == c) return;  // collapsed sliver
                        if (reversed) std::swap(b, c);
                        triangles.push_back({a, b, c});
                    };

                    // For a positively oriented tet (A,B,C,D) with A inside,
                    // (eAB, eAC, eAD) faces outward; other cases follow by
                    // symmetry. flip < 0 reverses the winding.
                    if (inside == 1) {
                        emit(edge_point(corner[0], corner[1]), edge_point(corner[0], corner[2]),
                             edge_point(corner[0], corner[3]), flip < 0);
                    } else if (inside == 3) {
                        emit(edge_point(corner[0], corner[3]), edge_point(corner[1], corner[3]),
                             edge_point(corner[2], corner[3]), flip < 0);
                    } else {
                        uint32_t e02 = edge_point(corner[0], corner[2]);
                        uint32_t e03 = edge_point(corner[0], corner[3]);
                        uint32_t e12 = edge_point(corner[1], corner[2]);
                        uint32_t e13 = edge_point(corner[1], corner[3]);
                        emit(e02, e03, e13, flip < 0);
                        emit(e02, e13, e12, flip < 0);
                    }
                }
            }
        }
        std::swap(layer0, layer1);
    }

    return TriangleMesh(std::move(vertices), std::move(triangles));
}

}  // namespace splintcad
