#include "splintcad/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace splintcad {

namespace {

struct EdgeKey {
    uint32_t a, b;  // a < b
    bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
    bool operator==(const EdgeKey& o) const { return a == o.a && b == o.b; }
};

struct EdgeKeyHash {
    size_t operator()(const EdgeKey& k) const {
        return std::hash<uint64_t>()((uint64_t(k.a) << 32) | k.b);
    }
};

EdgeKey make_edge(uint32_t a, uint32_t b) {
    return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

}  // namespace

TriangleMesh::TriangleMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    for (const auto& t : triangles_) {
        for (uint32_t idx : t) {
            if (idx >= vertices_.size()) {
                throw std::out_of_range("TriangleMesh: triangle index out of range");
            }
        }
    }
}

std::array<Vec3, 3> TriangleMesh::triangle_points(size_t tri) const {
    const Triangle& t = triangles_[tri];
    return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
}

Vec3 TriangleMesh::face_normal(size_t tri) const {
    auto [a, b, c] = triangle_points(tri);
    Vec3 n = (b - a).cross(c - a);
    double len = n.norm();
    return len > 0.0 ? Vec3(n / len) : Vec3::Zero();
}

double TriangleMesh::area(size_t tri) const {
    auto [a, b, c] = triangle_points(tri);
    return triangle_area(a, b, c);
}

Vec3 TriangleMesh::centroid_of(size_t tri) const {
    auto [a, b, c] = triangle_points(tri);
    return (a + b + c) / 3.0;
}

const std::vector<Vec3>& TriangleMesh::vertex_normals() const {
    if (normals_.size() == vertices_.size()) return normals_;
    normals_.assign(vertices_.size(), Vec3::Zero());
    for (size_t i = 0; i < triangles_.size(); ++i) {
        auto [a, b, c] = triangle_points(i);
        Vec3 fn = (b - a).cross(c - a);
        double len = fn.norm();
        if (len <= 0.0) continue;
        fn /= len;
        const Triangle& t = triangles_[i];
        const Vec3* pts[3] = {&a, &b, &c};
        for (int k = 0; k < 3; ++k) {
            Vec3 e0 = (*pts[(k + 1) % 3] - *pts[k]).normalized();
            Vec3 e1 = (*pts[(k + 2) % 3] - *pts[k]).normalized();
            double ang = std::acos(std::clamp(e0.dot(e1), -1.0, 1.0));
            normals_[t[static_cast<size_t>(k)]] += ang * fn;
        }
    }
    for (auto& n : normals_) {
        double len = n.norm();
        if (len > 0.0) n /= len;
    }
    return normals_;
}

double TriangleMesh::total_area() const {
    double s = 0.0;
    for (size_t i = 0; i < triangles_.size(); ++i) s += area(i);
    return s;
}

double TriangleMesh::signed_volume() const {
    double v = 0.0;
    for (size_t i = 0; i < triangles_.size(); ++i) {
        auto [a, b, c] = triangle_points(i);
        v += a.dot(b.cross(c)) / 6.0;
    }
    return v;
}

Vec3 TriangleMesh::centroid() const {
    Vec3 acc = Vec3::Zero();
    double total = 0.0;
    for (size_t i = 0; i < triangles_.size(); ++i) {
        double a = area(i);
        acc += a * centroid_of(i);
        total += a;
    }
    return total > 0.0 ? Vec3(acc / total) : Vec3::Zero();
}

Aabb TriangleMesh::bounds() const {
    Aabb box;
    for (const auto& v : vertices_) box.expand(v);
    return box;
}

size_t TriangleMesh::cleanup(double merge_tol, double min_area) {
    // Merge vertices by quantised grid cell, then by exact tolerance within cell.
    std::vector<uint32_t> remap(vertices_.size());
    std::vector<Vec3> merged;
    merged.reserve(vertices_.size());
    if (merge_tol > 0.0) {
        std::unordered_map<uint64_t, std::vector<uint32_t>> cells;
        double inv = 1.0 / merge_tol;
        auto cell_of = [&](const Vec3& p) {
            auto q = [&](double x) {
                return static_cast<int64_t>(std::floor(x * inv));
            };
            uint64_t h = 1469598103934665603ull;
            for (int64_t v : {q(p.x()), q(p.y()), q(p.z())}) {
                h ^= static_cast<uint64_t>(v);
                h *= 1099511628211ull;
            }
            return h;
        };
        for (uint32_t i = 0; i < vertices_.size(); ++i) {
            const Vec3& p = vertices_[i];
            bool found = false;
            // Probe the 27 neighbouring cells so near-boundary duplicates merge.
            for (int dx = -1; dx <= 1 && !found; ++dx)
                for (int dy = -1; dy <= 1 && !found; ++dy)
                    for (int dz = -1; dz <= 1 && !found; ++dz) {
                        Vec3 probe = p + merge_tol * Vec3(dx, dy, dz);
                        auto it = cells.find(cell_of(probe));
                        if (it == cells.end()) continue;
                        for (uint32_t j : it->second) {
                            if ((merged[j] - p).norm() <= merge_tol) {
                                remap[i] = j;
                                found = true;
                                break;
                            }
                        }
                    }
            if (!found) {
                remap[i] = static_cast<uint32_t>(merged.size());
                merged.push_back(p);
                cells[cell_of(p)].push_back(remap[i]);
            }
        }
        vertices_ = std::move(merged);
    } else {
        std::iota(remap.begin(), remap.end(), 0u);
    }

    size_t dropped = 0;
    std::vector<Triangle> kept;
    kept.reserve(triangles_.size());
    for (const auto& t : triangles_) {
        Triangle m = {remap[t[0]], remap[t[1]], remap[t[2]]};
        if (m[0] == m[1] || m[1] == m[2] || m[0] == m[2]) {
            ++dropped;
            continue;
        }
        if (triangle_area(vertices_[m[0]], vertices_[m[1]], vertices_[m[2]]) < min_area) {
            ++dropped;
            continue;
        }
        kept.push_back(m);
    }
    triangles_ = std::move(kept);
    invalidate_normals();
    return dropped;
}

void TriangleMesh::transform(const RigidTransform& T) {
    for (auto& v : vertices_) v = T.apply(v);
    invalidate_normals();
}

std::vector<std::array<uint32_t, 2>> TriangleMesh::boundary_edges() const {
    std::unordered_map<EdgeKey, int, EdgeKeyHash> count;
    for (const auto& t : triangles_) {
        for (int k = 0; k < 3; ++k) {
            count[make_edge(t[static_cast<size_t>(k)], t[(static_cast<size_t>(k) + 1) % 3])]++;
        }
    }
    std::vector<std::array<uint32_t, 2>> out;
    for (const auto& [e, n] : count) {
        if (n == 1) out.push_back({e.a, e.b});
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool TriangleMesh::is_watertight() const {
    if (triangles_.empty()) return false;
    // Count directed edges: closed + consistently wound means every directed
    // edge appears exactly once and its reverse exactly once.
    std::unordered_map<uint64_t, int> directed;
    directed.reserve(triangles_.size() * 3);
    for (const auto& t : triangles_) {
        for (int k = 0; k < 3; ++k) {
            uint32_t a = t[static_cast<size_t>(k)], b = t[(static_cast<size_t>(k) + 1) % 3];
            uint64_t key = (uint64_t(a) << 32) | b;
            if (++directed[key] > 1) return false;  // non-manifold or doubled face
        }
    }
    for (const auto& [key, n] : directed) {
        uint64_t rev = (key << 32) | (key >> 32);
        auto it = directed.find(rev);
        if (it == directed.end() || it->second != 1) return false;
    }
    return true;
}

int TriangleMesh::euler_characteristic() const {
    std::unordered_map<EdgeKey, int, EdgeKeyHash> edges;
    for (const auto& t : triangles_) {
        for (int k = 0; k < 3; ++k) {
            edges[make_edge(t[static_cast<size_t>(k)], t[(static_cast<size_t>(k) + 1) % 3])] = 1;
        }
    }
    // Count only referenced vertices so stray isolated points do not skew V.
    std::vector<char> used(vertices_.size(), 0);
    for (const auto& t : triangles_)
        for (uint32_t i : t) used[i] = 1;
    long v = std::count(used.begin(), used.end(), char(1));
    return static_cast<int>(v - static_cast<long>(edges.size()) +
                            static_cast<long>(triangles_.size()));
}

std::vector<TriangleMesh> TriangleMesh::connected_components() const {
    // Union-find over triangles joined by shared edges.
    std::vector<uint32_t> parent(triangles_.size());
    std::iota(parent.begin(), parent.end(), 0u);
    std::function<uint32_t(uint32_t)> find = [&](uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](uint32_t a, uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };

    std::unordered_map<EdgeKey, uint32_t, EdgeKeyHash> first_tri;
    for (uint32_t i = 0; i < triangles_.size(); ++i) {
        const Triangle& t = triangles_[i];
        for (int k = 0; k < 3; ++k) {
            EdgeKey e = make_edge(t[static_cast<size_t>(k)], t[(static_cast<size_t>(k) + 1) % 3]);
            auto [it, inserted] = first_tri.try_emplace(e, i);
            if (!inserted) unite(it->second, i);
        }
    }

    std::map<uint32_t, std::vector<uint32_t>> groups;
    for (uint32_t i = 0; i < triangles_.size(); ++i) groups[find(i)].push_back(i);

    std::vector<TriangleMesh> out;
    out.reserve(groups.size());
    for (const auto& [root, ids] : groups) out.push_back(submesh(ids));
    std::stable_sort(out.begin(), out.end(), [](const TriangleMesh& a, const TriangleMesh& b) {
        return a.triangle_count() > b.triangle_count();
    });
    return out;
}

TriangleMesh TriangleMesh::submesh(const std::vector<uint32_t>& triangle_ids) const {
    std::vector<uint32_t> vmap(vertices_.size(), UINT32_MAX);
    std::vector<Vec3> verts;
    std::vector<Triangle> tris;
    tris.reserve(triangle_ids.size());
    for (uint32_t id : triangle_ids) {
        Triangle t = triangles_[id];
        for (auto& idx : t) {
            if (vmap[idx] == UINT32_MAX) {
                vmap[idx] = static_cast<uint32_t>(verts.size());
                verts.push_back(vertices_[idx]);
            }
            idx = vmap[idx];
        }
        tris.push_back(t);
    }
    return TriangleMesh(std::move(verts), std::move(tris));
}

void TriangleMesh::append(const TriangleMesh& other) {
    uint32_t base = static_cast<uint32_t>(vertices_.size());
    vertices_.insert(vertices_.end(), other.vertices_.begin(), other.vertices_.end());
    for (const auto& t : other.triangles_) {
        triangles_.push_back({t[0] + base, t[1] + base, t[2] + base});
    }
    invalidate_normals();
}

TriangleMesh apply_transform(const TriangleMesh& mesh, const RigidTransform& T) {
    TriangleMesh out = mesh;
    out.transform(T);
    return out;
}

}  // namespace splintcad
