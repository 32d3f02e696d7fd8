#include "splintcad/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace splintcad {

// ---------------------------------------------------------------- DetRng

uint64_t DetRng::next_u64() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double DetRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double DetRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double DetRng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
}

Vec3 DetRng::unit_vector() {
    // Rejection-sampled sphere point; deterministic for a fixed seed.
    for (;;) {
        Vec3 v(uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0));
        double n2 = v.squaredNorm();
        if (n2 > 1e-6 && n2 <= 1.0) return v / std::sqrt(n2);
    }
}

RigidTransform DetRng::random_rigid(double max_angle_rad, double max_translation) {
    Vec3 axis = unit_vector();
    double angle = uniform(-max_angle_rad, max_angle_rad);
    Vec3 t(uniform(-max_translation, max_translation),
           uniform(-max_translation, max_translation),
           uniform(-max_translation, max_translation));
    return RigidTransform::rotation(axis, angle, t);
}

// ---------------------------------------------------------------- primitives

TriangleMesh make_box(const Vec3& center, const Vec3& size) {
    Vec3 h = 0.5 * size;
    std::vector<Vec3> v = {
        center + Vec3(-h.x(), -h.y(), -h.z()), center + Vec3(h.x(), -h.y(), -h.z()),
        center + Vec3(h.x(), h.y(), -h.z()),   center + Vec3(-h.x(), h.y(), -h.z()),
        center + Vec3(-h.x(), -h.y(), h.z()),  center + Vec3(h.x(), -h.y(), h.z()),
        center + Vec3(h.x(), h.y(), h.z()),    center + Vec3(-h.x(), h.y(), h.z())};
    std::vector<TriangleMesh::Triangle> t = {
        {0, 2, 1}, {0, 3, 2},  // bottom (z-)
        {4, 5, 6}, {4, 6, 7},  // top (z+)
        {0, 1, 5}, {0, 5, 4},  // y-
        {2, 3, 7}, {2, 7, 6},  // y+
        {1, 2, 6}, {1, 6, 5},  // x+
        {3, 0, 4}, {3, 4, 7},  // x-
    };
    return TriangleMesh(std::move(v), std::move(t));
}

TriangleMesh make_icosphere(const Vec3& center, double radius, int subdivisions) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                           {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                           {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& p : v) p.normalize();
    std::vector<TriangleMesh::Triangle> t = {
        {0, 11, 5}, {0, 5, 1},   {0, 1, 7},  {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},   {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<uint32_t, uint32_t>, uint32_t> midpoint;
        auto mid = [&](uint32_t a, uint32_t b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 m = (v[a] + v[b]).normalized();
            uint32_t idx = static_cast<uint32_t>(v.size());
            v.push_back(m);
            midpoint[key] = idx;
            return idx;
        };
        std::vector<TriangleMesh::Triangle> next;
        next.reserve(t.size() * 4);
        for (const auto& tri : t) {
            uint32_t a = mid(tri[0], tri[1]);
            uint32_t b = mid(tri[1], tri[2]);
            uint32_t c = mid(tri[2], tri[0]);
            next.push_back({tri[0], a, c});
            next.push_back({tri[1], b, a});
            next.push_back({tri[2], c, b});
            next.push_back({a, b, c});
        }
        t = std::move(next);
    }
    for (auto& p : v) p = center + radius * p;
    return TriangleMesh(std::move(v), std::move(t));
}

TriangleMesh make_plate_patch(double x0, double x1, double y0, double y1, double z0,
                              int nx, int ny) {
    std::vector<Vec3> v;
    v.reserve(static_cast<size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            double x = x0 + (x1 - x0) * i / nx;
            double y = y0 + (y1 - y0) * j / ny;
            v.emplace_back(x, y, z0);
        }
    }
    std::vector<TriangleMesh::Triangle> t;
    auto id = [&](int i, int j) { return static_cast<uint32_t>(j * (nx + 1) + i); };
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            t.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            t.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    }
    return TriangleMesh(std::move(v), std::move(t));
}

// ---------------------------------------------------------------- arch pair

void ArchSpec::validate() const {
    if (tooth_count < 4) throw std::invalid_argument("ArchSpec: tooth_count must be >= 4");
    if (mi_gap < 0.0) throw std::invalid_argument("ArchSpec: mi_gap must be >= 0");
    if (cusp_height <= 0.0 || cusp_radius <= 0.0 || cusp_height > cusp_radius) {
        throw std::invalid_argument("ArchSpec: cusp height must be in (0, radius]");
    }
    if (grid_step <= 0.0) throw std::invalid_argument("ArchSpec: grid_step must be > 0");
    if (arch_width <= 0.0 || arch_depth <= 0.0) {
        throw std::invalid_argument("ArchSpec: arch dimensions must be > 0");
    }
}

namespace {

// Height-field slab closed into a watertight solid. surface_z gives the
// tooth-side surface; teeth_up selects whether teeth face +z (mandible) or -z.
TriangleMesh make_slab(double x0, double x1, double y0, double y1, double step,
                       const std::function<double(double, double)>& surface_z,
                       double back_z, bool teeth_up) {
    int nx = std::max(2, static_cast<int>(std::ceil((x1 - x0) / step)));
    int ny = std::max(2, static_cast<int>(std::ceil((y1 - y0) / step)));
    std::vector<Vec3> v;
    v.reserve(static_cast<size_t>(2 * (nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            double x = x0 + (x1 - x0) * i / nx;
            double y = y0 + (y1 - y0) * j / ny;
            v.emplace_back(x, y, surface_z(x, y));
        }
    }
    uint32_t base = static_cast<uint32_t>(v.size());
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            double x = x0 + (x1 - x0) * i / nx;
            double y = y0 + (y1 - y0) * j / ny;
            v.emplace_back(x, y, back_z);
        }
    }
    auto id = [&](int i, int j) { return static_cast<uint32_t>(j * (nx + 1) + i); };
    std::vector<TriangleMesh::Triangle> t;
    t.reserve(static_cast<size_t>(4 * nx * ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            uint32_t a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            if (teeth_up) {
                t.push_back({a, b, c});
                t.push_back({a, c, d});
            } else {
                t.push_back({a, c, b});
                t.push_back({a, d, c});
            }
        }
    }
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            uint32_t a = base + id(i, j), b = base + id(i + 1, j), c = base + id(i + 1, j + 1),
                     d = base + id(i, j + 1);
            if (teeth_up) {
                t.push_back({a, c, b});
                t.push_back({a, d, c});
            } else {
                t.push_back({a, b, c});
                t.push_back({a, c, d});
            }
        }
    }
    // Side walls around the boundary, quad split consistent with winding.
    auto wall = [&](uint32_t s0, uint32_t s1) {
        if (teeth_up) {
            t.push_back({s0, base + s0, s1});
            t.push_back({s1, base + s0, base + s1});
        } else {
            t.push_back({s0, s1, base + s0});
            t.push_back({s1, base + s1, base + s0});
        }
    };
    for (int i = 0; i < nx; ++i) wall(id(i, 0), id(i + 1, 0));
    for (int j = 0; j < ny; ++j) wall(id(nx, j), id(nx, j + 1));
    for (int i = nx; i > 0; --i) wall(id(i, ny), id(i - 1, ny));
    for (int j = ny; j > 0; --j) wall(id(0, j), id(0, j - 1));

    TriangleMesh mesh(std::move(v), std::move(t));
    mesh.cleanup(1e-9);
    return mesh;
}

}  // namespace

ArchPair make_arch_pair(const ArchSpec& spec) {
    spec.validate();
    const double W = spec.arch_width, D = spec.arch_depth;
    const double R = spec.cusp_radius, H = spec.cusp_height;

    // Upper tooth centres along the parabola, uniform in arc length.
    std::vector<double> params;
    {
        const int kSamples = 512;
        std::vector<double> arc(kSamples + 1, 0.0);
        auto at = [&](double s) { return Vec3(W / 2 * s, D * (1.0 - s * s), 0.0); };
        for (int i = 1; i <= kSamples; ++i) {
            double s0 = -1.0 + 2.0 * (i - 1) / kSamples;
            double s1 = -1.0 + 2.0 * i / kSamples;
            arc[static_cast<size_t>(i)] =
                arc[static_cast<size_t>(i) - 1] + (at(s1) - at(s0)).norm();
        }
        double total = arc.back();
        for (int k = 0; k < spec.tooth_count; ++k) {
            double target = total * k / (spec.tooth_count - 1);
            auto it = std::lower_bound(arc.begin(), arc.end(), target);
            size_t hi = std::min<size_t>(static_cast<size_t>(it - arc.begin()), kSamples);
            size_t lo = hi > 0 ? hi - 1 : 0;
            double f = (arc[hi] > arc[lo]) ? (target - arc[lo]) / (arc[hi] - arc[lo]) : 0.0;
            params.push_back(-1.0 + 2.0 * (static_cast<double>(lo) + f) / kSamples);
        }
    }

    auto arch_point = [&](double s) { return Vec3(W / 2 * s, D * (1.0 - s * s), 0.0); };

    // Upper cusps: spherical caps of height H hanging below the gum plane z=0.
    std::vector<Vec3> upper_centers;
    const double cu_z = R - H;  // centre height giving tip at -H
    for (double s : params) {
        Vec3 c = arch_point(s);
        upper_centers.emplace_back(c.x(), c.y(), cu_z);
    }

    // Lower cusps between upper neighbours; per-tooth height chosen so the
    // nearest flank pair realises exactly the MI gap. Sparse arches fall back
    // to tip-to-gum contact at the same gap (no flank proximity possible).
    std::vector<Vec3> lower_centers;
    const double contact = 2 * R + spec.mi_gap;
    for (size_t k = 0; k + 1 < upper_centers.size(); ++k) {
        Vec3 a = upper_centers[k], b = upper_centers[k + 1];
        Vec3 m = 0.5 * (a + b);
        double dxy = std::max((a - m).head<2>().norm(), (b - m).head<2>().norm());
        double dz = std::sqrt(std::max(contact * contact - dxy * dxy, 0.0));
        double z = std::min(cu_z - dz, -(spec.mi_gap + R));  // tip stays mi_gap below the gum
        lower_centers.emplace_back(m.x(), m.y(), z);
    }

    double lower_center_z_max = -kInf;
    for (const auto& c : lower_centers) lower_center_z_max = std::max(lower_center_z_max, c.z());
    const double lower_gum_z = lower_center_z_max - (R - H);

    auto bumps_down = [&](double x, double y) {
        double z = 0.0;  // gum plane
        for (const auto& c : upper_centers) {
            double rho2 = (Vec3(x, y, c.z()) - c).squaredNorm();
            if (rho2 < R * R) z = std::min(z, c.z() - std::sqrt(R * R - rho2));
        }
        // Palate vault: gentle upward dome inside the arch.
        if (z == 0.0 && spec.palate_rise > 0.0) {
            double inside = D * (1.0 - (x / (W / 2)) * (x / (W / 2))) - y;  // >0 inside parabola
            if (inside > 4.0 && std::abs(x) < W / 2) {
                double f = std::min(1.0, (inside - 4.0) / 6.0);
                z += spec.palate_rise * f * f * (3 - 2 * f);
            }
        }
        return z;
    };
    auto bumps_up = [&](double x, double y) {
        double z = lower_gum_z;
        for (const auto& c : lower_centers) {
            double rho2 = (Vec3(x, y, c.z()) - c).squaredNorm();
            if (rho2 < R * R) z = std::max(z, c.z() + std::sqrt(R * R - rho2));
        }
        return z;
    };

    const double margin = R + 2.0;
    double x0 = -W / 2 - margin, x1 = W / 2 + margin;
    double y0 = -margin, y1 = D + margin;

    ArchPair out;
    out.gum_plane_z = 0.0;
    out.mandible_gum_z = lower_gum_z;
    out.maxilla = make_slab(x0, x1, y0, y1, spec.grid_step, bumps_down,
                            spec.plate_thickness, /*teeth_up=*/false);
    out.mandible = make_slab(x0, x1, y0, y1, spec.grid_step, bumps_up,
                             lower_gum_z - spec.plate_thickness, /*teeth_up=*/true);

    // Occlusal patch: cusp-cap triangles of the maxilla below a trim height.
    const double trim_z = -0.25 * H;
    std::vector<uint32_t> occ_ids;
    for (uint32_t i = 0; i < out.maxilla.triangle_count(); ++i) {
        auto pts = out.maxilla.triangle_points(i);
        if (pts[0].z() < trim_z && pts[1].z() < trim_z && pts[2].z() < trim_z) {
            occ_ids.push_back(i);
        }
    }
    out.occlusal = out.maxilla.submesh(occ_ids);

    // Palate mask: raised vault triangles inside the arch.
    for (uint32_t i = 0; i < out.maxilla.triangle_count(); ++i) {
        Vec3 c = out.maxilla.centroid_of(i);
        if (c.z() > 0.2 && c.z() < spec.plate_thickness - 1e-9) {
            double inside = D * (1.0 - (c.x() / (W / 2)) * (c.x() / (W / 2))) - c.y();
            if (inside > 4.0) out.palate_triangles.push_back(i);
        }
    }
    return out;
}

// ---------------------------------------------------------------- scenarios

namespace {

TriangleMesh add_noise(const TriangleMesh& mesh, double sigma, DetRng& rng) {
    if (sigma <= 0.0) return mesh;
    TriangleMesh out = mesh;
    for (auto& v : out.mutable_vertices()) {
        v += sigma * Vec3(rng.normal(), rng.normal(), rng.normal());
    }
    out.invalidate_normals();
    return out;
}

}  // namespace

ScanScenario make_scan_pair_scenario(const ScenarioSpec& spec) {
    DetRng rng(spec.seed * 0x9e3779b9ull + 7);
    ArchPair arch = make_arch_pair(spec.arch);

    RigidTransform M = rng.random_rigid(15.0 * M_PI / 180.0, 8.0);
    RigidTransform Minv = M.inverse();

    ScanScenario out;
    out.T_true = spec.T_true;
    out.frame_change = M;
    out.scans.U0 = arch.maxilla;
    out.scans.L0 = arch.mandible;
    out.scans.U1 = add_noise(apply_transform(arch.maxilla, Minv), spec.noise_sigma, rng);
    out.scans.L1 = add_noise(apply_transform(apply_transform(arch.mandible, spec.T_true), Minv),
                             spec.noise_sigma, rng);
    return out;
}

TrackerScenario make_tracker_scenario(const ScenarioSpec& spec) {
    DetRng rng(spec.seed * 0x51a4c3b7ull + 11);

    TrackerScenario out;
    std::vector<Vec3>& b0 = out.record.B0;
    int n = std::max(3, spec.bow_marker_count);
    for (int i = 0; i < n; ++i) {
        if (spec.degenerate_bow) {
            b0.emplace_back(static_cast<double>(i) * 5.0, 0.0, 0.0);  // collinear
        } else {
            double s = -1.0 + 2.0 * i / (n - 1);
            b0.emplace_back(40.0 * s, 25.0 * (1.0 - s * s),
                            (i % 2 == 0) ? 0.0 : 6.0 + i);  // non-coplanar bow posts
        }
    }
    out.T_B = rng.random_rigid(10.0 * M_PI / 180.0, 6.0);
    out.record.T_F = rng.random_rigid(20.0 * M_PI / 180.0, 15.0);
    out.record.T_D = rng.random_rigid(20.0 * M_PI / 180.0, 15.0);

    DetRng noise_rng(spec.seed * 31 + 17);
    out.record.B1.reserve(b0.size());
    for (const auto& p : b0) {
        Vec3 q = out.T_B.apply(p);
        if (spec.noise_sigma > 0.0) {
            q += spec.noise_sigma *
                 Vec3(noise_rng.normal(), noise_rng.normal(), noise_rng.normal());
        }
        out.record.B1.push_back(q);
    }

    RigidTransform T = out.record.T_D.inverse() * out.record.T_F;
    out.T_th_truth = T * out.T_B * T.inverse();
    return out;
}

}  // namespace splintcad
