#include <doctest.h>

#include "splintcad/marching_cubes.hpp"
#include "splintcad/queries.hpp"

using namespace splintcad;

namespace {

TriangleMesh mesh_sphere_field(double radius, double step) {
    double half = radius + 3 * step;
    int n = static_cast<int>(std::ceil(2 * half / step));
    Vec3 origin(-half, -half, -half);
    return marching_tets(n, n, n, origin, step, [&](int k, std::vector<double>& layer) {
        size_t idx = 0;
        for (int j = 0; j <= n; ++j) {
            for (int i = 0; i <= n; ++i) {
                Vec3 p = origin + step * Vec3(i, j, k);
                layer[idx++] = p.norm() - radius;
            }
        }
    });
}

}  // namespace

TEST_CASE("marching tets on a sphere field") {
    TriangleMesh m = mesh_sphere_field(1.0, 0.1);
    REQUIRE(!m.empty());

    SUBCASE("watertight with Euler characteristic 2") {
        CHECK(m.is_watertight());
        CHECK(m.euler_characteristic() == 2);
    }
    SUBCASE("volume and area near analytic values") {
        CHECK(m.signed_volume() == doctest::Approx(4.0 / 3.0 * M_PI).epsilon(0.02));
        CHECK(m.total_area() == doctest::Approx(4.0 * M_PI).epsilon(0.03));
    }
    SUBCASE("normals point outward") {
        for (size_t i = 0; i < m.triangle_count(); i += 7) {
            Vec3 c = m.centroid_of(i);
            if (c.norm() < 1e-9) continue;
            CHECK(m.face_normal(i).dot(c.normalized()) > 0.0);
        }
    }
    SUBCASE("surface within half a step of the analytic sphere") {
        for (size_t i = 0; i < m.vertex_count(); i += 11) {
            CHECK(std::abs(m.vertices()[i].norm() - 1.0) < 0.05);
        }
    }
}

TEST_CASE("marching tets torus topology") {
    // Torus: genus 1, Euler characteristic 0.
    double R = 1.0, r = 0.4, step = 0.05;
    double half = R + r + 3 * step;
    int n = static_cast<int>(std::ceil(2 * half / step));
    int nz = static_cast<int>(std::ceil(2 * (r + 3 * step) / step));
    Vec3 origin(-half, -half, -(r + 3 * step));
    TriangleMesh m =
        marching_tets(n, n, nz, origin, step, [&](int k, std::vector<double>& layer) {
            size_t idx = 0;
            for (int j = 0; j <= n; ++j) {
                for (int i = 0; i <= n; ++i) {
                    Vec3 p = origin + step * Vec3(i, j, k);
                    double q = std::hypot(p.x(), p.y()) - R;
                    layer[idx++] = std::hypot(q, p.z()) - r;
                }
            }
        });
    CHECK(m.is_watertight());
    CHECK(m.euler_characteristic() == 0);
}
