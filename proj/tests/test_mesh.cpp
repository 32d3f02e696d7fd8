#include <doctest.h>

#include "oracles.hpp"
#include "splintcad/mesh.hpp"
#include "splintcad/synth.hpp"

using namespace splintcad;

TEST_CASE("box mesh is watertight with Euler characteristic 2") {
    TriangleMesh box = make_box(Vec3(0, 0, 0), Vec3(1, 1, 1));
    CHECK(box.vertex_count() == 8);
    CHECK(box.triangle_count() == 12);
    CHECK(box.is_watertight());
    CHECK(box.euler_characteristic() == 2);
    CHECK(box.signed_volume() == doctest::Approx(1.0));
    CHECK(box.total_area() == doctest::Approx(6.0));
    CHECK(box.boundary_edges().empty());
}

TEST_CASE("icosphere metrics approach the analytic sphere") {
    TriangleMesh s = make_icosphere(Vec3(1, 2, 3), 2.0, 3);
    CHECK(s.is_watertight());
    CHECK(s.euler_characteristic() == 2);
    CHECK(s.signed_volume() == doctest::Approx(4.0 / 3.0 * M_PI * 8.0).epsilon(0.01));
    CHECK(s.total_area() == doctest::Approx(4.0 * M_PI * 4.0).epsilon(0.01));
}

TEST_CASE("cleanup merges duplicates and drops degenerates") {
    // Two triangles sharing an edge, stored with duplicated vertices plus a
    // zero-area sliver.
    std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0},
                           {1, 0, 0}, {0, 1, 0}, {1, 1, 0},
                           {0, 0, 0}, {0, 0, 0}, {1, 0, 0}};
    std::vector<TriangleMesh::Triangle> t = {{0, 1, 2}, {3, 5, 4}, {6, 7, 8}};
    TriangleMesh m(std::move(v), std::move(t));
    size_t dropped = m.cleanup();
    CHECK(m.vertex_count() == 4);
    CHECK(m.triangle_count() == 2);
    CHECK(dropped == 1);
}

TEST_CASE("vertex normals are unit length") {
    TriangleMesh s = make_icosphere(Vec3::Zero(), 1.0, 2);
    for (size_t i = 0; i < s.vertex_count(); ++i) {
        CHECK(s.vertex_normals()[i].norm() == doctest::Approx(1.0).epsilon(1e-6));
        // Sphere normals point radially outward.
        CHECK(s.vertex_normals()[i].dot(s.vertices()[i]) > 0.9);
    }
}

TEST_CASE("rigid invariance of distances and areas") {
    TriangleMesh s = make_icosphere(Vec3::Zero(), 1.5, 2);
    DetRng rng(3);
    RigidTransform T = rng.random_rigid(2.0, 20.0);
    TriangleMesh moved = apply_transform(s, T);

    for (size_t i = 0; i < 50; ++i) {
        size_t a = i % s.vertex_count();
        size_t b = (i * 37 + 11) % s.vertex_count();
        double d0 = (s.vertices()[a] - s.vertices()[b]).norm();
        double d1 = (moved.vertices()[a] - moved.vertices()[b]).norm();
        CHECK(d0 == doctest::Approx(d1).epsilon(1e-9));
    }
    for (size_t i = 0; i < s.triangle_count(); i += 17) {
        CHECK(s.area(i) == doctest::Approx(moved.area(i)).epsilon(1e-9));
    }
}

TEST_CASE("identity and translation transforms") {
    TriangleMesh box = make_box(Vec3::Zero(), Vec3(2, 2, 2));
    TriangleMesh same = apply_transform(box, RigidTransform::identity());
    for (size_t i = 0; i < box.vertex_count(); ++i) {
        CHECK((box.vertices()[i] - same.vertices()[i]).norm() == doctest::Approx(0.0));
    }
    TriangleMesh moved = apply_transform(box, RigidTransform::translation(Vec3(1, 2, 2)));
    CHECK((moved.centroid() - box.centroid() - Vec3(1, 2, 2)).norm() < 1e-12);
}

TEST_CASE("connected components") {
    SUBCASE("single sphere is one component") {
        TriangleMesh s = make_icosphere(Vec3::Zero(), 1.0, 1);
        CHECK(s.connected_components().size() == 1);
    }
    SUBCASE("two disjoint spheres in one mesh") {
        TriangleMesh s = make_icosphere(Vec3::Zero(), 1.0, 1);
        s.append(make_icosphere(Vec3(5, 0, 0), 1.0, 1));
        auto comps = s.connected_components();
        CHECK(comps.size() == 2);
        size_t total = 0;
        for (const auto& c : comps) total += c.triangle_count();
        CHECK(total == s.triangle_count());
    }
    SUBCASE("sphere plus a two-triangle sliver") {
        TriangleMesh s = make_icosphere(Vec3::Zero(), 1.0, 2);
        std::vector<Vec3> v = {{6, 0, 0}, {7, 0, 0}, {6, 1, 0}, {7, 1, 0}};
        std::vector<TriangleMesh::Triangle> t = {{0, 1, 2}, {1, 3, 2}};
        s.append(TriangleMesh(std::move(v), std::move(t)));
        auto comps = s.connected_components();
        REQUIRE(comps.size() == 2);
        // Components are sorted largest-first; the sliver has analytic area 1.
        CHECK(comps[1].triangle_count() == 2);
        CHECK(comps[1].total_area() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("watertight detection flags open and doubled meshes") {
    TriangleMesh patch = make_plate_patch(0, 1, 0, 1, 0, 2, 2);
    CHECK(!patch.is_watertight());
    CHECK(patch.boundary_edges().size() == 8);

    // Same face referenced twice over shared vertices: non-manifold.
    std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    std::vector<TriangleMesh::Triangle> t = {{0, 1, 2}, {1, 3, 2}, {0, 1, 2}};
    TriangleMesh doubled(std::move(v), std::move(t));
    CHECK(!doubled.is_watertight());

    // Two disjoint closed shells still count as watertight.
    TriangleMesh pair = make_box(Vec3::Zero(), Vec3(1, 1, 1));
    pair.append(make_box(Vec3(5, 0, 0), Vec3(1, 1, 1)));
    CHECK(pair.is_watertight());
}
