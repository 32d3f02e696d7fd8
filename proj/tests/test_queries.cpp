#include <doctest.h>

#include "oracles.hpp"
#include "splintcad/queries.hpp"
#include "splintcad/synth.hpp"

using namespace splintcad;

TEST_CASE("indexed nearest equals brute force on random queries") {
    TriangleMesh s = make_icosphere(Vec3(0.5, -0.2, 1.0), 1.3, 2);  // 320 triangles
    Bvh bvh(s);
    DetRng rng(11);
    for (int i = 0; i < 1000; ++i) {
        Vec3 p(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-2, 4));
        double indexed = bvh.nearest(p).distance;
        double brute = oracle::brute_nearest_distance(p, s);
        CHECK(indexed == doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("signed distance against a 10k-face icosphere") {
    TriangleMesh s = make_icosphere(Vec3::Zero(), 1.0, 5);  // 20480 faces
    Bvh bvh(s);
    SignedDistanceField sdf(s, bvh);

    SUBCASE("outside point (2,0,0) is ~ +1") {
        auto r = sdf.evaluate(Vec3(2, 0, 0));
        CHECK(std::abs(r.distance) ==
              doctest::Approx(oracle::brute_nearest_distance(Vec3(2, 0, 0), s)).epsilon(1e-12));
        CHECK(r.distance == doctest::Approx(1.0).epsilon(0.01));
    }
    SUBCASE("centre is ~ -1") {
        auto r = sdf.evaluate(Vec3(0, 0, 0));
        CHECK(r.distance == doctest::Approx(-1.0).epsilon(0.01));
    }
    SUBCASE("mesh vertex has zero distance") {
        CHECK(std::abs(sdf.evaluate(s.vertices()[17]).distance) < 1e-9);
    }
    SUBCASE("random probes match analytic signed distance") {
        DetRng rng(5);
        for (int i = 0; i < 200; ++i) {
            Vec3 p = rng.unit_vector() * rng.uniform(0.2, 2.0);
            double expected = p.norm() - 1.0;  // analytic sphere
            CHECK(sdf.evaluate(p).distance == doctest::Approx(expected).epsilon(0.02));
        }
    }
}

TEST_CASE("signed distance flags open boundaries") {
    TriangleMesh patch = make_plate_patch(0, 10, 0, 10, 0, 10, 10);
    Bvh bvh(patch);
    SignedDistanceField sdf(patch, bvh, /*boundary_band=*/1.0);
    // Query near the middle: closest point far from the rim.
    CHECK(!sdf.evaluate(Vec3(5, 5, 0.5)).near_open_boundary);
    // Query near the rim.
    CHECK(sdf.evaluate(Vec3(0.2, 5, 0.5)).near_open_boundary);
    // Above the patch the sign is positive (normals +z), below negative.
    CHECK(sdf.evaluate(Vec3(5, 5, 0.5)).distance > 0);
    CHECK(sdf.evaluate(Vec3(5, 5, -0.5)).distance < 0);
}

TEST_CASE("plane section of a unit cube at mid-height") {
    TriangleMesh cube = make_box(Vec3(0.5, 0.5, 0.5), Vec3(1, 1, 1));
    auto lines = plane_section(cube, Plane(Vec3(0, 0, 1), 0.5));
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].closed);
    CHECK(lines[0].length() == doctest::Approx(4.0).epsilon(1e-9));
    for (const auto& p : lines[0].points) CHECK(p.z() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("plane section of an icosphere equator has length ~2*pi") {
    TriangleMesh s = make_icosphere(Vec3::Zero(), 1.0, 4);
    auto lines = plane_section(s, Plane(Vec3(0, 0, 1), 0.0));
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].closed);
    CHECK(lines[0].length() == doctest::Approx(2 * M_PI).epsilon(0.01));
}

TEST_CASE("plane above mesh gives empty section") {
    TriangleMesh cube = make_box(Vec3::Zero(), Vec3(1, 1, 1));
    CHECK(plane_section(cube, Plane(Vec3(0, 0, 1), 5.0)).empty());
}

TEST_CASE("section length is invariant under joint rigid motion") {
    TriangleMesh s = make_icosphere(Vec3::Zero(), 1.0, 3);
    Plane plane(Vec3(0.3, -0.2, 0.9), 0.25);
    double len0 = 0.0;
    for (const auto& l : plane_section(s, plane)) len0 += l.length();

    DetRng rng(9);
    RigidTransform T = rng.random_rigid(2.5, 15.0);
    TriangleMesh moved = apply_transform(s, T);
    Vec3 n2 = T.apply_vector(plane.normal);
    // Plane through a mapped on-plane point.
    Plane plane2 = Plane::from_point_normal(T.apply(plane.normal * plane.offset), n2);
    double len1 = 0.0;
    for (const auto& l : plane_section(moved, plane2)) len1 += l.length();
    CHECK(len0 == doctest::Approx(len1).epsilon(1e-9));
}

TEST_CASE("meshes_intersect cube cases with exhaustive oracle") {
    TriangleMesh a = make_box(Vec3(0.5, 0.5, 0.5), Vec3(1, 1, 1));

    SUBCASE("offset 3: disjoint") {
        TriangleMesh b = make_box(Vec3(3.5, 0.5, 0.5), Vec3(1, 1, 1));
        CHECK(!meshes_intersect(a, b, 0.0).intersecting);
        CHECK(!oracle::brute_meshes_intersect(a, b, 0.0));
    }
    SUBCASE("offset 0.5: overlapping") {
        TriangleMesh b = make_box(Vec3(1.0, 0.5, 0.5), Vec3(1, 1, 1));
        CHECK(meshes_intersect(a, b, 0.0).intersecting);
        CHECK(oracle::brute_meshes_intersect(a, b, 0.0));
    }
    SUBCASE("exact face-to-face contact counts at tolerance 0") {
        TriangleMesh b = make_box(Vec3(1.5, 0.5, 0.5), Vec3(1, 1, 1));
        auto rep = meshes_intersect(a, b, 0.0);
        CHECK(rep.intersecting);
        CHECK(!rep.pairs.empty());
        CHECK(oracle::brute_meshes_intersect(a, b, 0.0));
    }
    SUBCASE("tolerance bridges a 0.2 gap") {
        TriangleMesh b = make_box(Vec3(1.7, 0.5, 0.5), Vec3(1, 1, 1));
        CHECK(!meshes_intersect(a, b, 0.1).intersecting);
        CHECK(meshes_intersect(a, b, 0.25).intersecting);
        CHECK(oracle::brute_meshes_intersect(a, b, 0.25));
        CHECK(!oracle::brute_meshes_intersect(a, b, 0.1));
    }
}

TEST_CASE("bvh pair query agrees with exhaustive oracle on random spheres") {
    DetRng rng(21);
    for (int k = 0; k < 8; ++k) {
        TriangleMesh a = make_icosphere(Vec3::Zero(), 1.0, 1);
        Vec3 off = rng.unit_vector() * rng.uniform(1.5, 2.6);
        TriangleMesh b = make_icosphere(off, 1.0, 1);
        double tol = rng.uniform(0.0, 0.4);
        CHECK(meshes_intersect(a, b, tol).intersecting ==
              oracle::brute_meshes_intersect(a, b, tol));
    }
}

TEST_CASE("min_mesh_distance matches brute force") {
    TriangleMesh a = make_icosphere(Vec3::Zero(), 1.0, 2);
    TriangleMesh b = make_icosphere(Vec3(3, 0, 0), 1.0, 2);
    Bvh ba(a), bb(b);
    CHECK(min_mesh_distance(a, ba, b, bb) ==
          doctest::Approx(oracle::brute_min_mesh_distance(a, b)).epsilon(1e-12));
}

TEST_CASE("ray hits are complete and sorted") {
    TriangleMesh cube = make_box(Vec3(0.5, 0.5, 0.5), Vec3(1, 1, 1));
    Bvh bvh(cube);
    auto hits = bvh.ray_hits(Vec3(0.5, 0.5, -1), Vec3(0, 0, 1));
    REQUIRE(hits.size() >= 2);
    CHECK(hits.front().t == doctest::Approx(1.0));
    CHECK(hits.back().t == doctest::Approx(2.0));
}
