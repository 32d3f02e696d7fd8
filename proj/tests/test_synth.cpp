#include <doctest.h>

#include "oracles.hpp"
#include "splintcad/queries.hpp"
#include "splintcad/synth.hpp"

using namespace splintcad;

TEST_CASE("arch pair basics") {
    ArchSpec spec;
    spec.grid_step = 0.5;
    ArchPair arch = make_arch_pair(spec);

    CHECK(arch.maxilla.is_watertight());
    CHECK(arch.mandible.is_watertight());
    CHECK(!arch.occlusal.empty());
    CHECK(!arch.occlusal.is_watertight());  // trimmed open patch
    CHECK(!arch.palate_triangles.empty());

    SUBCASE("minimum interocclusal distance equals the specified MI gap") {
        Bvh bu(arch.maxilla), bl(arch.mandible);
        double d = min_mesh_distance(arch.maxilla, bu, arch.mandible, bl);
        // Tessellated spheres are slightly inscribed; allow one grid step.
        CHECK(d == doctest::Approx(spec.mi_gap).epsilon(0.5));
        CHECK(d >= spec.mi_gap - 1e-9);  // tessellation never undercuts the gap
    }

    SUBCASE("identical specs give bit-identical meshes") {
        ArchPair again = make_arch_pair(spec);
        REQUIRE(again.maxilla.vertex_count() == arch.maxilla.vertex_count());
        for (size_t i = 0; i < again.maxilla.vertex_count(); ++i) {
            CHECK(again.maxilla.vertices()[i] == arch.maxilla.vertices()[i]);
        }
        REQUIRE(again.mandible.triangle_count() == arch.mandible.triangle_count());
    }

    SUBCASE("tooth count orders occlusal area") {
        ArchSpec few = spec;
        few.tooth_count = 4;
        ArchSpec many = spec;
        many.tooth_count = 14;
        CHECK(make_arch_pair(few).occlusal.total_area() <
              make_arch_pair(many).occlusal.total_area());
    }
}

TEST_CASE("arch spec validation") {
    ArchSpec bad;
    bad.tooth_count = 3;
    CHECK_THROWS_AS(make_arch_pair(bad), std::invalid_argument);

    bad = ArchSpec{};
    bad.cusp_height = 5.0;  // taller than the cusp radius allows
    CHECK_THROWS_AS(make_arch_pair(bad), std::invalid_argument);

    bad = ArchSpec{};
    bad.mi_gap = -0.1;
    CHECK_THROWS_AS(make_arch_pair(bad), std::invalid_argument);
}

TEST_CASE("sparse arches keep the MI gap via tip contact") {
    ArchSpec spec;
    spec.tooth_count = 4;
    spec.grid_step = 0.5;
    ArchPair arch = make_arch_pair(spec);
    Bvh bu(arch.maxilla), bl(arch.mandible);
    double d = min_mesh_distance(arch.maxilla, bu, arch.mandible, bl);
    CHECK(d >= spec.mi_gap - 1e-9);
    CHECK(d <= spec.mi_gap + 0.1);
}

TEST_CASE("scan scenario honours its construction") {
    ScenarioSpec spec;
    spec.arch.grid_step = 0.8;
    spec.seed = 3;
    spec.T_true = RigidTransform::translation(Vec3(0, 0, -2));
    ScanScenario sc = make_scan_pair_scenario(spec);

    // U1 must be exactly M^-1 U0 at zero noise.
    RigidTransform Minv = sc.frame_change.inverse();
    for (size_t i = 0; i < 20; ++i) {
        size_t k = i * 97 % sc.scans.U0.vertex_count();
        CHECK((sc.scans.U1.vertices()[k] - Minv.apply(sc.scans.U0.vertices()[k])).norm() < 1e-12);
    }
    for (size_t i = 0; i < 20; ++i) {
        size_t k = i * 61 % sc.scans.L0.vertex_count();
        Vec3 expect = Minv.apply(spec.T_true.apply(sc.scans.L0.vertices()[k]));
        CHECK((sc.scans.L1.vertices()[k] - expect).norm() < 1e-12);
    }
}

TEST_CASE("deterministic rng sequences repeat per seed") {
    DetRng a(99), b(99), c(100);
    bool all_same = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        double va = a.uniform(), vb = b.uniform(), vc = c.uniform();
        all_same = all_same && (va == vb);
        any_diff = any_diff || (va != vc);
    }
    CHECK(all_same);
    CHECK(any_diff);
}
