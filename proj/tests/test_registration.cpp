#include <doctest.h>

#include <algorithm>

#include "splintcad/registration.hpp"
#include "splintcad/synth.hpp"

using namespace splintcad;

namespace {

// Rotation difference between two transforms, in radians.
double rotation_gap_rad(const RigidTransform& a, const RigidTransform& b) {
    return decompose_error(a * b.inverse()).alpha_deg * M_PI / 180.0;
}

double translation_gap(const RigidTransform& a, const RigidTransform& b) {
    return decompose_error(a * b.inverse()).t_mm;
}

}  // namespace

TEST_CASE("fit_rigid identity on identical point sets") {
    std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 1, 0.5}};
    RigidTransform T = fit_rigid(pts, pts);
    CHECK((T.matrix() - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fit_rigid recovers a known transform from 100 random points") {
    DetRng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        RigidTransform T_true = rng.random_rigid(M_PI, 25.0);
        std::vector<Vec3> src, dst;
        for (int i = 0; i < 100; ++i) {
            Vec3 p(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10));
            src.push_back(p);
            dst.push_back(T_true.apply(p));
        }
        RigidTransform T = fit_rigid(src, dst);
        CHECK((T.matrix() - T_true.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("fit_rigid error paths") {
    std::vector<Vec3> two = {{0, 0, 0}, {1, 0, 0}};
    CHECK_THROWS_AS(fit_rigid(two, two), std::invalid_argument);

    std::vector<Vec3> collinear = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    CHECK_THROWS_WITH_AS(fit_rigid(collinear, collinear), doctest::Contains("degenerate"),
                         std::invalid_argument);
}

TEST_CASE("fit_rigid conjugation invariance") {
    DetRng rng(77);
    std::vector<Vec3> src, dst;
    RigidTransform T_true = rng.random_rigid(1.0, 5.0);
    for (int i = 0; i < 40; ++i) {
        Vec3 p(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
        src.push_back(p);
        dst.push_back(T_true.apply(p));
    }
    RigidTransform base = fit_rigid(src, dst);

    RigidTransform Q = rng.random_rigid(2.0, 10.0);
    std::vector<Vec3> qsrc, qdst;
    for (size_t i = 0; i < src.size(); ++i) {
        qsrc.push_back(Q.apply(src[i]));
        qdst.push_back(Q.apply(dst[i]));
    }
    RigidTransform conj = fit_rigid(qsrc, qdst);
    RigidTransform expected = Q * base * Q.inverse();
    CHECK((conj.matrix() - expected.matrix()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("icp on identical meshes stays at identity") {
    ArchSpec spec;
    spec.grid_step = 0.8;  // coarse for speed
    ArchPair arch = make_arch_pair(spec);
    IcpParams params;
    AlignmentResult r = icp_align(arch.maxilla, arch.maxilla, params);
    CHECK(r.rms < 1e-9);
    CHECK(decompose_error(r.transform).alpha_deg < 1e-7);
    CHECK(decompose_error(r.transform).t_mm < 1e-7);
}

TEST_CASE("icp recovers small perturbations, noiseless") {
    ArchSpec spec;
    spec.grid_step = 0.8;
    ArchPair arch = make_arch_pair(spec);
    DetRng rng(13);
    for (int trial = 0; trial < 3; ++trial) {
        RigidTransform T_true = rng.random_rigid(5.0 * M_PI / 180.0, 3.0);
        TriangleMesh moved = apply_transform(arch.maxilla, T_true);
        IcpParams params;
        params.convergence_rms_delta = 1e-9;
        params.max_iterations = 200;
        AlignmentResult r = icp_align(arch.maxilla, moved, params);
        CHECK(rotation_gap_rad(r.transform, T_true) < 1e-3 * M_PI / 180.0);
        CHECK(translation_gap(r.transform, T_true) < 1e-3);
    }
}

TEST_CASE("icp with 0.05mm noise recovers within 0.1deg / 0.05mm at 95th percentile") {
    ArchSpec spec;
    spec.grid_step = 0.8;
    ArchPair arch = make_arch_pair(spec);
    std::vector<double> rot_err, trans_err;
    for (uint64_t seed = 1; seed <= 20; ++seed) {
        DetRng rng(seed);
        RigidTransform T_true = rng.random_rigid(5.0 * M_PI / 180.0, 3.0);
        TriangleMesh moved = apply_transform(arch.maxilla, T_true);
        TriangleMesh noisy = arch.maxilla;
        for (auto& v : noisy.mutable_vertices()) {
            v += 0.05 * Vec3(rng.normal(), rng.normal(), rng.normal());
        }
        IcpParams params;
        params.convergence_rms_delta = 1e-7;
        AlignmentResult r = icp_align(noisy, moved, params);
        rot_err.push_back(decompose_error(r.transform * T_true.inverse()).alpha_deg);
        trans_err.push_back(decompose_error(r.transform * T_true.inverse()).t_mm);
    }
    std::sort(rot_err.begin(), rot_err.end());
    std::sort(trans_err.begin(), trans_err.end());
    CHECK(rot_err[18] < 0.1);    // 95th percentile of 20
    CHECK(trans_err[18] < 0.05);
}

TEST_CASE("icp throws when meshes are too far apart") {
    TriangleMesh a = make_icosphere(Vec3::Zero(), 1.0, 2);
    TriangleMesh b = make_icosphere(Vec3(100, 0, 0), 1.0, 2);
    IcpParams params;
    params.rejection_distance = 2.0;
    params.initial = RigidTransform::identity();  // defeat the centroid pre-alignment
    CHECK_THROWS_WITH_AS(icp_align(a, b, params), doctest::Contains("too far"),
                         std::runtime_error);
}

TEST_CASE("estimate_tth_from_scans closed loop") {
    ArchSpec aspec;
    aspec.grid_step = 0.8;

    SUBCASE("identical scans give identity") {
        ArchPair arch = make_arch_pair(aspec);
        ScanPairSet scans{arch.maxilla, arch.mandible, arch.maxilla, arch.mandible};
        IcpParams params;
        params.convergence_rms_delta = 1e-9;
        ScanEstimate est = estimate_tth_from_scans(scans, params);
        CHECK((est.T.matrix() - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((est.T_th.matrix() - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    }

    SUBCASE("synthetic construction recovers T_true within 1e-6") {
        ScenarioSpec spec;
        spec.arch = aspec;
        spec.seed = 4;
        spec.T_true = RigidTransform::rotation(Vec3(0.2, 1, 0.1), 2.0 * M_PI / 180.0,
                                               Vec3(0.5, -1.0, -2.0));
        ScanScenario sc = make_scan_pair_scenario(spec);
        IcpParams params;
        params.convergence_rms_delta = 1e-10;
        params.max_iterations = 300;
        ScanEstimate est = estimate_tth_from_scans(sc.scans, params);
        CHECK(rotation_gap_rad(est.T_th, spec.T_true) < 1e-6);
        CHECK(translation_gap(est.T_th, spec.T_true) < 1e-6);
    }

    SUBCASE("different anatomy rejected") {
        ArchPair arch = make_arch_pair(aspec);
        ArchSpec other = aspec;
        other.arch_width = 46.0;
        other.tooth_count = 12;
        ArchPair arch2 = make_arch_pair(other);
        ScanPairSet scans{arch.maxilla, arch.mandible, arch2.maxilla, arch2.mandible};
        CHECK_THROWS_WITH_AS(estimate_tth_from_scans(scans, IcpParams{}, 0.05),
                             doctest::Contains("same anatomy"), std::runtime_error);
    }
}

TEST_CASE("estimate_tth_from_tracker") {
    SUBCASE("identity calibration collapses to the bow transform") {
        ScenarioSpec spec;
        spec.seed = 6;
        TrackerScenario tr = make_tracker_scenario(spec);
        tr.record.T_F = RigidTransform::identity();
        tr.record.T_D = RigidTransform::identity();
        RigidTransform est = estimate_tth_from_tracker(tr.record);
        CHECK((est.matrix() - tr.T_B.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }

    SUBCASE("B1 == B0 gives identity") {
        ScenarioSpec spec;
        spec.seed = 8;
        TrackerScenario tr = make_tracker_scenario(spec);
        tr.record.B1 = tr.record.B0;
        RigidTransform est = estimate_tth_from_tracker(tr.record);
        CHECK((est.matrix() - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-9);
    }

    SUBCASE("conjugation equals the stepwise pipeline on 100 random points") {
        DetRng rng(15);
        for (int scenario = 0; scenario < 100; ++scenario) {
            RigidTransform T_F = rng.random_rigid(M_PI, 30.0);
            RigidTransform T_D = rng.random_rigid(M_PI, 30.0);
            RigidTransform T_B = rng.random_rigid(M_PI / 2, 10.0);
            RigidTransform T = T_D.inverse() * T_F;
            RigidTransform direct = T * T_B * T.inverse();
            for (int i = 0; i < 100; ++i) {
                Vec3 p(rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(-40, 40));
                // Stepwise: into face-scanner space, bow motion, back out.
                Vec3 staged = T.apply(T_B.apply(T.inverse().apply(p)));
                CHECK((direct.apply(p) - staged).norm() < 1e-9);
            }
        }
    }

    SUBCASE("closed loop recovers ground truth") {
        ScenarioSpec spec;
        spec.seed = 10;
        TrackerScenario tr = make_tracker_scenario(spec);
        RigidTransform est = estimate_tth_from_tracker(tr.record);
        CHECK(rotation_gap_rad(est, tr.T_th_truth) < 1e-6);
        CHECK(translation_gap(est, tr.T_th_truth) < 1e-6);
    }

    SUBCASE("degenerate flat bow reports an error") {
        ScenarioSpec spec;
        spec.seed = 12;
        spec.degenerate_bow = true;
        TrackerScenario tr = make_tracker_scenario(spec);
        CHECK_THROWS_WITH_AS(estimate_tth_from_tracker(tr.record),
                             doctest::Contains("degenerate"), std::invalid_argument);
    }
}

TEST_CASE("icp params validated") {
    IcpParams p;
    p.max_iterations = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = IcpParams{};
    p.rejection_distance = -1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
