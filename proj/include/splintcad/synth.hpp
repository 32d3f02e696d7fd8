#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splintcad/mesh.hpp"
#include "splintcad/registration.hpp"
#include "splintcad/transform.hpp"

namespace splintcad {

// Deterministic RNG (splitmix64 core) so identical seeds give identical
// meshes regardless of platform toolchain defaults.
class DetRng {
public:
    explicit DetRng(uint64_t seed) : state_(seed) {}
    uint64_t next_u64();
    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);
    double normal();                        // Box-Muller, one value per call
    Vec3 unit_vector();
    RigidTransform random_rigid(double max_angle_rad, double max_translation);

private:
    uint64_t state_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

// ---- primitive fixtures --------------------------------------------------

TriangleMesh make_box(const Vec3& center, const Vec3& size);
TriangleMesh make_icosphere(const Vec3& center, double radius, int subdivisions);
// Open rectangular patch in the z=z0 plane, (nx x ny) cells.
TriangleMesh make_plate_patch(double x0, double x1, double y0, double y1, double z0,
                              int nx, int ny);

// ---- dental arch generator ------------------------------------------------

struct ArchSpec {
    double arch_width = 36.0;       // parabola span [mm]
    double arch_depth = 24.0;       // parabola apex offset [mm]
    int tooth_count = 10;           // upper arch
    double cusp_radius = 2.2;       // [mm]
    double cusp_height = 1.8;       // [mm]
    double mi_gap = 0.3;            // interocclusal min distance in MI [mm]
    double plate_thickness = 3.0;   // jaw slab [mm]
    double palate_rise = 1.5;       // palate vault lift inside the arch [mm]
    double grid_step = 0.4;         // surface tessellation [mm]
    uint64_t seed = 1;

    void validate() const;
};

struct ArchPair {
    TriangleMesh maxilla;    // watertight slab, teeth pointing down; gum plane z = 0
    TriangleMesh mandible;   // watertight slab, teeth pointing up
    TriangleMesh occlusal;   // open patch: cusp caps of the maxilla
    // Palate-region triangle ids of the maxilla (inside the arch, vault area).
    std::vector<uint32_t> palate_triangles;
    double gum_plane_z = 0.0;
    double mandible_gum_z = 0.0;
};

ArchPair make_arch_pair(const ArchSpec& spec);

// ---- scan-pair scenario (two intraoral scans) -----------------------------

struct ScenarioSpec {
    ArchSpec arch;
    RigidTransform T_true;              // prescribed therapeutic motion
    double noise_sigma = 0.0;           // isotropic Gaussian vertex noise [mm]
    RigidTransform seating_offset;      // injected splint-seating disturbance
    RigidTransform sliding_offset;      // injected mandibular sliding
    int bow_marker_count = 8;
    bool degenerate_bow = false;        // collinear markers (error-path testing)
    uint64_t seed = 1;
};

struct ScanScenario {
    ScanPairSet scans;
    RigidTransform T_true;
    RigidTransform frame_change;  // the hidden M relating MCS to RCS
};

// U1 = M^-1 U0 + noise, L1 = M^-1 T_true L0 + noise for a seeded rigid M.
ScanScenario make_scan_pair_scenario(const ScenarioSpec& spec);

struct TrackerScenario {
    TrackerRecord record;
    RigidTransform T_B;
    RigidTransform T_th_truth;
};

TrackerScenario make_tracker_scenario(const ScenarioSpec& spec);

// ---- full validation study -------------------------------------------------

// One synthetic case: the designed splint plus "scanned" measurement meshes.
struct StudyCase {
    std::string name;
    ArchPair arch;
    RigidTransform T_th;
    TriangleMesh splint_model;     // digital design
    TriangleMesh splint_scan;      // fabricated splint re-scan
    TriangleMesh maxilla_scan;
    TriangleMesh mandible_scan;
    // Assembly A: splint seated on the maxilla (seating offset applies).
    TriangleMesh assembly_splint_scan;
    TriangleMesh assembly_maxilla_scan;
    // Assembly B: mandible positioned on the splint.
    TriangleMesh occluded_maxilla_scan;
    TriangleMesh occluded_mandible_scan;
    // Ground truth for the accuracy stages.
    RigidTransform seating_offset;
    RigidTransform sliding_offset;
    double noise_sigma = 0.0;
};

struct SplintParams;  // builder
std::vector<StudyCase> make_study(const std::vector<ScenarioSpec>& specs,
                                  const SplintParams& params);

}  // namespace splintcad
