#pragma once

#include <optional>
#include <vector>

#include "splintcad/bvh.hpp"
#include "splintcad/mesh.hpp"
#include "splintcad/transform.hpp"

namespace splintcad {

// Closed-form least-squares rigid fit (SVD, scale fixed to 1) mapping
// source[i] onto target[i]. Throws on <3 pairs or collinear configurations.
RigidTransform fit_rigid(const std::vector<Vec3>& source, const std::vector<Vec3>& target);

enum class IcpMetric { PointToPoint, PointToPlane };

struct IcpParams {
    int max_iterations = 100;
    double convergence_rms_delta = 1e-5;   // mm
    double rejection_distance = 2.0;       // mm
    double trim_fraction = 0.9;            // keep this share of best pairs
    IcpMetric metric = IcpMetric::PointToPlane;
    std::optional<RigidTransform> initial;
    bool use_principal_axes_init = false;  // when no initial transform given

    void validate() const;
};

struct AlignmentResult {
    RigidTransform transform;  // maps source into target frame
    double rms = 0.0;          // over accepted correspondences
    int iterations = 0;
    double inlier_fraction = 0.0;
};

// ICP aligning source onto target. RMS over accepted iterations is monotone
// non-increasing; the best transform seen is returned. Throws when no
// correspondences survive the rejection distance.
AlignmentResult icp_align(const TriangleMesh& source, const TriangleMesh& target,
                          const IcpParams& params = {});

// As above, using source vertices only against a prebuilt target index.
AlignmentResult icp_align_points(const std::vector<Vec3>& source_points,
                                 const TriangleMesh& target, const Bvh& target_bvh,
                                 const IcpParams& params = {});

// --- therapeutic-transform estimation -----------------------------------

// Arch scan pairs: U0/L0 in the reference frame (MI bite), U1/L1 in the
// measurement frame (therapeutic bite).
struct ScanPairSet {
    TriangleMesh U0, L0, U1, L1;
};

struct ScanEstimate {
    RigidTransform T;     // measurement -> reference frame (upper-arch fit)
    RigidTransform T_th;  // mandibular shift from MI to TP in the reference frame
    double upper_rms = 0.0;
    double lower_rms = 0.0;
    int upper_iterations = 0;
    int lower_iterations = 0;
};

// Upper arches define the frame change, the lower arch carried through it
// defines the therapeutic motion. Throws when either alignment fails or the
// upper-arch residual exceeds same_anatomy_rms (scans of different anatomy).
ScanEstimate estimate_tth_from_scans(const ScanPairSet& scans, const IcpParams& params = {},
                                     double same_anatomy_rms = 0.5);

// Tracker bow record: paired bow point clouds plus calibration transforms
// linking face-scanner and dental-model frames.
struct TrackerRecord {
    std::vector<Vec3> B0, B1;  // bow markers in MI and TP, paired by index
    RigidTransform T_F;        // face-scanner alignment
    RigidTransform T_D;        // dental-model alignment
};

// T_th = T * T_B * T^-1 with T = T_D^-1 * T_F and T_B the bow motion.
RigidTransform estimate_tth_from_tracker(const TrackerRecord& rec);

}  // namespace splintcad
