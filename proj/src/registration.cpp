#include "splintcad/registration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "splintcad/parallel.hpp"

namespace splintcad {

void IcpParams::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("IcpParams: max_iterations must be >= 1");
    if (convergence_rms_delta <= 0.0)
        throw std::invalid_argument("IcpParams: convergence threshold must be > 0");
    if (rejection_distance <= 0.0)
        throw std::invalid_argument("IcpParams: rejection distance must be > 0");
    if (trim_fraction <= 0.0 || trim_fraction > 1.0)
        throw std::invalid_argument("IcpParams: trim fraction must be in (0, 1]");
}

RigidTransform fit_rigid(const std::vector<Vec3>& source, const std::vector<Vec3>& target) {
    if (source.size() != target.size())
        throw std::invalid_argument("fit_rigid: point counts differ");
    size_t n = source.size();
    if (n < 3) throw std::invalid_argument("fit_rigid: need at least 3 pairs");

    Vec3 cs = Vec3::Zero(), ct = Vec3::Zero();
    for (size_t i = 0; i < n; ++i) {
        cs += source[i];
        ct += target[i];
    }
    cs /= static_cast<double>(n);
    ct /= static_cast<double>(n);

    Mat3 H = Mat3::Zero();
    for (size_t i = 0; i < n; ++i) {
        H += (source[i] - cs) * (target[i] - ct).transpose();
    }

    Eigen::JacobiSVD<Mat3> svd(H, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vec3 sigma = svd.singularValues();
    // Rank < 2 leaves the rotation undetermined (collinear configuration).
    if (sigma[1] <= 1e-10 * std::max(sigma[0], 1e-300)) {
        throw std::invalid_argument("fit_rigid: degenerate (collinear) configuration");
    }

    Mat3 U = svd.matrixU(), V = svd.matrixV();
    Mat3 D = Mat3::Identity();
    if ((V * U.transpose()).determinant() < 0.0) D(2, 2) = -1.0;
    Mat3 R = V * D * U.transpose();
    Vec3 t = ct - R * cs;
    return RigidTransform(R, t);
}

namespace {

struct Correspondence {
    Vec3 src;      // original source point
    Vec3 tgt;      // closest point on target surface
    Vec3 normal;   // target face normal at the closest point
    double dist;
    uint32_t src_index;
};

struct CorrSet {
    std::vector<Correspondence> pairs;
    size_t considered = 0;
    double rms() const {
        if (pairs.empty()) return 0.0;
        double s = 0.0;
        for (const auto& c : pairs) s += c.dist * c.dist;
        return std::sqrt(s / static_cast<double>(pairs.size()));
    }
};

CorrSet find_correspondences(const std::vector<Vec3>& src, const RigidTransform& T,
                             const TriangleMesh& target, const Bvh& bvh,
                             const IcpParams& p) {
    CorrSet out;
    out.considered = src.size();
    std::vector<Correspondence> all(src.size());
    std::vector<char> ok(src.size(), 0);
    parallel_for(0, src.size(), [&](size_t i) {
        Vec3 q = T.apply(src[i]);
        auto near = bvh.nearest(q);
        if (near.distance <= p.rejection_distance) {
            all[i] = {src[i], near.point, target.face_normal(near.triangle), near.distance,
                      static_cast<uint32_t>(i)};
            ok[i] = 1;
        }
    });
    out.pairs.reserve(src.size());
    for (size_t i = 0; i < src.size(); ++i) {
        if (ok[i]) out.pairs.push_back(all[i]);
    }
    if (p.trim_fraction < 1.0 && out.pairs.size() > 3) {
        size_t keep = std::max<size_t>(3, static_cast<size_t>(
                          std::floor(p.trim_fraction * static_cast<double>(out.pairs.size()))));
        std::stable_sort(out.pairs.begin(), out.pairs.end(),
                         [](const Correspondence& a, const Correspondence& b) {
                             if (a.dist != b.dist) return a.dist < b.dist;
                             return a.src_index < b.src_index;
                         });
        out.pairs.resize(keep);
        // Restore index order so accumulation order is input order.
        std::stable_sort(out.pairs.begin(), out.pairs.end(),
                         [](const Correspondence& a, const Correspondence& b) {
                             return a.src_index < b.src_index;
                         });
    }
    return out;
}

// One linearised point-to-plane step: minimise sum(((R p + t - q) . n)^2).
RigidTransform solve_point_to_plane(const std::vector<Correspondence>& corr,
                                    const RigidTransform& T) {
    Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> b = Eigen::Matrix<double, 6, 1>::Zero();
    for (const auto& c : corr) {
        Vec3 p = T.apply(c.src);
        Vec3 n = c.normal;
        Eigen::Matrix<double, 6, 1> J;
        J << p.cross(n), n;
        double r = n.dot(c.tgt - p);
        A += J * J.transpose();
        b += J * r;
    }
    Eigen::Matrix<double, 6, 1> x = A.ldlt().solve(b);
    Vec3 omega = x.head<3>();
    Vec3 trans = x.tail<3>();
    double angle = omega.norm();
    Mat3 R = (angle > 1e-300)
                 ? Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix()
                 : Mat3::Identity();
    return RigidTransform(R, trans) * T;
}

RigidTransform solve_point_to_point(const std::vector<Correspondence>& corr,
                                    const RigidTransform& T) {
    std::vector<Vec3> s, t;
    s.reserve(corr.size());
    t.reserve(corr.size());
    for (const auto& c : corr) {
        s.push_back(T.apply(c.src));
        t.push_back(c.tgt);
    }
    return fit_rigid(s, t) * T;
}

RigidTransform principal_axes_init(const std::vector<Vec3>& src, const TriangleMesh& target,
                                   const Bvh& bvh) {
    auto moments = [](const std::vector<Vec3>& pts) {
        Vec3 c = Vec3::Zero();
        for (const auto& p : pts) c += p;
        c /= static_cast<double>(pts.size());
        Mat3 cov = Mat3::Zero();
        for (const auto& p : pts) cov += (p - c) * (p - c).transpose();
        Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
        return std::make_pair(c, Mat3(eig.eigenvectors()));
    };
    auto [cs, axes_s] = moments(src);
    auto [ct, axes_t] = moments(target.vertices());

    double best_score = kInf;
    RigidTransform best;
    // Four sign assignments keep det(R) = +1.
    for (int sx : {1, -1}) {
        for (int sy : {1, -1}) {
            Mat3 S = Mat3::Identity();
            S(0, 0) = sx;
            S(1, 1) = sy;
            S(2, 2) = sx * sy;
            Mat3 R = axes_t * S * axes_s.transpose();
            if (R.determinant() < 0) continue;
            RigidTransform T(R, ct - R * cs);
            double score = 0.0;
            size_t step = std::max<size_t>(1, src.size() / 200);
            size_t count = 0;
            for (size_t i = 0; i < src.size(); i += step) {
                score += bvh.nearest(T.apply(src[i])).distance;
                ++count;
            }
            score /= static_cast<double>(count);
            if (score < best_score) {
                best_score = score;
                best = T;
            }
        }
    }
    return best;
}

RigidTransform centroid_init(const std::vector<Vec3>& src, const TriangleMesh& target) {
    Vec3 cs = Vec3::Zero();
    for (const auto& p : src) cs += p;
    cs /= static_cast<double>(src.size());
    Vec3 ct = Vec3::Zero();
    for (const auto& p : target.vertices()) ct += p;
    ct /= static_cast<double>(target.vertex_count());
    return RigidTransform::translation(ct - cs);
}

AlignmentResult run_icp(const std::vector<Vec3>& src, const TriangleMesh& target,
                        const Bvh& bvh, const IcpParams& params) {
    params.validate();
    if (src.empty() || target.empty()) throw std::invalid_argument("icp_align: empty input");

    RigidTransform T;
    if (params.initial) {
        T = *params.initial;
    } else if (params.use_principal_axes_init) {
        T = principal_axes_init(src, target, bvh);
    } else {
        T = centroid_init(src, target);
    }

    AlignmentResult best;
    best.transform = T;
    best.rms = kInf;

    double prev_rms = kInf;
    int iter = 0;
    int stalled = 0;
    for (; iter < params.max_iterations; ++iter) {
        CorrSet corr = find_correspondences(src, T, target, bvh, params);
        if (corr.pairs.size() < 3) {
            if (iter == 0) {
                throw std::runtime_error(
                    "icp_align: no correspondences under rejection distance (meshes too far apart)");
            }
            break;
        }
        double rms = corr.rms();
        if (rms < best.rms) {
            best.rms = rms;
            best.transform = T;
            best.inlier_fraction =
                static_cast<double>(corr.pairs.size()) / static_cast<double>(corr.considered);
            stalled = 0;
        } else if (++stalled > 5) {
            break;  // not improving; the best state is kept
        }
        if (std::abs(prev_rms - rms) < params.convergence_rms_delta) {
            ++iter;
            break;
        }
        prev_rms = rms;
        T = (params.metric == IcpMetric::PointToPlane) ? solve_point_to_plane(corr.pairs, T)
                                                       : solve_point_to_point(corr.pairs, T);
    }

    // Point-to-point polish: exact closed-form fit on converged matches.
    for (int k = 0; k < 3; ++k) {
        CorrSet corr = find_correspondences(src, best.transform, target, bvh, params);
        if (corr.pairs.size() < 3) break;
        double rms = corr.rms();
        if (rms < best.rms) {
            best.rms = rms;
            best.inlier_fraction =
                static_cast<double>(corr.pairs.size()) / static_cast<double>(corr.considered);
        }
        RigidTransform cand = solve_point_to_point(corr.pairs, best.transform);
        CorrSet after = find_correspondences(src, cand, target, bvh, params);
        if (after.pairs.size() >= 3 && after.rms() < best.rms) {
            best.transform = cand;
            best.rms = after.rms();
            best.inlier_fraction =
                static_cast<double>(after.pairs.size()) / static_cast<double>(after.considered);
        } else {
            break;
        }
    }

    best.iterations = iter;
    return best;
}

}  // namespace

AlignmentResult icp_align(const TriangleMesh& source, const TriangleMesh& target,
                          const IcpParams& params) {
    if (source.empty() || target.empty()) throw std::invalid_argument("icp_align: empty mesh");
    Bvh bvh(target);
    return run_icp(source.vertices(), target, bvh, params);
}

AlignmentResult icp_align_points(const std::vector<Vec3>& source_points,
                                 const TriangleMesh& target, const Bvh& target_bvh,
                                 const IcpParams& params) {
    return run_icp(source_points, target, target_bvh, params);
}

ScanEstimate estimate_tth_from_scans(const ScanPairSet& scans, const IcpParams& params,
                                     double same_anatomy_rms) {
    if (scans.U0.empty() || scans.L0.empty() || scans.U1.empty() || scans.L1.empty()) {
        throw std::invalid_argument("estimate_tth_from_scans: all four meshes are required");
    }

    // Upper arches tie the measurement frame to the reference frame. The
    // frame change can be large, so principal-axes initialisation is used
    // unless the caller supplied a starting transform.
    IcpParams upper_params = params;
    if (!upper_params.initial) upper_params.use_principal_axes_init = true;
    AlignmentResult upper = icp_align(scans.U1, scans.U0, upper_params);
    if (upper.rms > same_anatomy_rms) {
        throw std::runtime_error(
            "estimate_tth_from_scans: upper-arch residual too high; scans do not show the same "
            "anatomy");
    }

    TriangleMesh L_th = apply_transform(scans.L1, upper.transform);
    AlignmentResult lower = icp_align(scans.L0, L_th, params);

    ScanEstimate out;
    out.T = upper.transform;
    out.T_th = lower.transform;
    out.upper_rms = upper.rms;
    out.lower_rms = lower.rms;
    out.upper_iterations = upper.iterations;
    out.lower_iterations = lower.iterations;
    return out;
}

RigidTransform estimate_tth_from_tracker(const TrackerRecord& rec) {
    if (rec.B0.size() != rec.B1.size() || rec.B0.size() < 3) {
        throw std::invalid_argument("estimate_tth_from_tracker: bow clouds must be paired, >= 3");
    }
    RigidTransform T_B = fit_rigid(rec.B0, rec.B1);
    RigidTransform T = rec.T_D.inverse() * rec.T_F;
    return T * T_B * T.inverse();
}

}  // namespace splintcad
