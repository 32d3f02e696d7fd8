#pragma once

#include <array>

#include "splintcad/geometry.hpp"

namespace splintcad {

// 4x4 homogeneous rigid motion (rotation + translation, no scale).
class RigidTransform {
public:
    RigidTransform() { m_.setIdentity(); }
    explicit RigidTransform(const Mat4& m, bool validate = true);
    RigidTransform(const Mat3& rotation, const Vec3& translation);

    static RigidTransform identity() { return RigidTransform(); }
    static RigidTransform translation(const Vec3& t);
    // Angle in radians about a (not necessarily unit) axis, then translate.
    static RigidTransform rotation(const Vec3& axis, double angle_rad,
                                   const Vec3& t = Vec3::Zero());
    static RigidTransform from_row_major(const std::array<double, 16>& v);

    const Mat4& matrix() const { return m_; }
    Mat3 rotation_block() const { return m_.block<3, 3>(0, 0); }
    Vec3 translation_part() const { return m_.block<3, 1>(0, 3); }

    Vec3 apply(const Vec3& p) const { return rotation_block() * p + translation_part(); }
    Vec3 apply_vector(const Vec3& v) const { return rotation_block() * v; }

    RigidTransform inverse() const;
    RigidTransform operator*(const RigidTransform& rhs) const;

    std::array<double, 16> to_row_major() const;

    // Rotation angle in degrees and translation norm in mm (accuracy reporting).
    double rotation_angle_deg() const;
    double translation_norm() const { return translation_part().norm(); }

    static bool is_rigid(const Mat4& m, double tol = 1e-9);

private:
    Mat4 m_;
};

// alpha [deg] from arccos((trace(R)-1)/2), t [mm] as translation norm.
struct TransformError {
    double alpha_deg = 0.0;
    double t_mm = 0.0;
};
TransformError decompose_error(const RigidTransform& T);

}  // namespace splintcad
