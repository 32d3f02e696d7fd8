#include "splintcad/transform.hpp"

#include <cmath>
#include <stdexcept>

namespace splintcad {

RigidTransform::RigidTransform(const Mat4& m, bool validate) : m_(m) {
    if (validate && !is_rigid(m)) {
        throw std::invalid_argument("RigidTransform: matrix is not a rigid motion");
    }
    m_.row(3) << 0, 0, 0, 1;
}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation) {
    m_.setIdentity();
    m_.block<3, 3>(0, 0) = rotation;
    m_.block<3, 1>(0, 3) = translation;
    if (!is_rigid(m_)) {
        throw std::invalid_argument("RigidTransform: rotation block is not orthonormal");
    }
}

RigidTransform RigidTransform::translation(const Vec3& t) {
    RigidTransform T;
    T.m_.block<3, 1>(0, 3) = t;
    return T;
}

RigidTransform RigidTransform::rotation(const Vec3& axis, double angle_rad, const Vec3& t) {
    Vec3 u = axis.normalized();
    Mat3 R = Eigen::AngleAxisd(angle_rad, u).toRotationMatrix();
    return RigidTransform(R, t);
}

RigidTransform RigidTransform::from_row_major(const std::array<double, 16>& v) {
    Mat4 m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = v[static_cast<size_t>(r) * 4 + c];
    return RigidTransform(m);
}

RigidTransform RigidTransform::inverse() const {
    Mat3 Rt = rotation_block().transpose();
    RigidTransform out;
    out.m_.setIdentity();
    out.m_.block<3, 3>(0, 0) = Rt;
    out.m_.block<3, 1>(0, 3) = -Rt * translation_part();
    return out;
}

RigidTransform RigidTransform::operator*(const RigidTransform& rhs) const {
    RigidTransform out;
    out.m_ = m_ * rhs.m_;
    out.m_.row(3) << 0, 0, 0, 1;
    return out;
}

std::array<double, 16> RigidTransform::to_row_major() const {
    std::array<double, 16> v{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) v[static_cast<size_t>(r) * 4 + c] = m_(r, c);
    return v;
}

double RigidTransform::rotation_angle_deg() const {
    double tr = rotation_block().trace();
    double c = std::clamp((tr - 1.0) * 0.5, -1.0, 1.0);
    return std::acos(c) * 180.0 / M_PI;
}

bool RigidTransform::is_rigid(const Mat4& m, double tol) {
    if ((m.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > tol) return false;
    Mat3 R = m.block<3, 3>(0, 0);
    Mat3 err = R.transpose() * R - Mat3::Identity();
    if (err.cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(R.determinant() - 1.0) <= tol;
}

TransformError decompose_error(const RigidTransform& T) {
    return {T.rotation_angle_deg(), T.translation_norm()};
}

}  // namespace splintcad
