#include "pm4/inverse_kinematics.hpp"

#include <cmath>

namespace pm4 {

namespace {

constexpr double kGimbalSinTolerance = 1e-9;

Eigen::Vector3d leg_vector(const Pose& pose, const GeometricParams& params, int limb) {
    const Eigen::Vector3d mobile =
        Eigen::Vector3d{pose.x, 0.0, pose.z} +
        platform_rotation(pose.theta, pose.psi) * platform_offset(params, limb);
    return mobile - base_point(params, limb);
}

// Factor m = R4(q4) * R5(q5) * R6(q6) with each factor a D-H rotation of
// twist +pi/2. The middle angle is taken in [0, pi]; sin(q5) near zero is a
// representation singularity where only q4 -/+ q6 is determined, resolved by
// pinning q4 = 0.
SphericalAngles factor_spherical(const Eigen::Matrix3d& m) {
    const double s5 = std::hypot(m(0, 1), m(1, 1));
    const double c5 = -m(2, 1);

    SphericalAngles out{};
    out.q5 = std::atan2(s5, c5);
    if (s5 < kGimbalSinTolerance) {
        out.gimbal_lock = true;
        out.q4 = 0.0;
        if (c5 > 0.0) {
            // q5 = 0: only q4 - q6 observable.
            out.q5 = 0.0;
            out.q6 = -std::atan2(m(1, 0), m(0, 0));
        } else {
            // q5 = pi: only q4 + q6 observable.
            out.q5 = std::numbers::pi;
            out.q6 = std::atan2(-m(1, 0), -m(0, 0));
        }
        return out;
    }
    out.gimbal_lock = false;
    out.q4 = std::atan2(m(1, 1), m(0, 1));
    out.q6 = std::atan2(m(2, 2), m(2, 0));
    return out;
}

}  // namespace

CentralCoordinates ik_central(const Pose& pose) {
    const double len_sq = pose.x * pose.x + pose.z * pose.z;
    if (len_sq <= kLengthToleranceSq) {
        throw DegeneratePose("central limb length is zero at x = z = 0");
    }
    return {std::atan2(-pose.x, pose.z), std::sqrt(len_sq)};
}

double ik_limb_active(const Pose& pose, const GeometricParams& params, int limb) {
    const double len_sq = leg_vector(pose, params, limb).squaredNorm();
    if (len_sq <= kLengthToleranceSq) {
        throw UnreachablePose("degenerate leg length on limb " + std::to_string(limb));
    }
    return std::sqrt(len_sq);
}

UJointAngles ik_limb_u_angles(const Pose& pose, const GeometricParams& params, int limb) {
    const Eigen::Vector3d d = leg_vector(pose, params, limb);
    if (d.squaredNorm() <= kLengthToleranceSq) {
        throw UnreachablePose("degenerate leg length on limb " + std::to_string(limb));
    }
    // In the limb base frame the leg direction is (cos q1 sin q2,
    // sin q1 sin q2, cos q2); local coordinates are (d.x, d.z, -d.y).
    const double in_plane_sq = d.x() * d.x() + d.z() * d.z();
    if (in_plane_sq <= kLengthToleranceSq) {
        throw UJointSingular("leg aligned with the base U-joint first axis on limb " +
                             std::to_string(limb));
    }
    return {std::atan2(d.z(), d.x()), std::atan2(std::sqrt(in_plane_sq), -d.y())};
}

SphericalAngles ik_spherical_angles(const Pose& pose, const UJointAngles& u,
                                    const GeometricParams& params, int limb) {
    const auto& rows = ups_limb_dh();
    const Transform chain = limb_base_frame(params, limb) *
                            dh_transform(rows[0], u.q1) *
                            dh_transform(rows[1], u.q2);
    const Eigen::Matrix3d residual =
        chain.rotation.transpose() * platform_rotation(pose.theta, pose.psi);
    return factor_spherical(residual);
}

CentralConfiguration ik_central_full(const Pose& pose) {
    const CentralCoordinates rp = ik_central(pose);
    const auto& rows = rpu_limb_dh();
    const Transform chain = central_base_frame() *
                            dh_transform(rows[0], rp.q1) *
                            dh_transform(rows[1], rp.q2);
    const Eigen::Matrix3d n =
        chain.rotation.transpose() * platform_rotation(pose.theta, pose.psi);
    // n = R3(q3) * R4(q4): twist +pi/2 then twist 0.
    const double q3 = std::atan2(n(0, 2), -n(1, 2));
    const double q4 = std::atan2(n(2, 0), n(2, 1));
    return {rp.q1, rp.q2, q3, q4};
}

FullConfiguration ik_full(const Pose& pose, const GeometricParams& params) {
    FullConfiguration config;
    for (int limb = 1; limb <= 3; ++limb) {
        const double q3 = ik_limb_active(pose, params, limb);
        const UJointAngles u = ik_limb_u_angles(pose, params, limb);
        const SphericalAngles s = ik_spherical_angles(pose, u, params, limb);
        config.limb[limb - 1] = {u.q1, u.q2, q3, s.q4, s.q5, s.q6, s.gimbal_lock};
    }
    config.central = ik_central_full(pose);
    return config;
}

}  // namespace pm4
