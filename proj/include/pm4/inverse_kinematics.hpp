#pragma once

#include "pm4/errors.hpp"
#include "pm4/geometry.hpp"

namespace pm4 {

/// Squared lengths at or below this are treated as degenerate [m^2].
inline constexpr double kLengthToleranceSq = 1e-12;

/// Central limb coordinates: base revolute angle and prismatic length.
struct CentralCoordinates {
    double q1;  // revolute angle [rad]
    double q2;  // prismatic length [m]
};

/// Base U-joint angles of an external limb.
struct UJointAngles {
    double q1;  // in-plane direction angle [rad]
    double q2;  // angle from the joint's first axis [rad]
};

/// Platform S-joint angles of an external limb. When the extraction is at a
/// representation singularity the canonical representative (q4 = 0) is
/// returned with gimbal_lock set.
struct SphericalAngles {
    double q4;
    double q5;
    double q6;
    bool gimbal_lock;
};

/// All six joint coordinates of one external U-P-S limb.
struct LimbConfiguration {
    double q1;  // base U angle [rad]
    double q2;  // base U angle [rad]
    double q3;  // prismatic length [m] (actuated)
    double q4;  // S angle [rad]
    double q5;  // S angle [rad]
    double q6;  // S angle [rad]
    bool gimbal_lock;
};

/// All four joint coordinates of the central R-P-U limb.
struct CentralConfiguration {
    double q1;  // base revolute angle [rad]
    double q2;  // prismatic length [m] (actuated)
    double q3;  // platform U angle [rad]
    double q4;  // platform U angle [rad]
};

/// Every generalized coordinate of the mechanism at one pose.
struct FullConfiguration {
    std::array<LimbConfiguration, 3> limb;  // external limbs 1..3
    CentralConfiguration central;

    /// Actuated coordinates {q13, q23, q33, q42}.
    Eigen::Vector4d active() const {
        return {limb[0].q3, limb[1].q3, limb[2].q3, central.q2};
    }
};

/// Central limb solution: q2 = hypot(x, z), q1 = atan2(-x, z).
/// Throws DegeneratePose when x = z = 0.
CentralCoordinates ik_central(const Pose& pose);

/// Actuated length of external limb 1..3 (distance between its attachment
/// points). Throws UnreachablePose on a degenerate squared length.
double ik_limb_active(const Pose& pose, const GeometricParams& params, int limb);

/// Base U-joint angles of external limb 1..3, from the leg direction
/// decomposed in the limb base frame. Throws UJointSingular when the leg is
/// aligned with the joint's first axis.
UJointAngles ik_limb_u_angles(const Pose& pose, const GeometricParams& params, int limb);

/// Platform S-joint angles: factors the residual rotation between the leg
/// chain after the prismatic joint and the platform orientation.
SphericalAngles ik_spherical_angles(const Pose& pose, const UJointAngles& u,
                                    const GeometricParams& params, int limb);

/// Central platform U-joint angles, factoring the residual rotation of the
/// central chain against the platform orientation.
CentralConfiguration ik_central_full(const Pose& pose);

/// Complete closed-form inverse kinematics for all four limbs.
FullConfiguration ik_full(const Pose& pose, const GeometricParams& params);

}  // namespace pm4
