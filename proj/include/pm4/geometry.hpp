#pragma once

#include <Eigen/Dense>

#include <array>
#include <numbers>
#include <span>

namespace pm4 {

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/**
 * Constant geometry of the 3UPS+RPU mechanism: leg attachment radii on the
 * fixed base (r) and mobile platform (r_m), and the angular placement of the
 * two off-axis limbs on each. Limb 1 sits on the -X axis of both rings;
 * limbs 2 and 3 sit at +beta_fd / -beta_fi on the base and +beta_md /
 * -beta_mi on the platform.
 */
struct GeometricParams {
    double r = 0.40;                       // fixed-base leg radius [m]
    double r_m = 0.20;                     // mobile-platform leg radius [m]
    double beta_fd = deg_to_rad(50.0);     // limb 2 base placement [rad]
    double beta_fi = deg_to_rad(40.0);     // limb 3 base placement [rad]
    double beta_md = deg_to_rad(40.0);     // limb 2 platform placement [rad]
    double beta_mi = deg_to_rad(30.0);     // limb 3 platform placement [rad]

    /// Throws std::invalid_argument unless r, r_m > 0 and every beta lies in (0, pi/2).
    void validate() const;
};

/**
 * Task-space state of the mobile platform. The central limb confines the
 * platform origin to the X-Z plane (y is structurally zero), leaving four
 * freedoms: two translations and pitch/yaw.
 */
struct Pose {
    double x = 0.0;      // platform origin X [m]
    double z = 0.0;      // platform origin Z [m]
    double theta = 0.0;  // pitch about the fixed Y axis [rad]
    double psi = 0.0;    // yaw about the fixed Z axis [rad]
};

/// Neutral configuration: platform centered 0.635 m above the base, level.
inline Pose home_pose() { return Pose{0.0, 0.635, 0.0, 0.0}; }

enum class JointVariable { none, theta, d };

/// One Denavit-Hartenberg row; at most one of {theta, d} is the joint variable,
/// and the stored theta/d act as constant offsets added to it.
struct DhRow {
    double alpha = 0.0;
    double a = 0.0;
    double d = 0.0;
    double theta = 0.0;
    JointVariable variable = JointVariable::none;
};

/// Rigid transform kept as an explicit rotation + translation pair.
struct Transform {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Transform operator*(const Transform& rhs) const {
        return Transform{rotation * rhs.rotation, rotation * rhs.translation + translation};
    }
    Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
        return rotation * p + translation;
    }
    Eigen::Matrix4d matrix() const;
};

/// D-H rows of one external U-P-S limb, joints j = 1..6.
const std::array<DhRow, 6>& ups_limb_dh();

/// D-H rows of the central R-P-U limb, joints j = 1..4.
const std::array<DhRow, 4>& rpu_limb_dh();

/// Evaluates one D-H row with the joint value substituted into its variable slot.
Transform dh_transform(const DhRow& row, double q = 0.0);

/// Platform orientation: yaw about the fixed Z axis, then pitch about the
/// fixed Y axis (Rot(Z, psi) * Rot(Y, theta)).
Eigen::Matrix3d platform_rotation(double theta, double psi);

/// Partial derivatives of platform_rotation, used by the closure Jacobian.
Eigen::Matrix3d platform_rotation_dtheta(double theta, double psi);
Eigen::Matrix3d platform_rotation_dpsi(double theta, double psi);

/// Fixed-base attachment point of limb 1..3 (fixed frame).
Eigen::Vector3d base_point(const GeometricParams& params, int limb);

/// Platform attachment point of limb 1..3, expressed in the platform frame.
Eigen::Vector3d platform_offset(const GeometricParams& params, int limb);

/// All attachment points of the external limbs plus the two frame origins,
/// everything expressed in the fixed frame.
struct AttachmentPoints {
    std::array<Eigen::Vector3d, 3> base;      // A0, B0, C0
    std::array<Eigen::Vector3d, 3> platform;  // A, B, C
    Eigen::Vector3d base_origin;              // O_f
    Eigen::Vector3d platform_origin;          // O_m
};

AttachmentPoints attachment_points(const GeometricParams& params, const Pose& pose);

/**
 * Base frame of an external limb: origin at its fixed attachment point,
 * rotated so the first U-joint axis (local Z) lies along the fixed -Y
 * direction, parallel to the central limb's revolute axis.
 */
Transform limb_base_frame(const GeometricParams& params, int limb);

/// Base frame of the central limb: origin at O_f, same axis convention.
Transform central_base_frame();

/// Spatial mobility criterion 6*(n - 1 - j) + sum(f_i); num_links counts the
/// fixed base, joint_freedoms holds one DoF count per joint.
int mobility(int num_links, std::span<const int> joint_freedoms);

/// Link count and per-joint freedoms of this mechanism: nine mobile links,
/// five 1-DoF joints, four 2-DoF, three 3-DoF.
inline constexpr int kMechanismLinkCount = 10;
std::span<const int> mechanism_joint_census();

}  // namespace pm4
