#include "pm4/geometry.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pm4 {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void GeometricParams::validate() const {
    require(r > 0.0, "geometry: r must be positive");
    require(r_m > 0.0, "geometry: r_m must be positive");
    for (double beta : {beta_fd, beta_fi, beta_md, beta_mi}) {
        require(beta > 0.0 && beta < kHalfPi, "geometry: beta angles must lie in (0, pi/2)");
    }
}

Eigen::Matrix4d Transform::matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation;
    m.topRightCorner<3, 1>() = translation;
    return m;
}

const std::array<DhRow, 6>& ups_limb_dh() {
    static const std::array<DhRow, 6> rows = {{
        {-kHalfPi, 0.0, 0.0, 0.0, JointVariable::theta},
        {kHalfPi, 0.0, 0.0, 0.0, JointVariable::theta},
        {0.0, 0.0, 0.0, 0.0, JointVariable::d},
        {kHalfPi, 0.0, 0.0, 0.0, JointVariable::theta},
        {kHalfPi, 0.0, 0.0, 0.0, JointVariable::theta},
        {kHalfPi, 0.0, 0.0, 0.0, JointVariable::theta},
    }};
    return rows;
}

const std::array<DhRow, 4>& rpu_limb_dh() {
    static const std::array<DhRow, 4> rows = {{
        {-kHalfPi, 0.0, 0.0, 0.0, JointVariable::theta},
        {kHalfPi, 0.0, 0.0, std::numbers::pi, JointVariable::d},
        {kHalfPi, 0.0, 0.0, 0.0, JointVariable::theta},
        {0.0, 0.0, 0.0, 0.0, JointVariable::theta},
    }};
    return rows;
}

Transform dh_transform(const DhRow& row, double q) {
    const double theta = row.theta + (row.variable == JointVariable::theta ? q : 0.0);
    const double d = row.d + (row.variable == JointVariable::d ? q : 0.0);
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double ca = std::cos(row.alpha);
    const double sa = std::sin(row.alpha);

    Transform t;
    t.rotation << ct, -ca * st, sa * st,
                  st,  ca * ct, -sa * ct,
                  0.0, sa,       ca;
    t.translation << row.a * ct, row.a * st, d;
    return t;
}

Eigen::Matrix3d platform_rotation(double theta, double psi) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double cp = std::cos(psi);
    const double sp = std::sin(psi);
    Eigen::Matrix3d r;
    r << cp * ct, -sp, cp * st,
         sp * ct,  cp, sp * st,
         -st,      0.0, ct;
    return r;
}

Eigen::Matrix3d platform_rotation_dtheta(double theta, double psi) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double cp = std::cos(psi);
    const double sp = std::sin(psi);
    Eigen::Matrix3d r;
    r << -cp * st, 0.0, cp * ct,
         -sp * st, 0.0, sp * ct,
         -ct,      0.0, -st;
    return r;
}

Eigen::Matrix3d platform_rotation_dpsi(double theta, double psi) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double cp = std::cos(psi);
    const double sp = std::sin(psi);
    Eigen::Matrix3d r;
    r << -sp * ct, -cp, -sp * st,
         cp * ct,  -sp, cp * st,
         0.0,      0.0, 0.0;
    return r;
}

Eigen::Vector3d base_point(const GeometricParams& params, int limb) {
    switch (limb) {
        case 1: return {-params.r, 0.0, 0.0};
        case 2: return {params.r * std::cos(params.beta_fd), params.r * std::sin(params.beta_fd), 0.0};
        case 3: return {params.r * std::cos(params.beta_fi), -params.r * std::sin(params.beta_fi), 0.0};
        default: throw std::out_of_range("limb index must be 1, 2 or 3");
    }
}

Eigen::Vector3d platform_offset(const GeometricParams& params, int limb) {
    switch (limb) {
        case 1: return {-params.r_m, 0.0, 0.0};
        case 2: return {params.r_m * std::cos(params.beta_md), params.r_m * std::sin(params.beta_md), 0.0};
        case 3: return {params.r_m * std::cos(params.beta_mi), -params.r_m * std::sin(params.beta_mi), 0.0};
        default: throw std::out_of_range("limb index must be 1, 2 or 3");
    }
}

AttachmentPoints attachment_points(const GeometricParams& params, const Pose& pose) {
    const Eigen::Matrix3d rot = platform_rotation(pose.theta, pose.psi);
    const Eigen::Vector3d p{pose.x, 0.0, pose.z};

    AttachmentPoints pts;
    pts.base_origin = Eigen::Vector3d::Zero();
    pts.platform_origin = p;
    for (int limb = 1; limb <= 3; ++limb) {
        pts.base[limb - 1] = base_point(params, limb);
        pts.platform[limb - 1] = p + rot * platform_offset(params, limb);
    }
    return pts;
}

namespace {

// Local Z along fixed -Y, local X along fixed X, local Y along fixed Z.
Eigen::Matrix3d base_frame_rotation() {
    Eigen::Matrix3d r;
    r << 1.0, 0.0, 0.0,
         0.0, 0.0, -1.0,
         0.0, 1.0, 0.0;
    return r;
}

}  // namespace

Transform limb_base_frame(const GeometricParams& params, int limb) {
    return Transform{base_frame_rotation(), base_point(params, limb)};
}

Transform central_base_frame() {
    return Transform{base_frame_rotation(), Eigen::Vector3d::Zero()};
}

int mobility(int num_links, std::span<const int> joint_freedoms) {
    const int j = static_cast<int>(joint_freedoms.size());
    const int freedom_sum = std::accumulate(joint_freedoms.begin(), joint_freedoms.end(), 0);
    return 6 * (num_links - 1 - j) + freedom_sum;
}

std::span<const int> mechanism_joint_census() {
    static const std::array<int, 12> census = {1, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3};
    return census;
}

}  // namespace pm4
