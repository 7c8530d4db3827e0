#include "pm4/forward_kinematics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pm4 {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double condition_estimate(const Eigen::MatrixXd& m) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sigma = svd.singularValues();
    const double smallest = sigma(sigma.size() - 1);
    if (smallest <= 0.0) return std::numeric_limits<double>::infinity();
    return sigma(0) / smallest;
}

}  // namespace

void SolverSettings::validate() const {
    require(max_iterations >= 1, "solver: max_iterations must be at least 1");
    require(residual_tolerance > 0.0, "solver: residual_tolerance must be positive");
    require(step_tolerance > 0.0, "solver: step_tolerance must be positive");
}

Eigen::Vector4d residual_phi(const Pose& pose, const Eigen::Vector4d& active,
                             const GeometricParams& params) {
    const Eigen::Matrix3d rot = platform_rotation(pose.theta, pose.psi);
    const Eigen::Vector3d p{pose.x, 0.0, pose.z};

    Eigen::Vector4d phi;
    for (int limb = 1; limb <= 3; ++limb) {
        const Eigen::Vector3d d = p + rot * platform_offset(params, limb) - base_point(params, limb);
        phi(limb - 1) = active(limb - 1) * active(limb - 1) - d.squaredNorm();
    }
    phi(3) = active(3) * active(3) - pose.x * pose.x - pose.z * pose.z;
    return phi;
}

Eigen::Matrix4d jacobian_phi(const Pose& pose, const GeometricParams& params) {
    const Eigen::Matrix3d rot = platform_rotation(pose.theta, pose.psi);
    const Eigen::Matrix3d drot_dtheta = platform_rotation_dtheta(pose.theta, pose.psi);
    const Eigen::Matrix3d drot_dpsi = platform_rotation_dpsi(pose.theta, pose.psi);
    const Eigen::Vector3d p{pose.x, 0.0, pose.z};

    Eigen::Matrix4d jac = Eigen::Matrix4d::Zero();
    for (int limb = 1; limb <= 3; ++limb) {
        const Eigen::Vector3d offset = platform_offset(params, limb);
        const Eigen::Vector3d d = p + rot * offset - base_point(params, limb);
        jac(limb - 1, 0) = -2.0 * d.x();
        jac(limb - 1, 1) = -2.0 * d.z();
        jac(limb - 1, 2) = -2.0 * d.dot(drot_dtheta * offset);
        jac(limb - 1, 3) = -2.0 * d.dot(drot_dpsi * offset);
    }
    jac(3, 0) = -2.0 * pose.x;
    jac(3, 1) = -2.0 * pose.z;
    return jac;
}

namespace {

// A few free Newton steps after the tolerance is met, kept only while they
// strictly reduce the residual. Near ill-conditioned poses the tolerance in
// squared-length units still leaves the pose several digits short; polishing
// recovers them at machine precision.
void polish_reduced(Pose& pose, Eigen::Vector4d& phi, double& norm,
                    const Eigen::Vector4d& active, const GeometricParams& params) {
    for (int extra = 0; extra < 3; ++extra) {
        const Eigen::Matrix4d jac = jacobian_phi(pose, params);
        const Eigen::Vector4d step = jac.partialPivLu().solve(-phi);
        if (!step.allFinite()) return;
        Pose next = pose;
        next.x += step(0);
        next.z += step(1);
        next.theta += step(2);
        next.psi += step(3);
        const Eigen::Vector4d next_phi = residual_phi(next, active, params);
        const double next_norm = next_phi.lpNorm<Eigen::Infinity>();
        if (next_norm >= norm) return;
        pose = next;
        phi = next_phi;
        norm = next_norm;
    }
}

}  // namespace

FkResult fk_reduced(const Eigen::Vector4d& active, const GeometricParams& params,
                    const SolverSettings& settings) {
    settings.validate();
    Pose pose = settings.initial_guess;
    Eigen::Vector4d phi = residual_phi(pose, active, params);
    double norm = phi.lpNorm<Eigen::Infinity>();

    for (int iter = 1; iter <= settings.max_iterations; ++iter) {
        if (norm < settings.residual_tolerance) {
            polish_reduced(pose, phi, norm, active, params);
            return {pose, iter - 1, norm};
        }
        const Eigen::Matrix4d jac = jacobian_phi(pose, params);
        if (condition_estimate(jac) > kSingularityConditionLimit) {
            throw SingularJacobian("reduced closure Jacobian is numerically singular");
        }
        const Eigen::Vector4d step = jac.partialPivLu().solve(-phi);
        if (step.norm() < settings.step_tolerance) {
            throw NonConvergence("reduced solver stalled below step tolerance");
        }

        // Half the step while the residual norm fails to decrease.
        double scale = 1.0;
        Pose next = pose;
        Eigen::Vector4d next_phi;
        double next_norm = norm;
        for (int halving = 0; halving <= 8; ++halving) {
            next.x = pose.x + scale * step(0);
            next.z = pose.z + scale * step(1);
            next.theta = pose.theta + scale * step(2);
            next.psi = pose.psi + scale * step(3);
            next_phi = residual_phi(next, active, params);
            next_norm = next_phi.lpNorm<Eigen::Infinity>();
            if (next_norm < norm) break;
            scale *= 0.5;
        }
        pose = next;
        phi = next_phi;
        norm = next_norm;
    }
    if (norm < settings.residual_tolerance) {
        polish_reduced(pose, phi, norm, active, params);
        return {pose, settings.max_iterations, norm};
    }
    throw NonConvergence("reduced solver hit the iteration cap at residual " +
                         std::to_string(norm));
}

namespace {

// Unknown layout for the full closure solve:
//   0..3   x, z, theta, psi
//   4..9   (q_i1, q_i2) for limbs 1..3
//   10     central revolute angle
using FullVector = Eigen::Matrix<double, 11, 1>;
using FullMatrix = Eigen::Matrix<double, 11, 11>;

// Leg direction in the fixed frame for base-joint angles (q1, q2), and its
// partials. Derived from the limb base frame axis convention.
Eigen::Vector3d leg_direction(double q1, double q2) {
    return {std::cos(q1) * std::sin(q2), -std::cos(q2), std::sin(q1) * std::sin(q2)};
}

FullVector full_residual(const FullVector& u, const Eigen::Vector4d& active,
                         const GeometricParams& params) {
    const Eigen::Matrix3d rot = platform_rotation(u(2), u(3));
    const Eigen::Vector3d p{u(0), 0.0, u(1)};

    FullVector f;
    for (int limb = 1; limb <= 3; ++limb) {
        const double q1 = u(4 + 2 * (limb - 1));
        const double q2 = u(5 + 2 * (limb - 1));
        const Eigen::Vector3d chain_end =
            base_point(params, limb) + active(limb - 1) * leg_direction(q1, q2);
        const Eigen::Vector3d platform_point = p + rot * platform_offset(params, limb);
        f.segment<3>(3 * (limb - 1)) = chain_end - platform_point;
    }
    f(9) = u(0) + std::sin(u(10)) * active(3);
    f(10) = u(1) - std::cos(u(10)) * active(3);
    return f;
}

FullMatrix full_jacobian(const FullVector& u, const Eigen::Vector4d& active,
                         const GeometricParams& params) {
    const Eigen::Matrix3d drot_dtheta = platform_rotation_dtheta(u(2), u(3));
    const Eigen::Matrix3d drot_dpsi = platform_rotation_dpsi(u(2), u(3));

    FullMatrix jac = FullMatrix::Zero();
    for (int limb = 1; limb <= 3; ++limb) {
        const int row = 3 * (limb - 1);
        const int col = 4 + 2 * (limb - 1);
        const double q1 = u(col);
        const double q2 = u(col + 1);
        const double len = active(limb - 1);
        const Eigen::Vector3d offset = platform_offset(params, limb);

        jac.block<3, 1>(row, 0) = -Eigen::Vector3d::UnitX();
        jac.block<3, 1>(row, 1) = -Eigen::Vector3d::UnitZ();
        jac.block<3, 1>(row, 2) = -(drot_dtheta * offset);
        jac.block<3, 1>(row, 3) = -(drot_dpsi * offset);
        jac.block<3, 1>(row, col) =
            len * Eigen::Vector3d{-std::sin(q1) * std::sin(q2), 0.0,
                                  std::cos(q1) * std::sin(q2)};
        jac.block<3, 1>(row, col + 1) =
            len * Eigen::Vector3d{std::cos(q1) * std::cos(q2), std::sin(q2),
                                  std::sin(q1) * std::cos(q2)};
    }
    jac(9, 0) = 1.0;
    jac(9, 10) = std::cos(u(10)) * active(3);
    jac(10, 1) = 1.0;
    jac(10, 10) = std::sin(u(10)) * active(3);
    return jac;
}

// Same post-convergence refinement as the reduced solver.
void polish_full(FullVector& u, FullVector& f, double& norm, const Eigen::Vector4d& active,
                 const GeometricParams& params) {
    for (int extra = 0; extra < 3; ++extra) {
        const FullMatrix jac = full_jacobian(u, active, params);
        const FullVector step = jac.partialPivLu().solve(-f);
        if (!step.allFinite()) return;
        const FullVector next = u + step;
        const FullVector next_f = full_residual(next, active, params);
        const double next_norm = next_f.lpNorm<Eigen::Infinity>();
        if (next_norm >= norm) return;
        u = next;
        f = next_f;
        norm = next_norm;
    }
}

// Completes the configuration at the solved iterate; the S-joint and central
// U-joint angles are determined by the pose and do not enter the closure.
FkFullResult assemble_result(const FullVector& u, const Eigen::Vector4d& active,
                             const GeometricParams& params, int iterations, double norm) {
    FkFullResult result;
    result.pose = Pose{u(0), u(1), u(2), u(3)};
    result.iterations = iterations;
    result.residual_norm = norm;

    for (int limb = 1; limb <= 3; ++limb) {
        const UJointAngles angles{u(4 + 2 * (limb - 1)), u(5 + 2 * (limb - 1))};
        const SphericalAngles s = ik_spherical_angles(result.pose, angles, params, limb);
        result.configuration.limb[limb - 1] = {angles.q1, angles.q2, active(limb - 1),
                                               s.q4,      s.q5,      s.q6,
                                               s.gimbal_lock};
    }
    result.configuration.central = ik_central_full(result.pose);
    result.configuration.central.q1 = u(10);
    result.configuration.central.q2 = active(3);
    return result;
}

}  // namespace

FkFullResult fk_full_11(const Eigen::Vector4d& active, const GeometricParams& params,
                        const SolverSettings& settings) {
    settings.validate();

    // Seed the passive angles from the guess pose; the actuated lengths keep
    // their given values throughout.
    FullVector u;
    const Pose& guess = settings.initial_guess;
    u(0) = guess.x;
    u(1) = guess.z;
    u(2) = guess.theta;
    u(3) = guess.psi;
    for (int limb = 1; limb <= 3; ++limb) {
        const UJointAngles angles = ik_limb_u_angles(guess, params, limb);
        u(4 + 2 * (limb - 1)) = angles.q1;
        u(5 + 2 * (limb - 1)) = angles.q2;
    }
    u(10) = ik_central(guess).q1;

    FullVector f = full_residual(u, active, params);
    double norm = f.lpNorm<Eigen::Infinity>();

    for (int iter = 1; iter <= settings.max_iterations; ++iter) {
        if (norm < settings.residual_tolerance) {
            polish_full(u, f, norm, active, params);
            return assemble_result(u, active, params, iter - 1, norm);
        }
        const FullMatrix jac = full_jacobian(u, active, params);
        if (condition_estimate(jac) > kSingularityConditionLimit) {
            throw SingularJacobian("full closure Jacobian is numerically singular");
        }
        const FullVector step = jac.partialPivLu().solve(-f);
        if (step.norm() < settings.step_tolerance) {
            throw NonConvergence("full solver stalled below step tolerance");
        }

        double scale = 1.0;
        FullVector next = u;
        FullVector next_f;
        double next_norm = norm;
        for (int halving = 0; halving <= 8; ++halving) {
            next = u + scale * step;
            next_f = full_residual(next, active, params);
            next_norm = next_f.lpNorm<Eigen::Infinity>();
            if (next_norm < norm) break;
            scale *= 0.5;
        }
        u = next;
        f = next_f;
        norm = next_norm;
    }
    if (norm < settings.residual_tolerance) {
        polish_full(u, f, norm, active, params);
        return assemble_result(u, active, params, settings.max_iterations, norm);
    }
    throw NonConvergence("full solver hit the iteration cap at residual " +
                         std::to_string(norm));
}

double singularity_proximity(const Pose& pose, const GeometricParams& params) {
    return condition_estimate(jacobian_phi(pose, params));
}

PoseBox default_sampling_box() {
    return PoseBox{-0.10, 0.10, 0.55, 0.80,
                   deg_to_rad(-20.0), deg_to_rad(20.0),
                   deg_to_rad(-20.0), deg_to_rad(20.0)};
}

}  // namespace pm4
