#pragma once

#include "pm4/inverse_kinematics.hpp"

namespace pm4 {

/// Newton-Raphson settings for the displacement solvers.
struct SolverSettings {
    int max_iterations = 50;
    double residual_tolerance = 1e-10;  // max-norm bound on the closure residual
    double step_tolerance = 1e-14;      // minimum meaningful update norm
    Pose initial_guess = home_pose();

    void validate() const;
};

/// Condition estimate above which a Newton step is refused as singular.
inline constexpr double kSingularityConditionLimit = 1e12;

/**
 * Reduced closure residual: one squared-length equation per external limb,
 * phi_i = q_i3^2 - |platform point - base point|^2, plus the central limb
 * phi_4 = q_42^2 - x^2 - z^2. Zero exactly when the actuated lengths are
 * consistent with the pose.
 */
Eigen::Vector4d residual_phi(const Pose& pose, const Eigen::Vector4d& active,
                             const GeometricParams& params);

/// Analytic Jacobian of residual_phi with respect to (x, z, theta, psi).
/// Independent of the actuated lengths (they enter phi only as constants).
Eigen::Matrix4d jacobian_phi(const Pose& pose, const GeometricParams& params);

struct FkResult {
    Pose pose;
    int iterations;
    double residual_norm;  // max-norm at the accepted iterate
};

/// Forward displacement on the reduced 4-equation system. Throws
/// NonConvergence or SingularJacobian.
FkResult fk_reduced(const Eigen::Vector4d& active, const GeometricParams& params,
                    const SolverSettings& settings);

struct FkFullResult {
    Pose pose;
    FullConfiguration configuration;  // passive coordinates completed at the solution
    int iterations;
    double residual_norm;
};

/**
 * Forward displacement on the full vector-closure system: 11 equations in
 * the pose plus the base joint angles of every limb. Slower than the
 * reduced solve; retained as an independent cross-check of it.
 */
FkFullResult fk_full_11(const Eigen::Vector4d& active, const GeometricParams& params,
                        const SolverSettings& settings);

/// 2-norm condition number of the reduced closure Jacobian at a pose; grows
/// without bound as the mechanism approaches a singular configuration.
double singularity_proximity(const Pose& pose, const GeometricParams& params);

/// Axis-aligned pose region bracketing both reference trajectories; used as
/// the default domain for sampling-based checks and workspace sweeps.
struct PoseBox {
    double x_min, x_max;          // [m]
    double z_min, z_max;          // [m]
    double theta_min, theta_max;  // [rad]
    double psi_min, psi_max;      // [rad]
};

PoseBox default_sampling_box();

}  // namespace pm4
