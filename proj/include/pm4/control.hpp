#pragma once

#include <Eigen/Dense>

namespace pm4 {

/// Diagonal PID gains, one entry per actuated joint. The defaults pair a
/// stiff proportional term with heavy derivative action on the softly scaled
/// velocity estimate (see FilterParams).
struct Gains {
    Eigen::Vector4d kp = Eigen::Vector4d::Constant(4000.0);  // [N/m]
    Eigen::Vector4d kd = Eigen::Vector4d::Constant(400.0);   // [N s/m]
    Eigen::Vector4d ki = Eigen::Vector4d::Constant(1000.0);  // [N/(m s)]

    void validate() const;  // all entries strictly positive
};

/// First-order velocity-estimation filter b*s / (s + a), per joint. The
/// estimate also enters the integral term, so its low-frequency scale b/a
/// trades derivative authority against a steady ramp-following bias of
/// -(b/a) * velocity; the default keeps that bias small and compensates with
/// a larger kd.
struct FilterParams {
    Eigen::Vector4d a = Eigen::Vector4d::Constant(100.0);  // pole [1/s]
    Eigen::Vector4d b = Eigen::Vector4d::Constant(5.0);    // gain [-]

    void validate() const;  // a > 0, b > 0
};

/// Everything fixed over a controller's lifetime.
struct ControllerParams {
    Gains gains;
    FilterParams filter;
    double integral_limit = 10.0;  // symmetric clamp on the integral state
    double tau_max = 400.0;        // per-joint action saturation [N]

    void validate() const;
};

/// Mutable controller memory; advance it only through controller_step.
struct ControllerState {
    Eigen::Vector4d integral = Eigen::Vector4d::Zero();
    Eigen::Vector4d v = Eigen::Vector4d::Zero();
    Eigen::Vector4d q_prev = Eigen::Vector4d::Zero();
    double dt = 1e-3;  // control period [s]
};

/// State primed with the first joint sample so the initial velocity estimate is zero.
ControllerState make_controller_state(double dt, const Eigen::Vector4d& q0);

/**
 * Backward-difference image of the filter b*s/(s+a) applied to the joint
 * positions: v' = (v + b .* (q - q_prev)) / (1 + a*dt). Updates the filter
 * memory and returns the new estimate.
 */
Eigen::Vector4d velocity_estimate(ControllerState& state, const FilterParams& filter,
                                  const Eigen::Vector4d& q);

/// tau = -Kp e - Kd v - Ki integral, per joint. Positive error produces a
/// restoring (negative) action.
Eigen::Vector4d control_law(const Gains& gains, const Eigen::Vector4d& e,
                            const Eigen::Vector4d& v, const Eigen::Vector4d& integral);

/**
 * One control period: error from the reference, filtered velocity estimate,
 * clamped advance of the (e + v) integral, then the control law with output
 * saturation at +/- tau_max.
 */
Eigen::Vector4d controller_step(ControllerState& state, const ControllerParams& params,
                                const Eigen::Vector4d& q, const Eigen::Vector4d& q_d);

}  // namespace pm4
