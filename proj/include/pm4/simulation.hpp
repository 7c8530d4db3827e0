#pragma once

#include "pm4/control.hpp"
#include "pm4/errors.hpp"
#include "pm4/forward_kinematics.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pm4 {

enum class TrajectoryKind { sinusoidal, elliptic, hold };

const char* to_string(TrajectoryKind kind);

/// Straight-line lead-in to a target pose over a fixed duration.
struct ApproachSegment {
    Pose target;
    double duration;  // [s]
};

/**
 * Reference motion description. `base` is the start pose and supplies every
 * coordinate a kind leaves untouched. The sinusoidal kind oscillates z and
 * yaw about the base; the elliptic kind runs the approach segments and then
 * traces an ellipse in the X-Z plane.
 */
struct TrajectorySpec {
    TrajectoryKind kind = TrajectoryKind::sinusoidal;
    Pose base = home_pose();
    double amp_z = 0.05;                 // z oscillation amplitude [m]
    double amp_psi = deg_to_rad(10.0);   // yaw oscillation amplitude [rad]
    double frequency = 0.2;              // periodic-part frequency [Hz]
    std::vector<ApproachSegment> approach;
    double center_x = 0.0;               // ellipse center [m]
    double center_z = 0.75;
    double semi_x = 0.05;                // ellipse semi-axes [m]
    double semi_z = 0.06;
    double duration = 30.0;              // total run length [s]

    void validate() const;
};

/// Sinusoidal spec with this module's default amplitudes.
TrajectorySpec sinusoidal_trajectory();

/// Elliptic spec with the standard two-segment approach; the ellipse starts
/// exactly at the last approach target.
TrajectorySpec elliptic_trajectory();

/// Constant hold at `base`.
TrajectorySpec hold_trajectory();

Pose trajectory_sinusoidal(const TrajectorySpec& spec, double t);
Pose trajectory_elliptic(const TrajectorySpec& spec, double t);
Pose sample_trajectory(const TrajectorySpec& spec, double t);

/// Decoupled per-joint actuator model m_eff * qddot = k_u * u - c * qdot.
struct PlantParams {
    Eigen::Vector4d mass = Eigen::Vector4d::Constant(2.0);        // m_eff [kg]
    Eigen::Vector4d damping = Eigen::Vector4d::Constant(50.0);    // c [N s/m]
    Eigen::Vector4d force_gain = Eigen::Vector4d::Constant(1.0);  // k_u [N/unit]

    void validate() const;  // mass > 0, damping >= 0, force_gain > 0
};

struct PlantState {
    Eigen::Vector4d q = Eigen::Vector4d::Zero();
    Eigen::Vector4d qdot = Eigen::Vector4d::Zero();
};

/// Semi-implicit Euler update: velocity first, then position with the new velocity.
PlantState plant_step(const PlantParams& params, const PlantState& state,
                      const Eigen::Vector4d& u, double dt);

struct SimOptions {
    double dt = 1e-3;                  // loop period [s]
    double encoder_resolution = 0.0;   // measurement quantum [m]; 0 disables
};

struct SimSample {
    double t;
    Pose ref;
    Eigen::Vector4d q_ref;  // joint references from inverse kinematics
    Eigen::Vector4d q;      // measured joints
    Eigen::Vector4d u;      // control actions
    Eigen::Vector4d e;      // q - q_ref
};

/// Uniform-rate record of one closed-loop run, plus the run parameters that
/// produced it (echoed into the CSV header).
struct SimLog {
    double dt = 1e-3;
    std::vector<std::pair<std::string, std::string>> provenance;
    std::vector<SimSample> samples;
};

/**
 * Fixed-step closed loop: sample the Cartesian reference, convert it to
 * joint references through the closed-form inverse kinematics, run the
 * joint-space controller on the measured joints, then advance the plant.
 * The plant starts at the joint solution of the initial reference, at rest.
 * Throws UnreachableReference if any tick's reference has no IK solution.
 */
SimLog run_closed_loop(const GeometricParams& geometry, const TrajectorySpec& trajectory,
                       const ControllerParams& control, const PlantParams& plant,
                       const SimOptions& options);

/// Signed mean of (q - q_ref) for one joint (0..3) over the whole log [m].
double mean_error(const SimLog& log, int joint);

/// Signed mean errors of all four joints.
Eigen::Vector4d mean_errors(const SimLog& log);

/**
 * Time lag of `actual` behind `reference` [s]: the peak of their
 * mean-removed, Hann-tapered cross-correlation, refined by quadratic
 * interpolation. Positive when `actual` lags. Lags are searched within
 * +/- max_lag. Throws DegenerateSignal if either series has no variation.
 */
double phase_offset(std::span<const double> reference, std::span<const double> actual,
                    double dt, double max_lag = 0.5);

/// phase_offset of each joint's measured series against its reference.
Eigen::Vector4d phase_offsets(const SimLog& log, double max_lag = 0.5);

/// CSV: provenance as '#' comment lines, a header row, one row per tick,
/// values with nine significant digits. Columns:
/// t, ref pose (4), joint refs (4), joints (4), actions (4), errors (4).
void write_csv(const SimLog& log, std::ostream& out);
std::string to_csv(const SimLog& log);

}  // namespace pm4
