#pragma once

#include <stdexcept>
#include <string>

namespace pm4 {

/// Base class for all kinematic failures (degenerate poses, solver breakdown).
struct KinematicsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Central-limb length would be zero (x = z = 0).
struct DegeneratePose : KinematicsError {
    using KinematicsError::KinematicsError;
};

/// Requested pose yields a non-positive squared leg length.
struct UnreachablePose : KinematicsError {
    using KinematicsError::KinematicsError;
};

/// Leg direction aligned with the base U-joint first axis; both atan2
/// arguments vanish and the joint angles are undefined.
struct UJointSingular : KinematicsError {
    using KinematicsError::KinematicsError;
};

/// Iterative solver hit its iteration cap without meeting tolerance.
struct NonConvergence : KinematicsError {
    using KinematicsError::KinematicsError;
};

/// Jacobian condition estimate exceeded the singularity threshold mid-solve.
struct SingularJacobian : KinematicsError {
    using KinematicsError::KinematicsError;
};

/// Closed-loop reference became kinematically unreachable at some tick.
struct UnreachableReference : KinematicsError {
    UnreachableReference(const std::string& what, long tick_index, double time_s)
        : KinematicsError(what), tick(tick_index), time(time_s) {}
    long tick;
    double time;
};

struct EmptyLog : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Signal has no variation; a correlation lag is meaningless.
struct DegenerateSignal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pm4
