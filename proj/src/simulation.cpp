#include "pm4/simulation.hpp"

#include "pm4/inverse_kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace pm4 {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

Pose lerp_pose(const Pose& from, const Pose& to, double s) {
    return Pose{from.x + s * (to.x - from.x), from.z + s * (to.z - from.z),
                from.theta + s * (to.theta - from.theta),
                from.psi + s * (to.psi - from.psi)};
}

}  // namespace

const char* to_string(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::sinusoidal: return "sinusoidal";
        case TrajectoryKind::elliptic: return "elliptic";
        case TrajectoryKind::hold: return "hold";
    }
    return "unknown";
}

void TrajectorySpec::validate() const {
    require(duration > 0.0, "trajectory: duration must be positive");
    if (kind != TrajectoryKind::hold) {
        require(frequency > 0.0, "trajectory: frequency must be positive");
    }
    for (const auto& segment : approach) {
        require(segment.duration > 0.0, "trajectory: approach durations must be positive");
    }
}

TrajectorySpec sinusoidal_trajectory() {
    return TrajectorySpec{};
}

TrajectorySpec elliptic_trajectory() {
    TrajectorySpec spec;
    spec.kind = TrajectoryKind::elliptic;
    spec.approach = {{Pose{0.05, 0.69, 0.0, 0.0}, 2.0},
                     {Pose{0.05, 0.75, 0.0, 0.0}, 2.0}};
    // center_x = approach end minus semi_x, so the ellipse opens at its
    // rightmost point and the reference stays continuous.
    spec.center_x = 0.0;
    spec.center_z = 0.75;
    return spec;
}

TrajectorySpec hold_trajectory() {
    TrajectorySpec spec;
    spec.kind = TrajectoryKind::hold;
    return spec;
}

Pose trajectory_sinusoidal(const TrajectorySpec& spec, double t) {
    const double phase = kTwoPi * spec.frequency * t;
    Pose pose = spec.base;
    pose.z += spec.amp_z * std::sin(phase);
    pose.psi += spec.amp_psi * std::sin(phase);
    return pose;
}

Pose trajectory_elliptic(const TrajectorySpec& spec, double t) {
    Pose from = spec.base;
    double elapsed = 0.0;
    for (const auto& segment : spec.approach) {
        if (t < elapsed + segment.duration) {
            return lerp_pose(from, segment.target, (t - elapsed) / segment.duration);
        }
        elapsed += segment.duration;
        from = segment.target;
    }
    const double phase = kTwoPi * spec.frequency * (t - elapsed);
    Pose pose = from;
    pose.x = spec.center_x + spec.semi_x * std::cos(phase);
    pose.z = spec.center_z + spec.semi_z * std::sin(phase);
    return pose;
}

Pose sample_trajectory(const TrajectorySpec& spec, double t) {
    switch (spec.kind) {
        case TrajectoryKind::sinusoidal: return trajectory_sinusoidal(spec, t);
        case TrajectoryKind::elliptic: return trajectory_elliptic(spec, t);
        case TrajectoryKind::hold: return spec.base;
    }
    throw std::logic_error("unhandled trajectory kind");
}

void PlantParams::validate() const {
    require((mass.array() > 0.0).all(), "plant: masses must be positive");
    require((damping.array() >= 0.0).all(), "plant: damping must be non-negative");
    require((force_gain.array() > 0.0).all(), "plant: force gains must be positive");
}

PlantState plant_step(const PlantParams& params, const PlantState& state,
                      const Eigen::Vector4d& u, double dt) {
    PlantState next;
    const Eigen::Array4d accel =
        (params.force_gain.array() * u.array() - params.damping.array() * state.qdot.array()) /
        params.mass.array();
    next.qdot = state.qdot + dt * accel.matrix();
    next.q = state.q + dt * next.qdot;
    return next;
}

namespace {

std::vector<std::pair<std::string, std::string>> describe_run(
    const GeometricParams& geometry, const TrajectorySpec& trajectory,
    const ControllerParams& control, const PlantParams& plant, const SimOptions& options) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };
    auto joints = [&fmt](const Eigen::Vector4d& v) {
        if (v(0) == v(1) && v(1) == v(2) && v(2) == v(3)) return fmt(v(0));
        return fmt(v(0)) + " " + fmt(v(1)) + " " + fmt(v(2)) + " " + fmt(v(3));
    };
    std::vector<std::pair<std::string, std::string>> p;
    p.emplace_back("trajectory.kind", to_string(trajectory.kind));
    p.emplace_back("trajectory.duration_s", fmt(trajectory.duration));
    p.emplace_back("trajectory.frequency_hz", fmt(trajectory.frequency));
    p.emplace_back("trajectory.base", fmt(trajectory.base.x) + " " + fmt(trajectory.base.z) +
                                          " " + fmt(trajectory.base.theta) + " " +
                                          fmt(trajectory.base.psi));
    p.emplace_back("trajectory.amp_z_m", fmt(trajectory.amp_z));
    p.emplace_back("trajectory.amp_psi_rad", fmt(trajectory.amp_psi));
    if (trajectory.kind == TrajectoryKind::elliptic) {
        for (std::size_t i = 0; i < trajectory.approach.size(); ++i) {
            const auto& seg = trajectory.approach[i];
            p.emplace_back("trajectory.approach" + std::to_string(i + 1),
                           fmt(seg.target.x) + " " + fmt(seg.target.z) + " over " +
                               fmt(seg.duration) + " s");
        }
        p.emplace_back("trajectory.ellipse_center_m", fmt(trajectory.center_x) + " " + fmt(trajectory.center_z));
        p.emplace_back("trajectory.ellipse_semi_m", fmt(trajectory.semi_x) + " " + fmt(trajectory.semi_z));
    }
    p.emplace_back("geometry.r_m", fmt(geometry.r));
    p.emplace_back("geometry.r_m_m", fmt(geometry.r_m));
    p.emplace_back("geometry.beta_rad", fmt(geometry.beta_fd) + " " + fmt(geometry.beta_fi) +
                                            " " + fmt(geometry.beta_md) + " " +
                                            fmt(geometry.beta_mi));
    p.emplace_back("control.kp", joints(control.gains.kp));
    p.emplace_back("control.kd", joints(control.gains.kd));
    p.emplace_back("control.ki", joints(control.gains.ki));
    p.emplace_back("control.filter_a", joints(control.filter.a));
    p.emplace_back("control.filter_b", joints(control.filter.b));
    p.emplace_back("control.integral_limit", fmt(control.integral_limit));
    p.emplace_back("control.tau_max", fmt(control.tau_max));
    p.emplace_back("plant.mass_kg", joints(plant.mass));
    p.emplace_back("plant.damping", joints(plant.damping));
    p.emplace_back("plant.force_gain", joints(plant.force_gain));
    p.emplace_back("sim.dt_s", fmt(options.dt));
    p.emplace_back("sim.encoder_resolution_m", fmt(options.encoder_resolution));
    return p;
}

Eigen::Vector4d quantize(const Eigen::Vector4d& q, double resolution) {
    if (resolution <= 0.0) return q;
    return (q.array() / resolution).round().matrix() * resolution;
}

}  // namespace

SimLog run_closed_loop(const GeometricParams& geometry, const TrajectorySpec& trajectory,
                       const ControllerParams& control, const PlantParams& plant,
                       const SimOptions& options) {
    geometry.validate();
    trajectory.validate();
    control.validate();
    plant.validate();
    require(options.dt > 0.0, "sim: dt must be positive");

    const long ticks = std::lround(trajectory.duration / options.dt);

    SimLog log;
    log.dt = options.dt;
    log.provenance = describe_run(geometry, trajectory, control, plant, options);
    log.samples.reserve(static_cast<std::size_t>(ticks));

    auto joint_refs = [&](const Pose& pose, long tick, double t) {
        try {
            return ik_full(pose, geometry).active();
        } catch (const KinematicsError& err) {
            throw UnreachableReference("reference unreachable at tick " + std::to_string(tick) +
                                           " (t = " + std::to_string(t) + " s): " + err.what(),
                                       tick, t);
        }
    };

    PlantState state;
    state.q = joint_refs(sample_trajectory(trajectory, 0.0), 0, 0.0);
    ControllerState controller = make_controller_state(options.dt, state.q);

    for (long tick = 0; tick < ticks; ++tick) {
        const double t = static_cast<double>(tick) * options.dt;
        const Pose ref = sample_trajectory(trajectory, t);
        const Eigen::Vector4d q_ref = joint_refs(ref, tick, t);
        const Eigen::Vector4d q_meas = quantize(state.q, options.encoder_resolution);
        const Eigen::Vector4d u = controller_step(controller, control, q_meas, q_ref);

        log.samples.push_back({t, ref, q_ref, q_meas, u, q_meas - q_ref});
        state = plant_step(plant, state, u, options.dt);
    }
    return log;
}

double mean_error(const SimLog& log, int joint) {
    if (log.samples.empty()) throw EmptyLog("mean_error on an empty log");
    if (joint < 0 || joint > 3) throw std::out_of_range("joint index must be 0..3");
    double sum = 0.0;
    for (const auto& sample : log.samples) sum += sample.e(joint);
    return sum / static_cast<double>(log.samples.size());
}

Eigen::Vector4d mean_errors(const SimLog& log) {
    Eigen::Vector4d m;
    for (int joint = 0; joint < 4; ++joint) m(joint) = mean_error(log, joint);
    return m;
}

double phase_offset(std::span<const double> reference, std::span<const double> actual,
                    double dt, double max_lag) {
    require(dt > 0.0, "phase_offset: dt must be positive");
    const long n = static_cast<long>(std::min(reference.size(), actual.size()));
    if (n < 2) throw DegenerateSignal("phase_offset needs at least two samples");

    double ref_mean = 0.0;
    double act_mean = 0.0;
    for (long i = 0; i < n; ++i) {
        ref_mean += reference[i];
        act_mean += actual[i];
    }
    ref_mean /= static_cast<double>(n);
    act_mean /= static_cast<double>(n);

    // Rounding in the mean leaves a constant series with a tiny nonzero
    // variance, so degeneracy is judged on the exact range instead.
    const auto [ref_lo, ref_hi] = std::minmax_element(reference.begin(), reference.end());
    const auto [act_lo, act_hi] = std::minmax_element(actual.begin(), actual.end());
    if (*ref_lo == *ref_hi || *act_lo == *act_hi) {
        throw DegenerateSignal("phase_offset on a constant series");
    }

    const long max_shift = std::min<long>(n - 1, std::lround(max_lag / dt));

    // Hann-tapered, mean-removed series. The taper suppresses the partial-
    // period edge ripple that otherwise tilts the correlation plateau by
    // several samples; normalizing by the taper overlap removes the envelope
    // tilt the taper itself would introduce.
    std::vector<double> taper(static_cast<std::size_t>(n));
    std::vector<double> ref_w(static_cast<std::size_t>(n));
    std::vector<double> act_w(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const double win =
            0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n - 1)));
        taper[static_cast<std::size_t>(i)] = win;
        ref_w[static_cast<std::size_t>(i)] = (reference[i] - ref_mean) * win;
        act_w[static_cast<std::size_t>(i)] = (actual[i] - act_mean) * win;
    }

    auto correlation = [&](long lag) {
        const long start = std::max<long>(0, -lag);
        const long stop = std::min<long>(n, n - lag);
        double acc = 0.0;
        double overlap = 0.0;
        for (long i = start; i < stop; ++i) {
            acc += ref_w[static_cast<std::size_t>(i)] * act_w[static_cast<std::size_t>(i + lag)];
            overlap += taper[static_cast<std::size_t>(i)] * taper[static_cast<std::size_t>(i + lag)];
        }
        return overlap > 0.0 ? acc / overlap : 0.0;
    };

    long best_lag = 0;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> corr(static_cast<std::size_t>(2 * max_shift + 1));
    for (long lag = -max_shift; lag <= max_shift; ++lag) {
        const double c = correlation(lag);
        corr[static_cast<std::size_t>(lag + max_shift)] = c;
        if (c > best) {
            best = c;
            best_lag = lag;
        }
    }

    double refined = static_cast<double>(best_lag);
    if (best_lag > -max_shift && best_lag < max_shift) {
        const double left = corr[static_cast<std::size_t>(best_lag - 1 + max_shift)];
        const double mid = corr[static_cast<std::size_t>(best_lag + max_shift)];
        const double right = corr[static_cast<std::size_t>(best_lag + 1 + max_shift)];
        const double denom = left - 2.0 * mid + right;
        if (denom < 0.0) refined += 0.5 * (left - right) / denom;
    }
    return refined * dt;
}

Eigen::Vector4d phase_offsets(const SimLog& log, double max_lag) {
    if (log.samples.empty()) throw EmptyLog("phase_offsets on an empty log");
    const std::size_t n = log.samples.size();
    std::vector<double> ref(n);
    std::vector<double> act(n);
    Eigen::Vector4d out;
    for (int joint = 0; joint < 4; ++joint) {
        for (std::size_t i = 0; i < n; ++i) {
            ref[i] = log.samples[i].q_ref(joint);
            act[i] = log.samples[i].q(joint);
        }
        out(joint) = phase_offset(ref, act, log.dt, max_lag);
    }
    return out;
}

namespace {

void append_csv_value(std::string& row, double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    row += ',';
    row += buf;
}

}  // namespace

std::string to_csv(const SimLog& log) {
    std::string out;
    out.reserve(log.samples.size() * 220 + 1024);
    for (const auto& [key, value] : log.provenance) {
        out += "# " + key + " = " + value + "\n";
    }
    out +=
        "t,ref_x,ref_z,ref_theta,ref_psi,"
        "q13_ref,q23_ref,q33_ref,q42_ref,"
        "q13,q23,q33,q42,"
        "u13,u23,u33,u42,"
        "e13,e23,e33,e42\n";

    std::string row;
    for (const auto& s : log.samples) {
        row.clear();
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", s.t);
        row += buf;
        append_csv_value(row, s.ref.x);
        append_csv_value(row, s.ref.z);
        append_csv_value(row, s.ref.theta);
        append_csv_value(row, s.ref.psi);
        for (int j = 0; j < 4; ++j) append_csv_value(row, s.q_ref(j));
        for (int j = 0; j < 4; ++j) append_csv_value(row, s.q(j));
        for (int j = 0; j < 4; ++j) append_csv_value(row, s.u(j));
        for (int j = 0; j < 4; ++j) append_csv_value(row, s.e(j));
        row += '\n';
        out += row;
    }
    return out;
}

void write_csv(const SimLog& log, std::ostream& out) {
    out << to_csv(log);
}

}  // namespace pm4
