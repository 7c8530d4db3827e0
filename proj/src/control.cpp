#include "pm4/control.hpp"

#include <stdexcept>

namespace pm4 {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void Gains::validate() const {
    require((kp.array() > 0.0).all(), "control: kp entries must be positive");
    require((kd.array() > 0.0).all(), "control: kd entries must be positive");
    require((ki.array() > 0.0).all(), "control: ki entries must be positive");
}

void FilterParams::validate() const {
    require((a.array() > 0.0).all(), "control: filter poles must be positive");
    require((b.array() > 0.0).all(), "control: filter gains must be positive");
}

void ControllerParams::validate() const {
    gains.validate();
    filter.validate();
    require(integral_limit > 0.0, "control: integral_limit must be positive");
    require(tau_max > 0.0, "control: tau_max must be positive");
}

ControllerState make_controller_state(double dt, const Eigen::Vector4d& q0) {
    require(dt > 0.0, "control: dt must be positive");
    ControllerState state;
    state.dt = dt;
    state.q_prev = q0;
    return state;
}

Eigen::Vector4d velocity_estimate(ControllerState& state, const FilterParams& filter,
                                  const Eigen::Vector4d& q) {
    const Eigen::Array4d delta = (q - state.q_prev).array();
    state.v = ((state.v.array() + filter.b.array() * delta) /
               (1.0 + filter.a.array() * state.dt))
                  .matrix();
    state.q_prev = q;
    return state.v;
}

Eigen::Vector4d control_law(const Gains& gains, const Eigen::Vector4d& e,
                            const Eigen::Vector4d& v, const Eigen::Vector4d& integral) {
    return (-gains.kp.array() * e.array() - gains.kd.array() * v.array() -
            gains.ki.array() * integral.array())
        .matrix();
}

Eigen::Vector4d controller_step(ControllerState& state, const ControllerParams& params,
                                const Eigen::Vector4d& q, const Eigen::Vector4d& q_d) {
    const Eigen::Vector4d e = q - q_d;
    const Eigen::Vector4d v = velocity_estimate(state, params.filter, q);
    state.integral =
        (state.integral + state.dt * (e + v))
            .cwiseMax(-params.integral_limit)
            .cwiseMin(params.integral_limit);
    return control_law(params.gains, e, v, state.integral)
        .cwiseMax(-params.tau_max)
        .cwiseMin(params.tau_max);
}

}  // namespace pm4
