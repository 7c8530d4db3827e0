#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pm4/config.hpp"

#include <sstream>

using namespace pm4;

TEST_CASE("empty config yields the built-in defaults") {
    std::istringstream in("");
    const RunConfig parsed = parse_run_config(in, "<empty>");
    const RunConfig defaults = default_run_config();

    CHECK(parsed.geometry.r == defaults.geometry.r);
    CHECK(parsed.geometry.beta_fd == defaults.geometry.beta_fd);
    CHECK(parsed.solver.max_iterations == defaults.solver.max_iterations);
    CHECK(parsed.control.gains.kp(0) == defaults.control.gains.kp(0));
    CHECK(parsed.plant.mass(0) == defaults.plant.mass(0));
    CHECK(parsed.trajectory.duration == defaults.trajectory.duration);
    CHECK(parsed.sim.dt == defaults.sim.dt);
}

TEST_CASE("angles in files are degrees, converted on load") {
    std::istringstream in(
        "[geometry]\n"
        "beta_fd = 45\n"
        "[trajectory]\n"
        "amp_psi = 5\n"
        "base_theta = 2\n");
    const RunConfig config = parse_run_config(in, "<test>");
    CHECK(config.geometry.beta_fd == doctest::Approx(deg_to_rad(45.0)).epsilon(1e-15));
    CHECK(config.trajectory.amp_psi == doctest::Approx(deg_to_rad(5.0)).epsilon(1e-15));
    CHECK(config.trajectory.base.theta == doctest::Approx(deg_to_rad(2.0)).epsilon(1e-15));
}

TEST_CASE("per-joint values broadcast from one entry or take four") {
    std::istringstream in(
        "[control]\n"
        "kp = 5000\n"
        "kd = 10 20 30 40\n");
    const RunConfig config = parse_run_config(in, "<test>");
    CHECK(config.control.gains.kp == Eigen::Vector4d::Constant(5000.0));
    CHECK(config.control.gains.kd == Eigen::Vector4d(10, 20, 30, 40));

    std::istringstream bad(
        "[control]\n"
        "kp = 1 2\n");
    CHECK_THROWS_AS(parse_run_config(bad, "<test>"), ConfigError);
}

TEST_CASE("unknown keys and sections are rejected with line numbers") {
    std::istringstream unknown_key(
        "[geometry]\n"
        "radius = 0.4\n");
    CHECK_THROWS_WITH_AS(parse_run_config(unknown_key, "<test>"),
                         "<test>:2: unknown key 'radius' in [geometry]", ConfigError);

    std::istringstream unknown_section("[motor]\nvoltage = 24\n");
    CHECK_THROWS_AS(parse_run_config(unknown_section, "<test>"), ConfigError);

    std::istringstream no_section("r = 0.4\n");
    CHECK_THROWS_AS(parse_run_config(no_section, "<test>"), ConfigError);

    std::istringstream not_a_number("[geometry]\nr = wide\n");
    CHECK_THROWS_AS(parse_run_config(not_a_number, "<test>"), ConfigError);
}

TEST_CASE("module invariants are enforced on load") {
    std::istringstream negative_radius("[geometry]\nr = -0.4\n");
    CHECK_THROWS_AS(parse_run_config(negative_radius, "<test>"), ConfigError);

    std::istringstream zero_gain("[control]\nkp = 0\n");
    CHECK_THROWS_AS(parse_run_config(zero_gain, "<test>"), ConfigError);

    std::istringstream bad_beta("[geometry]\nbeta_md = 120\n");
    CHECK_THROWS_AS(parse_run_config(bad_beta, "<test>"), ConfigError);

    std::istringstream bad_dt("[control]\ndt = 0\n");
    CHECK_THROWS_AS(parse_run_config(bad_dt, "<test>"), ConfigError);
}

TEST_CASE("trajectory kind and ellipse keys") {
    std::istringstream in(
        "[trajectory]\n"
        "kind = elliptic\n"
        "duration = 12\n"
        "approach1_duration = 1.5\n"
        "semi_z = 0.04\n");
    const RunConfig config = parse_run_config(in, "<test>");
    CHECK(config.trajectory.kind == TrajectoryKind::elliptic);
    CHECK(config.trajectory.duration == 12.0);
    CHECK(config.trajectory.approach[0].duration == 1.5);
    CHECK(config.trajectory.semi_z == 0.04);

    std::istringstream bad("[trajectory]\nkind = spiral\n");
    CHECK_THROWS_AS(parse_run_config(bad, "<test>"), ConfigError);
}

TEST_CASE("comments and blank lines are ignored") {
    std::istringstream in(
        "# top comment\n"
        "\n"
        "[geometry]  # section\n"
        "r = 0.5  # inline comment\n");
    const RunConfig config = parse_run_config(in, "<test>");
    CHECK(config.geometry.r == 0.5);
}

TEST_CASE("render_config round-trips through the parser") {
    RunConfig config = default_run_config();
    config.geometry.r = 0.42;
    config.control.gains.kd = Eigen::Vector4d(1, 2, 3, 4);
    config.trajectory.kind = TrajectoryKind::elliptic;
    config.trajectory.semi_x = 0.03;
    config.sim.dt = 2e-3;

    std::istringstream in(render_config(config));
    const RunConfig reparsed = parse_run_config(in, "<rendered>");
    CHECK(reparsed.geometry.r == config.geometry.r);
    CHECK(reparsed.control.gains.kd == config.control.gains.kd);
    CHECK(reparsed.trajectory.kind == config.trajectory.kind);
    CHECK(reparsed.trajectory.semi_x == config.trajectory.semi_x);
    CHECK(reparsed.sim.dt == config.sim.dt);
    CHECK(std::abs(reparsed.geometry.beta_fd - config.geometry.beta_fd) < 1e-12);
}
