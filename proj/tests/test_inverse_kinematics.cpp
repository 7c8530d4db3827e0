#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "pm4/forward_kinematics.hpp"
#include "pm4/inverse_kinematics.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace pm4;

namespace {

constexpr double kPi = std::numbers::pi;

// Full D-H chain of an external limb evaluated at a configuration.
Transform compose_limb_chain(const GeometricParams& params, int limb,
                             const LimbConfiguration& c, int rows_used = 6) {
    const auto& rows = ups_limb_dh();
    const double values[6] = {c.q1, c.q2, c.q3, c.q4, c.q5, c.q6};
    Transform t = limb_base_frame(params, limb);
    for (int j = 0; j < rows_used; ++j) t = t * dh_transform(rows[j], values[j]);
    return t;
}

}  // namespace

TEST_CASE("ik_central: examples") {
    const CentralCoordinates home = ik_central(home_pose());
    CHECK(home.q1 == 0.0);
    CHECK(home.q2 == doctest::Approx(0.635).epsilon(1e-15));

    const CentralCoordinates quarter = ik_central(Pose{-0.635, 0.0, 0.0, 0.0});
    CHECK(quarter.q1 == doctest::Approx(kPi / 2.0).epsilon(1e-15));
    CHECK(quarter.q2 == doctest::Approx(0.635).epsilon(1e-15));

    // Frozen from direct evaluation of hypot/atan2 at (0.05, 0.69).
    const CentralCoordinates off = ik_central(Pose{0.05, 0.69, 0.0, 0.0});
    CHECK(std::abs(off.q2 - 0.6918092223) < 1e-9);
    CHECK(std::abs(off.q1 - (-0.0723373305)) < 1e-9);
    CHECK(off.q2 == doctest::Approx(std::hypot(0.05, 0.69)).epsilon(1e-15));
    CHECK(off.q1 == doctest::Approx(std::atan2(-0.05, 0.69)).epsilon(1e-15));
}

TEST_CASE("ik_central: exactly inverts the central closure") {
    std::mt19937 rng(50);
    for (int i = 0; i < 200; ++i) {
        const Pose pose = oracle::sample_pose(rng);
        const CentralCoordinates c = ik_central(pose);
        CHECK(std::abs(-std::sin(c.q1) * c.q2 - pose.x) < 1e-15);
        CHECK(std::abs(std::cos(c.q1) * c.q2 - pose.z) < 1e-15);
    }
}

TEST_CASE("ik_central: degenerate at the base origin") {
    CHECK_THROWS_AS(ik_central(Pose{0.0, 0.0, 0.0, 0.0}), DegeneratePose);
}

TEST_CASE("ik_limb_active: home-pose lengths match the distance oracle") {
    const GeometricParams params;
    CHECK(std::abs(ik_limb_active(home_pose(), params, 1) - 0.665751) < 1e-6);
    CHECK(std::abs(ik_limb_active(home_pose(), params, 2) - 0.667574) < 1e-6);
    CHECK(std::abs(ik_limb_active(home_pose(), params, 3) - 0.667574) < 1e-6);
}

TEST_CASE("ik_limb_active: collinear geometry gives a vertical leg") {
    GeometricParams params;
    params.r_m = params.r;  // platform ring as wide as the base ring
    CHECK(ik_limb_active(Pose{0.0, 0.635, 0.0, 0.0}, params, 1) ==
          doctest::Approx(0.635).epsilon(1e-15));
}

TEST_CASE("ik_limb_active: zero-length leg is unreachable") {
    // Pitch of -pi/2 folds the limb-1 platform point exactly onto its base
    // point when x = -r and z = r_m.
    const GeometricParams params;
    const Pose folded{-params.r, params.r_m, -kPi / 2.0, 0.0};
    REQUIRE((attachment_points(params, folded).platform[0] -
             attachment_points(params, folded).base[0])
                .norm() < 1e-15);
    CHECK_THROWS_AS(ik_limb_active(folded, params, 1), UnreachablePose);
    CHECK_THROWS_AS(ik_limb_u_angles(folded, params, 1), UnreachablePose);
}

TEST_CASE("ik_limb_active: equals the attachment-distance oracle everywhere sampled") {
    const GeometricParams params;
    std::mt19937 rng(51);
    for (int i = 0; i < 300; ++i) {
        const Pose pose = oracle::sample_pose(rng);
        for (int limb = 1; limb <= 3; ++limb) {
            CHECK(std::abs(ik_limb_active(pose, params, limb) -
                           oracle::leg_length(params, pose, limb)) < 1e-12);
        }
        // Limb 1 also matches the expanded polynomial.
        CHECK(std::abs(ik_limb_active(pose, params, 1) -
                       std::sqrt(oracle::limb1_a(params, pose))) < 1e-12);
    }
}

TEST_CASE("ik_limb_u_angles: chain lands on the platform attachment point") {
    const GeometricParams params;

    SUBCASE("home pose, limb 1") {
        const Pose pose = home_pose();
        const UJointAngles u = ik_limb_u_angles(pose, params, 1);
        const double q3 = ik_limb_active(pose, params, 1);

        LimbConfiguration c{u.q1, u.q2, q3, 0, 0, 0, false};
        const Transform chain = compose_limb_chain(params, 1, c, 3);
        const AttachmentPoints pts = attachment_points(params, pose);
        CHECK((chain.translation - pts.platform[0]).norm() < 1e-10);

        // psi = 0 keeps the leg in the X-Z plane: no deviation from the
        // joint's in-plane zero position.
        CHECK(u.q2 == doctest::Approx(kPi / 2.0).epsilon(1e-15));
    }

    SUBCASE("offset pose, every limb") {
        const Pose pose{0.02, 0.66, 0.1, 0.15};
        for (int limb = 1; limb <= 3; ++limb) {
            const UJointAngles u = ik_limb_u_angles(pose, params, limb);
            const double q3 = ik_limb_active(pose, params, limb);
            LimbConfiguration c{u.q1, u.q2, q3, 0, 0, 0, false};
            const Transform chain = compose_limb_chain(params, limb, c, 3);
            const AttachmentPoints pts = attachment_points(params, pose);
            CHECK((chain.translation - pts.platform[limb - 1]).norm() < 1e-10);
        }
    }
}

TEST_CASE("ik_limb_u_angles: consistent with the expanded scalar forms on limb 1") {
    const GeometricParams params;
    std::mt19937 rng(52);
    for (int i = 0; i < 300; ++i) {
        const Pose pose = oracle::sample_pose(rng);
        const UJointAngles u = ik_limb_u_angles(pose, params, 1);

        const double b = oracle::limb1_b(params, pose);
        REQUIRE(-b > 0.0);
        const double in_plane = std::sqrt(-b);

        // q2 from the in-plane leg norm against the out-of-plane component.
        const double out_of_plane =
            params.r_m * std::cos(pose.theta) * std::sin(pose.psi);
        CHECK(std::abs(u.q2 - std::atan2(in_plane, out_of_plane)) < 1e-12);

        // q1 decomposes the in-plane direction.
        const double dz = pose.z + params.r_m * std::sin(pose.theta);
        const double dx = pose.x + params.r -
                          params.r_m * std::cos(pose.theta) * std::cos(pose.psi);
        CHECK(std::abs(std::sin(u.q1) * in_plane - dz) < 1e-12);
        CHECK(std::abs(std::cos(u.q1) * in_plane - dx) < 1e-12);
    }
}

TEST_CASE("ik_limb_u_angles: leg along the first joint axis is singular") {
    // Chosen so the limb-1 leg vector has zero X and Z components but a
    // nonzero Y component: both arguments of the direction atan2 vanish.
    const GeometricParams params;
    Pose pose;
    pose.theta = -0.5;
    pose.psi = 0.8;
    pose.z = params.r_m * std::sin(0.5);
    pose.x = params.r_m * std::cos(pose.theta) * std::cos(pose.psi) - params.r;

    const Eigen::Vector3d d = attachment_points(params, pose).platform[0] -
                              attachment_points(params, pose).base[0];
    REQUIRE(std::abs(d.x()) < 1e-15);
    REQUIRE(std::abs(d.z()) < 1e-15);
    REQUIRE(std::abs(d.y()) > 0.1);

    CHECK_THROWS_AS(ik_limb_u_angles(pose, params, 1), UJointSingular);
}

TEST_CASE("ik_spherical_angles: gimbal lock is flagged and still closes the orientation") {
    // With a level platform and q2 = 0 the wrist Y axis aligns with the
    // platform Y axis, collapsing the extraction to the q4 - q6 combination.
    const GeometricParams params;
    const Pose pose{0.0, 0.7, 0.0, 0.0};
    const UJointAngles u{0.3, 0.0};

    const SphericalAngles s = ik_spherical_angles(pose, u, params, 1);
    CHECK(s.gimbal_lock);
    CHECK(s.q4 == 0.0);  // canonical representative
    CHECK(s.q5 == 0.0);

    const auto& rows = ups_limb_dh();
    const Transform chain = limb_base_frame(params, 1) * dh_transform(rows[0], u.q1) *
                            dh_transform(rows[1], u.q2);
    const Eigen::Matrix3d recomposed = chain.rotation *
                                       dh_transform(rows[3], s.q4).rotation *
                                       dh_transform(rows[4], s.q5).rotation *
                                       dh_transform(rows[5], s.q6).rotation;
    CHECK((recomposed - platform_rotation(pose.theta, pose.psi)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ik_spherical_angles: identity relative rotation lands on the quarter-turn branch") {
    // With psi = pi/2, q1 = pi/2 and q2 = theta + pi/2 the wrist rotation
    // equals the platform rotation, so the S joint sees an identity residual.
    // That residual factors as q4 = q5 = q6 = pi/2 in this chain's joint
    // convention (the branch's zero configuration).
    const GeometricParams params;
    const double theta = 0.3;
    const Pose pose{0.0, 0.7, theta, kPi / 2.0};
    const UJointAngles u{kPi / 2.0, theta + kPi / 2.0};

    const SphericalAngles s = ik_spherical_angles(pose, u, params, 1);
    CHECK_FALSE(s.gimbal_lock);
    CHECK(s.q4 == doctest::Approx(kPi / 2.0).epsilon(1e-12));
    CHECK(s.q5 == doctest::Approx(kPi / 2.0).epsilon(1e-12));
    CHECK(s.q6 == doctest::Approx(kPi / 2.0).epsilon(1e-12));

    const auto& rows = ups_limb_dh();
    const Eigen::Matrix3d recomposed = dh_transform(rows[3], s.q4).rotation *
                                       dh_transform(rows[4], s.q5).rotation *
                                       dh_transform(rows[5], s.q6).rotation;
    CHECK((recomposed - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ik_spherical_angles: closes the orientation at the home pose") {
    const GeometricParams params;
    const Pose pose = home_pose();
    const UJointAngles u = ik_limb_u_angles(pose, params, 1);
    const SphericalAngles s = ik_spherical_angles(pose, u, params, 1);
    CHECK_FALSE(s.gimbal_lock);

    const double q3 = ik_limb_active(pose, params, 1);
    const Transform chain =
        compose_limb_chain(params, 1, {u.q1, u.q2, q3, s.q4, s.q5, s.q6, false});
    CHECK((chain.rotation - platform_rotation(0.0, 0.0)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ik_full: frozen home-pose actives and closure residuals") {
    const GeometricParams params;
    const FullConfiguration config = ik_full(home_pose(), params);
    const Eigen::Vector4d active = config.active();

    CHECK(std::abs(active(0) - 0.665751) < 1e-6);
    CHECK(std::abs(active(1) - 0.667574) < 1e-6);
    CHECK(std::abs(active(2) - 0.667574) < 1e-6);
    CHECK(std::abs(active(3) - 0.635000) < 1e-6);

    CHECK(residual_phi(home_pose(), active, params).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("ik_full: approach-target pose solves with tight residuals") {
    const GeometricParams params;
    const Pose pose{0.05, 0.75, 0.0, 0.0};
    const FullConfiguration config = ik_full(pose, params);
    CHECK(residual_phi(pose, config.active(), params).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("ik_full: degenerate central pose propagates") {
    CHECK_THROWS_AS(ik_full(Pose{0.0, 0.0, 0.0, 0.0}, GeometricParams{}), DegeneratePose);
}

TEST_CASE("ik_full: full chains reproduce the platform pose") {
    const GeometricParams params;
    std::mt19937 rng(53);
    for (int i = 0; i < 100; ++i) {
        const Pose pose = oracle::sample_pose(rng);
        const FullConfiguration config = ik_full(pose, params);
        const AttachmentPoints pts = attachment_points(params, pose);
        const Eigen::Matrix3d platform = platform_rotation(pose.theta, pose.psi);

        for (int limb = 1; limb <= 3; ++limb) {
            const Transform chain = compose_limb_chain(params, limb, config.limb[limb - 1]);
            CHECK((chain.translation - pts.platform[limb - 1]).norm() < 1e-9);
            CHECK((chain.rotation - platform).cwiseAbs().maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("ik_full: closure residuals stay below tolerance across the box") {
    const GeometricParams params;
    std::mt19937 rng(54);
    for (int i = 0; i < 300; ++i) {
        const Pose pose = oracle::sample_pose(rng);
        const FullConfiguration config = ik_full(pose, params);
        CHECK(residual_phi(pose, config.active(), params).lpNorm<Eigen::Infinity>() < 1e-10);
    }
}

TEST_CASE("ik_full: mirror symmetry with symmetric leg placements") {
    GeometricParams params;
    params.beta_fd = params.beta_fi = deg_to_rad(45.0);
    params.beta_md = params.beta_mi = deg_to_rad(35.0);

    std::mt19937 rng(55);
    for (int i = 0; i < 100; ++i) {
        Pose pose = oracle::sample_pose(rng);
        Pose mirrored = pose;
        mirrored.psi = -pose.psi;

        const Eigen::Vector4d active = ik_full(pose, params).active();
        const Eigen::Vector4d mirrored_active = ik_full(mirrored, params).active();
        CHECK(std::abs(active(0) - mirrored_active(0)) < 1e-12);
        CHECK(std::abs(active(1) - mirrored_active(2)) < 1e-12);  // limbs 2 and 3 swap
        CHECK(std::abs(active(2) - mirrored_active(1)) < 1e-12);
        CHECK(std::abs(active(3) - mirrored_active(3)) < 1e-12);
    }
}

TEST_CASE("central chain: position closes everywhere, orientation closes on the pitch/yaw axes") {
    const GeometricParams params;
    const auto& rows = rpu_limb_dh();
    std::mt19937 rng(56);

    for (int i = 0; i < 200; ++i) {
        Pose pose = oracle::sample_pose(rng);
        // The platform U joint can only close the orientation when pitch and
        // yaw are not simultaneously active (structural roll constraint).
        if (i % 2 == 0) pose.theta = 0.0; else pose.psi = 0.0;

        const CentralConfiguration c = ik_central_full(pose);
        Transform chain = central_base_frame();
        const double values[4] = {c.q1, c.q2, c.q3, c.q4};
        for (int j = 0; j < 4; ++j) chain = chain * dh_transform(rows[j], values[j]);

        CHECK((chain.translation - Eigen::Vector3d(pose.x, 0.0, pose.z)).norm() < 1e-10);
        CHECK((chain.rotation - platform_rotation(pose.theta, pose.psi)).cwiseAbs().maxCoeff() <
              1e-10);
    }
}

TEST_CASE("limb chain composition matches the vector closure right-hand side") {
    const GeometricParams params;
    std::mt19937 rng(57);
    for (int i = 0; i < 100; ++i) {
        const Pose pose = oracle::sample_pose(rng);
        const FullConfiguration config = ik_full(pose, params);
        const oracle::Vec3 rhs = oracle::platform_point(params, pose, 1);
        const Transform chain = compose_limb_chain(params, 1, config.limb[0], 3);
        CHECK((chain.translation - Eigen::Vector3d(rhs.x, rhs.y, rhs.z)).norm() < 1e-10);
    }
}
