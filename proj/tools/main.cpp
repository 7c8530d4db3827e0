// Command-line front end: inverse/forward kinematics queries, closed-loop
// simulation runs, and workspace condition sweeps.
//
// Exit codes: 0 success, 1 usage/config error, 2 unreachable or degenerate
// pose, 3 solver non-convergence, 4 unreachable simulation reference.

#include "pm4/config.hpp"
#include "pm4/control.hpp"
#include "pm4/forward_kinematics.hpp"
#include "pm4/inverse_kinematics.hpp"
#include "pm4/simulation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitUnreachable = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitReference = 4;

pm4::RunConfig load_or_default(const std::string& path) {
    if (path.empty()) return pm4::default_run_config();
    return pm4::load_run_config(path);
}

void print_pose(const pm4::Pose& pose) {
    std::printf("pose: x = %.6f m, z = %.6f m, theta = %.4f deg, psi = %.4f deg\n", pose.x,
                pose.z, pm4::rad_to_deg(pose.theta), pm4::rad_to_deg(pose.psi));
}

int run_ik(const std::string& config_path, double x, double z, double theta_deg,
           double psi_deg) {
    const pm4::RunConfig config = load_or_default(config_path);
    const pm4::Pose pose{x, z, pm4::deg_to_rad(theta_deg), pm4::deg_to_rad(psi_deg)};

    const pm4::FullConfiguration full = pm4::ik_full(pose, config.geometry);
    const Eigen::Vector4d active = full.active();
    const Eigen::Vector4d phi = pm4::residual_phi(pose, active, config.geometry);

    print_pose(pose);
    std::printf("active joints [m]: q13 = %.6f, q23 = %.6f, q33 = %.6f, q42 = %.6f\n",
                active(0), active(1), active(2), active(3));
    for (int limb = 1; limb <= 3; ++limb) {
        const auto& l = full.limb[limb - 1];
        std::printf("limb %d passive [rad]: q%d1 = %.6f, q%d2 = %.6f, q%d4 = %.6f, "
                    "q%d5 = %.6f, q%d6 = %.6f%s\n",
                    limb, limb, l.q1, limb, l.q2, limb, l.q4, limb, l.q5, limb, l.q6,
                    l.gimbal_lock ? " (gimbal lock)" : "");
    }
    std::printf("central passive [rad]: q41 = %.6f, q43 = %.6f, q44 = %.6f\n", full.central.q1,
                full.central.q3, full.central.q4);
    std::printf("max |phi| = %.3e\n", phi.lpNorm<Eigen::Infinity>());
    return kExitOk;
}

int run_fk(const std::string& config_path, const std::vector<double>& lengths,
           std::optional<double> gx, std::optional<double> gz, std::optional<double> gtheta_deg,
           std::optional<double> gpsi_deg, std::optional<int> max_iter, bool oracle) {
    pm4::RunConfig config = load_or_default(config_path);
    if (gx) config.solver.initial_guess.x = *gx;
    if (gz) config.solver.initial_guess.z = *gz;
    if (gtheta_deg) config.solver.initial_guess.theta = pm4::deg_to_rad(*gtheta_deg);
    if (gpsi_deg) config.solver.initial_guess.psi = pm4::deg_to_rad(*gpsi_deg);
    if (max_iter) config.solver.max_iterations = *max_iter;

    const Eigen::Vector4d active(lengths[0], lengths[1], lengths[2], lengths[3]);
    const pm4::FkResult result = pm4::fk_reduced(active, config.geometry, config.solver);

    print_pose(result.pose);
    std::printf("iterations: %d, residual max-norm: %.3e\n", result.iterations,
                result.residual_norm);
    if (oracle) {
        const pm4::FkFullResult full = pm4::fk_full_11(active, config.geometry, config.solver);
        const double agreement =
            std::max({std::abs(full.pose.x - result.pose.x), std::abs(full.pose.z - result.pose.z),
                      std::abs(full.pose.theta - result.pose.theta),
                      std::abs(full.pose.psi - result.pose.psi)});
        std::printf("full-system solution agrees within %.3e (%d iterations)\n", agreement,
                    full.iterations);
    }
    return kExitOk;
}

int run_simulate(const std::string& config_path, const std::string& traj,
                 const std::string& output_path) {
    pm4::RunConfig config = load_or_default(config_path);
    if (!traj.empty()) {
        pm4::TrajectorySpec selected = config.trajectory;
        if (traj == "sinusoidal") selected.kind = pm4::TrajectoryKind::sinusoidal;
        else if (traj == "elliptic") selected.kind = pm4::TrajectoryKind::elliptic;
        else if (traj == "hold") selected.kind = pm4::TrajectoryKind::hold;
        else throw pm4::ConfigError("unknown trajectory '" + traj + "'");
        config.trajectory = selected;
    }

    const pm4::SimLog log = pm4::run_closed_loop(config.geometry, config.trajectory,
                                                 config.control, config.plant, config.sim);

    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw pm4::ConfigError("cannot open output file '" + output_path + "'");
    pm4::write_csv(log, out);
    out.close();

    const Eigen::Vector4d means = pm4::mean_errors(log);
    static const char* names[] = {"q13", "q23", "q33", "q42"};
    std::printf("%zu samples written to %s\n", log.samples.size(), output_path.c_str());
    std::printf("joint   mean error [m]   phase offset [ms]\n");
    for (int j = 0; j < 4; ++j) {
        std::string phase = "n/a (constant reference)";
        try {
            std::vector<double> ref(log.samples.size());
            std::vector<double> act(log.samples.size());
            for (std::size_t i = 0; i < log.samples.size(); ++i) {
                ref[i] = log.samples[i].q_ref(j);
                act[i] = log.samples[i].q(j);
            }
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f",
                          1e3 * pm4::phase_offset(ref, act, log.dt));
            phase = buf;
        } catch (const pm4::DegenerateSignal&) {
            // hold trajectories have no phase to estimate
        }
        std::printf("%-7s %+.6e    %s\n", names[j], means(j), phase.c_str());
    }
    return kExitOk;
}

struct SweepBounds {
    std::optional<double> x_min, x_max, z_min, z_max;
    std::optional<double> theta_min_deg, theta_max_deg, psi_min_deg, psi_max_deg;
};

int run_sweep(const std::string& config_path, const std::string& output_path, int nx, int nz,
              int ntheta, int npsi, const SweepBounds& bounds) {
    const pm4::RunConfig config = load_or_default(config_path);
    pm4::PoseBox box = pm4::default_sampling_box();
    if (bounds.x_min) box.x_min = *bounds.x_min;
    if (bounds.x_max) box.x_max = *bounds.x_max;
    if (bounds.z_min) box.z_min = *bounds.z_min;
    if (bounds.z_max) box.z_max = *bounds.z_max;
    if (bounds.theta_min_deg) box.theta_min = pm4::deg_to_rad(*bounds.theta_min_deg);
    if (bounds.theta_max_deg) box.theta_max = pm4::deg_to_rad(*bounds.theta_max_deg);
    if (bounds.psi_min_deg) box.psi_min = pm4::deg_to_rad(*bounds.psi_min_deg);
    if (bounds.psi_max_deg) box.psi_max = pm4::deg_to_rad(*bounds.psi_max_deg);
    if (box.x_min > box.x_max || box.z_min > box.z_max || box.theta_min > box.theta_max ||
        box.psi_min > box.psi_max) {
        throw pm4::ConfigError("sweep bounds: every minimum must not exceed its maximum");
    }

    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw pm4::ConfigError("cannot open output file '" + output_path + "'");
    out << "x,z,theta,psi,reachable,condition\n";

    auto grid = [](double lo, double hi, int n, int i) {
        return n <= 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    };

    long rows = 0;
    char buf[160];
    for (int ix = 0; ix < nx; ++ix)
        for (int iz = 0; iz < nz; ++iz)
            for (int it = 0; it < ntheta; ++it)
                for (int ip = 0; ip < npsi; ++ip) {
                    const pm4::Pose pose{grid(box.x_min, box.x_max, nx, ix),
                                         grid(box.z_min, box.z_max, nz, iz),
                                         grid(box.theta_min, box.theta_max, ntheta, it),
                                         grid(box.psi_min, box.psi_max, npsi, ip)};
                    bool reachable = true;
                    try {
                        pm4::ik_full(pose, config.geometry);
                    } catch (const pm4::KinematicsError&) {
                        reachable = false;
                    }
                    const double condition = pm4::singularity_proximity(pose, config.geometry);
                    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g,%d,%.9g\n", pose.x,
                                  pose.z, pose.theta, pose.psi, reachable ? 1 : 0, condition);
                    out << buf;
                    ++rows;
                }
    std::printf("%ld grid points written to %s\n", rows, output_path.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3UPS+RPU parallel manipulator kinematics and control toolbox"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "config file (defaults used when omitted)");

    // ik
    auto* ik = app.add_subcommand("ik", "closed-form inverse kinematics for one pose");
    double x = 0.0, z = 0.635, theta_deg = 0.0, psi_deg = 0.0;
    ik->add_option("--x", x, "platform x [m]")->capture_default_str();
    ik->add_option("--z", z, "platform z [m]")->capture_default_str();
    ik->add_option("--theta", theta_deg, "pitch [deg]")->capture_default_str();
    ik->add_option("--psi", psi_deg, "yaw [deg]")->capture_default_str();

    // fk
    auto* fk = app.add_subcommand("fk", "forward displacement from four actuator lengths");
    std::vector<double> lengths;
    std::optional<double> gx, gz, gtheta, gpsi;
    std::optional<int> max_iter;
    bool oracle = false;
    fk->add_option("lengths", lengths, "q13 q23 q33 q42 [m]")->expected(4)->required();
    fk->add_option("--guess-x", gx, "initial guess x [m]");
    fk->add_option("--guess-z", gz, "initial guess z [m]");
    fk->add_option("--guess-theta", gtheta, "initial guess pitch [deg]");
    fk->add_option("--guess-psi", gpsi, "initial guess yaw [deg]");
    fk->add_option("--max-iter", max_iter, "iteration cap override");
    fk->add_flag("--oracle", oracle, "also solve the full closure system and report agreement");

    // simulate
    auto* sim = app.add_subcommand("simulate", "closed-loop tracking simulation");
    std::string traj;
    std::string sim_output = "sim.csv";
    sim->add_option("--traj", traj, "sinusoidal | elliptic | hold (overrides config)");
    sim->add_option("--output", sim_output, "CSV output path")->capture_default_str();

    // sweep
    auto* sweep = app.add_subcommand("sweep", "grid sweep of reachability and conditioning");
    std::string sweep_output = "sweep.csv";
    int nx = 5, nz = 5, ntheta = 3, npsi = 3;
    SweepBounds bounds;
    sweep->add_option("--output", sweep_output, "CSV output path")->capture_default_str();
    sweep->add_option("--nx", nx, "grid points along x")->capture_default_str();
    sweep->add_option("--nz", nz, "grid points along z")->capture_default_str();
    sweep->add_option("--ntheta", ntheta, "grid points along theta")->capture_default_str();
    sweep->add_option("--npsi", npsi, "grid points along psi")->capture_default_str();
    sweep->add_option("--x-min", bounds.x_min, "grid lower x [m]");
    sweep->add_option("--x-max", bounds.x_max, "grid upper x [m]");
    sweep->add_option("--z-min", bounds.z_min, "grid lower z [m]");
    sweep->add_option("--z-max", bounds.z_max, "grid upper z [m]");
    sweep->add_option("--theta-min", bounds.theta_min_deg, "grid lower pitch [deg]");
    sweep->add_option("--theta-max", bounds.theta_max_deg, "grid upper pitch [deg]");
    sweep->add_option("--psi-min", bounds.psi_min_deg, "grid lower yaw [deg]");
    sweep->add_option("--psi-max", bounds.psi_max_deg, "grid upper yaw [deg]");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (ik->parsed()) return run_ik(config_path, x, z, theta_deg, psi_deg);
        if (fk->parsed())
            return run_fk(config_path, lengths, gx, gz, gtheta, gpsi, max_iter, oracle);
        if (sim->parsed()) return run_simulate(config_path, traj, sim_output);
        if (sweep->parsed())
            return run_sweep(config_path, sweep_output, nx, nz, ntheta, npsi, bounds);
    } catch (const pm4::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const pm4::UnreachableReference& err) {
        std::cerr << "reference error: " << err.what() << "\n";
        return kExitReference;
    } catch (const pm4::DegeneratePose& err) {
        std::cerr << "degenerate pose: " << err.what() << "\n";
        return kExitUnreachable;
    } catch (const pm4::UnreachablePose& err) {
        std::cerr << "unreachable pose: " << err.what() << "\n";
        return kExitUnreachable;
    } catch (const pm4::UJointSingular& err) {
        std::cerr << "unreachable pose: " << err.what() << "\n";
        return kExitUnreachable;
    } catch (const pm4::NonConvergence& err) {
        std::cerr << "no convergence: " << err.what() << "\n";
        return kExitNoConvergence;
    } catch (const pm4::SingularJacobian& err) {
        std::cerr << "no convergence: " << err.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
