#include "pm4/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <vector>

namespace pm4 {

namespace {

std::string trim(std::string_view s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
    throw ConfigError(name + ":" + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& name, int line, const std::string& token) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        fail(name, line, "expected a number, got '" + token + "'");
    }
    return value;
}

int parse_int(const std::string& name, int line, const std::string& token) {
    int value = 0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        fail(name, line, "expected an integer, got '" + token + "'");
    }
    return value;
}

// One scalar broadcast to all joints, or four whitespace-separated values.
Eigen::Vector4d parse_per_joint(const std::string& name, int line, const std::string& value) {
    std::istringstream stream(value);
    std::vector<double> entries;
    std::string token;
    while (stream >> token) entries.push_back(parse_double(name, line, token));
    if (entries.size() == 1) return Eigen::Vector4d::Constant(entries[0]);
    if (entries.size() == 4) return Eigen::Vector4d(entries[0], entries[1], entries[2], entries[3]);
    fail(name, line, "expected 1 or 4 values, got " + std::to_string(entries.size()));
}

struct KeyContext {
    const std::string& file;
    int line;
    const std::string& value;

    double number() const { return parse_double(file, line, trim(value)); }
    double degrees() const { return deg_to_rad(number()); }
    int integer() const { return parse_int(file, line, trim(value)); }
    Eigen::Vector4d per_joint() const { return parse_per_joint(file, line, value); }
};

using KeyHandler = std::function<void(RunConfig&, const KeyContext&)>;
using SectionSchema = std::map<std::string, KeyHandler, std::less<>>;

const std::map<std::string, SectionSchema, std::less<>>& schema() {
    static const std::map<std::string, SectionSchema, std::less<>> s = {
        {"geometry",
         {
             {"r", [](RunConfig& c, const KeyContext& k) { c.geometry.r = k.number(); }},
             {"r_m", [](RunConfig& c, const KeyContext& k) { c.geometry.r_m = k.number(); }},
             {"beta_fd", [](RunConfig& c, const KeyContext& k) { c.geometry.beta_fd = k.degrees(); }},
             {"beta_fi", [](RunConfig& c, const KeyContext& k) { c.geometry.beta_fi = k.degrees(); }},
             {"beta_md", [](RunConfig& c, const KeyContext& k) { c.geometry.beta_md = k.degrees(); }},
             {"beta_mi", [](RunConfig& c, const KeyContext& k) { c.geometry.beta_mi = k.degrees(); }},
         }},
        {"solver",
         {
             {"max_iterations", [](RunConfig& c, const KeyContext& k) { c.solver.max_iterations = k.integer(); }},
             {"residual_tolerance", [](RunConfig& c, const KeyContext& k) { c.solver.residual_tolerance = k.number(); }},
             {"step_tolerance", [](RunConfig& c, const KeyContext& k) { c.solver.step_tolerance = k.number(); }},
             {"guess_x", [](RunConfig& c, const KeyContext& k) { c.solver.initial_guess.x = k.number(); }},
             {"guess_z", [](RunConfig& c, const KeyContext& k) { c.solver.initial_guess.z = k.number(); }},
             {"guess_theta", [](RunConfig& c, const KeyContext& k) { c.solver.initial_guess.theta = k.degrees(); }},
             {"guess_psi", [](RunConfig& c, const KeyContext& k) { c.solver.initial_guess.psi = k.degrees(); }},
         }},
        {"control",
         {
             {"kp", [](RunConfig& c, const KeyContext& k) { c.control.gains.kp = k.per_joint(); }},
             {"kd", [](RunConfig& c, const KeyContext& k) { c.control.gains.kd = k.per_joint(); }},
             {"ki", [](RunConfig& c, const KeyContext& k) { c.control.gains.ki = k.per_joint(); }},
             {"filter_a", [](RunConfig& c, const KeyContext& k) { c.control.filter.a = k.per_joint(); }},
             {"filter_b", [](RunConfig& c, const KeyContext& k) { c.control.filter.b = k.per_joint(); }},
             {"integral_limit", [](RunConfig& c, const KeyContext& k) { c.control.integral_limit = k.number(); }},
             {"tau_max", [](RunConfig& c, const KeyContext& k) { c.control.tau_max = k.number(); }},
             {"dt", [](RunConfig& c, const KeyContext& k) { c.sim.dt = k.number(); }},
         }},
        {"plant",
         {
             {"mass", [](RunConfig& c, const KeyContext& k) { c.plant.mass = k.per_joint(); }},
             {"damping", [](RunConfig& c, const KeyContext& k) { c.plant.damping = k.per_joint(); }},
             {"force_gain", [](RunConfig& c, const KeyContext& k) { c.plant.force_gain = k.per_joint(); }},
             {"encoder_resolution", [](RunConfig& c, const KeyContext& k) { c.sim.encoder_resolution = k.number(); }},
         }},
        {"trajectory",
         {
             {"kind",
              [](RunConfig& c, const KeyContext& k) {
                  const std::string v = trim(k.value);
                  if (v == "sinusoidal") c.trajectory.kind = TrajectoryKind::sinusoidal;
                  else if (v == "elliptic") c.trajectory.kind = TrajectoryKind::elliptic;
                  else if (v == "hold") c.trajectory.kind = TrajectoryKind::hold;
                  else fail(k.file, k.line, "unknown trajectory kind '" + v + "'");
              }},
             {"duration", [](RunConfig& c, const KeyContext& k) { c.trajectory.duration = k.number(); }},
             {"frequency", [](RunConfig& c, const KeyContext& k) { c.trajectory.frequency = k.number(); }},
             {"base_x", [](RunConfig& c, const KeyContext& k) { c.trajectory.base.x = k.number(); }},
             {"base_z", [](RunConfig& c, const KeyContext& k) { c.trajectory.base.z = k.number(); }},
             {"base_theta", [](RunConfig& c, const KeyContext& k) { c.trajectory.base.theta = k.degrees(); }},
             {"base_psi", [](RunConfig& c, const KeyContext& k) { c.trajectory.base.psi = k.degrees(); }},
             {"amp_z", [](RunConfig& c, const KeyContext& k) { c.trajectory.amp_z = k.number(); }},
             {"amp_psi", [](RunConfig& c, const KeyContext& k) { c.trajectory.amp_psi = k.degrees(); }},
             {"approach1_x", [](RunConfig& c, const KeyContext& k) { c.trajectory.approach[0].target.x = k.number(); }},
             {"approach1_z", [](RunConfig& c, const KeyContext& k) { c.trajectory.approach[0].target.z = k.number(); }},
             {"approach1_duration", [](RunConfig& c, const KeyContext& k) { c.trajectory.approach[0].duration = k.number(); }},
             {"approach2_x", [](RunConfig& c, const KeyContext& k) { c.trajectory.approach[1].target.x = k.number(); }},
             {"approach2_z", [](RunConfig& c, const KeyContext& k) { c.trajectory.approach[1].target.z = k.number(); }},
             {"approach2_duration", [](RunConfig& c, const KeyContext& k) { c.trajectory.approach[1].duration = k.number(); }},
             {"center_x", [](RunConfig& c, const KeyContext& k) { c.trajectory.center_x = k.number(); }},
             {"center_z", [](RunConfig& c, const KeyContext& k) { c.trajectory.center_z = k.number(); }},
             {"semi_x", [](RunConfig& c, const KeyContext& k) { c.trajectory.semi_x = k.number(); }},
             {"semi_z", [](RunConfig& c, const KeyContext& k) { c.trajectory.semi_z = k.number(); }},
         }},
    };
    return s;
}

}  // namespace

void RunConfig::validate() const {
    try {
        geometry.validate();
        solver.validate();
        control.validate();
        plant.validate();
        trajectory.validate();
        if (sim.dt <= 0.0) throw std::invalid_argument("control: dt must be positive");
        if (sim.encoder_resolution < 0.0) {
            throw std::invalid_argument("plant: encoder_resolution must be non-negative");
        }
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what());
    }
}

RunConfig default_run_config() {
    RunConfig config;
    // Elliptic approach segments exist even when another kind is selected so
    // that the trajectory keys always resolve.
    config.trajectory = elliptic_trajectory();
    config.trajectory.kind = TrajectoryKind::sinusoidal;
    return config;
}

RunConfig parse_run_config(std::istream& in, const std::string& name) {
    RunConfig config = default_run_config();
    std::string section;
    std::string raw;
    int line = 0;

    while (std::getline(in, raw)) {
        ++line;
        std::string text = raw;
        if (const auto hash = text.find('#'); hash != std::string::npos) {
            text.erase(hash);
        }
        text = trim(text);
        if (text.empty()) continue;

        if (text.front() == '[') {
            if (text.back() != ']') fail(name, line, "unterminated section header");
            section = trim(text.substr(1, text.size() - 2));
            if (!schema().contains(section)) fail(name, line, "unknown section [" + section + "]");
            continue;
        }

        const auto eq = text.find('=');
        if (eq == std::string::npos) fail(name, line, "expected key = value");
        if (section.empty()) fail(name, line, "key outside any [section]");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (value.empty()) fail(name, line, "empty value for '" + key + "'");

        const SectionSchema& keys = schema().at(section);
        const auto handler = keys.find(key);
        if (handler == keys.end()) {
            fail(name, line, "unknown key '" + key + "' in [" + section + "]");
        }
        handler->second(config, KeyContext{name, line, value});
    }

    config.validate();
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_run_config(in, path);
}

std::string render_config(const RunConfig& config) {
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };
    auto deg = [&](double rad) { return num(rad_to_deg(rad)); };
    auto joints = [&](const Eigen::Vector4d& v) {
        if (v(0) == v(1) && v(1) == v(2) && v(2) == v(3)) return num(v(0));
        return num(v(0)) + " " + num(v(1)) + " " + num(v(2)) + " " + num(v(3));
    };

    std::ostringstream out;
    out << "# Lengths in meters, angles in degrees.\n";
    out << "[geometry]\n";
    out << "r = " << num(config.geometry.r) << "\n";
    out << "r_m = " << num(config.geometry.r_m) << "\n";
    out << "beta_fd = " << deg(config.geometry.beta_fd) << "\n";
    out << "beta_fi = " << deg(config.geometry.beta_fi) << "\n";
    out << "beta_md = " << deg(config.geometry.beta_md) << "\n";
    out << "beta_mi = " << deg(config.geometry.beta_mi) << "\n";
    out << "\n[solver]\n";
    out << "max_iterations = " << config.solver.max_iterations << "\n";
    out << "residual_tolerance = " << num(config.solver.residual_tolerance) << "\n";
    out << "step_tolerance = " << num(config.solver.step_tolerance) << "\n";
    out << "guess_x = " << num(config.solver.initial_guess.x) << "\n";
    out << "guess_z = " << num(config.solver.initial_guess.z) << "\n";
    out << "guess_theta = " << deg(config.solver.initial_guess.theta) << "\n";
    out << "guess_psi = " << deg(config.solver.initial_guess.psi) << "\n";
    out << "\n[control]\n";
    out << "kp = " << joints(config.control.gains.kp) << "\n";
    out << "kd = " << joints(config.control.gains.kd) << "\n";
    out << "ki = " << joints(config.control.gains.ki) << "\n";
    out << "filter_a = " << joints(config.control.filter.a) << "\n";
    out << "filter_b = " << joints(config.control.filter.b) << "\n";
    out << "integral_limit = " << num(config.control.integral_limit) << "\n";
    out << "tau_max = " << num(config.control.tau_max) << "\n";
    out << "dt = " << num(config.sim.dt) << "\n";
    out << "\n[plant]\n";
    out << "mass = " << joints(config.plant.mass) << "\n";
    out << "damping = " << joints(config.plant.damping) << "\n";
    out << "force_gain = " << joints(config.plant.force_gain) << "\n";
    out << "encoder_resolution = " << num(config.sim.encoder_resolution) << "\n";
    out << "\n[trajectory]\n";
    out << "kind = " << to_string(config.trajectory.kind) << "\n";
    out << "duration = " << num(config.trajectory.duration) << "\n";
    out << "frequency = " << num(config.trajectory.frequency) << "\n";
    out << "base_x = " << num(config.trajectory.base.x) << "\n";
    out << "base_z = " << num(config.trajectory.base.z) << "\n";
    out << "base_theta = " << deg(config.trajectory.base.theta) << "\n";
    out << "base_psi = " << deg(config.trajectory.base.psi) << "\n";
    out << "amp_z = " << num(config.trajectory.amp_z) << "\n";
    out << "amp_psi = " << deg(config.trajectory.amp_psi) << "\n";
    for (std::size_t i = 0; i < config.trajectory.approach.size() && i < 2; ++i) {
        const auto& seg = config.trajectory.approach[i];
        const std::string tag = "approach" + std::to_string(i + 1);
        out << tag << "_x = " << num(seg.target.x) << "\n";
        out << tag << "_z = " << num(seg.target.z) << "\n";
        out << tag << "_duration = " << num(seg.duration) << "\n";
    }
    out << "center_x = " << num(config.trajectory.center_x) << "\n";
    out << "center_z = " << num(config.trajectory.center_z) << "\n";
    out << "semi_x = " << num(config.trajectory.semi_x) << "\n";
    out << "semi_z = " << num(config.trajectory.semi_z) << "\n";
    return out.str();
}

}  // namespace pm4
