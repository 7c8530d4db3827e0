#pragma once

#include "pm4/errors.hpp"
#include "pm4/simulation.hpp"

#include <iosfwd>
#include <string>

namespace pm4 {

/**
 * Full run description loaded from a sectioned key=value file. Lengths are
 * meters and angles are degrees in the file; angles are converted to radians
 * on load. Unknown sections or keys are errors. The schema is documented in
 * docs/config.md.
 */
struct RunConfig {
    GeometricParams geometry;
    SolverSettings solver;
    ControllerParams control;
    PlantParams plant;
    TrajectorySpec trajectory;
    SimOptions sim;

    /// Runs every section's validation; throws ConfigError on violations.
    void validate() const;
};

/// Built-in defaults (identical to an empty config file).
RunConfig default_run_config();

/// Parses and validates a config file. Throws ConfigError with the offending
/// line number on malformed input, unknown keys, or invariant violations.
RunConfig load_run_config(const std::string& path);

/// Same, from an already-open stream; `name` labels error messages.
RunConfig parse_run_config(std::istream& in, const std::string& name);

/// The defaults rendered as a config file, serving as a schema example.
std::string render_config(const RunConfig& config);

}  // namespace pm4
