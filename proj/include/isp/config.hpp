// Scenario file serialization. Scenario files are JSON with the sections
// bodies, friction, motors, sensors, camera, controllers, profiles, commands
// and run; every numeric key carries its unit as a suffix. See
// scenarios/README.md for the documented schema.

#pragma once

#include "isp/simulation.hpp"

#include <string>

namespace isp {

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses a scenario file. Recorded base-motion CSV paths resolve relative to
/// the scenario file's directory. Throws ConfigError naming the offending key
/// on malformed input.
Scenario load_scenario(const std::string& path);

/// Parses scenario JSON text (`base_dir` anchors recorded-profile paths).
Scenario parse_scenario(const std::string& json_text, const std::string& base_dir = ".");

/// Serializes the scenario, including any designed controller coefficients,
/// as pretty-printed JSON.
std::string scenario_to_json(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::string& path);

/// Reads a recorded base-motion CSV with columns t, wx, wy, wz (rad/s).
void load_recorded_motion(const std::string& csv_path, BaseMotionProfile& profile);

} // namespace isp
