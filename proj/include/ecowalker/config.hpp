#pragma once

// Experiment configuration files.
//
// The format is the subset of TOML the project needs: comments, [table]
// headers, and `key = value` lines whose value is a number, boolean, basic
// string or a single-line array of numbers. Unknown keys are rejected.
//
// An experiment file may pull robot parameters from a separate file:
//
//   [include]
//   robot = "robot.toml"   # resolved relative to the including file
//
// The robot file holds RobotParams fields as top-level keys (or under
// [robot]). Every key has a built-in default, so an empty file reproduces the
// reference setup.

#include "ecowalker/analysis.hpp"
#include "ecowalker/experiment.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace ecowalker {

class ConfigError : public Error {
public:
    using Error::Error;
};

using ConfigValue = std::variant<double, bool, std::string, std::vector<double>>;

// Flattened "table.key" -> value, in file order of first appearance.
struct ConfigDocument {
    std::map<std::string, ConfigValue> values;
    std::map<std::string, int> lines;  // key -> source line, for diagnostics
    std::string source;
};

ConfigDocument parse_toml(const std::string& text, const std::string& source = "<string>");

struct ExperimentConfig {
    RobotParams robot;
    SimConfig sim;
    CpgParams cpg;
    PdGains gains;
    ActuationMode mode = ActuationMode::akfi();
    ExperimentOptions options;
    AnalysisConfig analysis;
    std::string output_dir = "out";
};

// Applies a document on top of `base`. Throws ConfigError on unknown keys,
// type mismatches, or invalid parameters.
ExperimentConfig apply_config(const ConfigDocument& doc, ExperimentConfig base = {});

RobotParams load_robot_params(const std::filesystem::path& path);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Resolves a config path: as given, else relative to $ECOWALKER_CONFIG_DIR.
// With an empty path, returns $ECOWALKER_CONFIG_DIR/experiment.toml if it
// exists. Returns an empty path when nothing is found.
std::filesystem::path resolve_config_path(const std::string& path);

// "table.key" -> value text, for trajectory metadata.
Metadata config_echo(const ExperimentConfig& cfg);

// Rebuilds the robot parameters recorded in a trajectory's metadata; keys
// that are absent keep the values of `base`.
RobotParams robot_params_from_metadata(const Metadata& md, RobotParams base = {});

}  // namespace ecowalker
