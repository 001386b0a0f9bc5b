#pragma once

// Experiment execution and the trajectory log.
//
// A run starts in AKFI, switches to the requested knee mode after
// `warmup_cycles`, lets the gait settle for `settle_cycles`, and then records
// the steady-state window the analysis uses.

#include "ecowalker/dynamics.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ecowalker {

struct Sample {
    double t = 0.0;
    TrunkState trunk;
    JointAngles q;
    JointAngles qd;
    double hip_cmd_left = 0.0;
    double knee_cmd_left = 0.0;
    double hip_cmd_right = 0.0;
    double knee_cmd_right = 0.0;
    JointTorques motor;
    LegPassiveTorques passive;
    ContactState contacts;
    std::array<double, 4> motor_power{};  // W incl. idle: hip_L, knee_L, hip_R, knee_R
    double cpg_phase = 0.0;
    bool knee_gated_left = false;
    bool knee_gated_right = false;
};

// Keys are free-form; run_experiment fills in the configuration echo,
// `dt`, `idle_power`, `mode`, `mode_switch_time` and `steady_onset`.
using Metadata = std::map<std::string, std::string>;

struct Trajectory {
    Metadata metadata;
    std::vector<Sample> samples;

    std::optional<double> metadata_number(const std::string& key) const;
};

struct ExperimentOptions {
    int warmup_cycles = 3;   // AKFI cycles before the mode switch
    int settle_cycles = 5;   // cycles after the switch that are not analyzed
    int cycles = 120;        // steady-state cycles to cover
    double cpg_phase0 = 0.2; // right-leg CPG phase at t = 0
    std::optional<double> duration;  // overrides SimConfig::duration when set

    // Duration that covers warm-up, settling, the kept cycles and a margin.
    double default_duration(const CpgParams& cpg) const;
};

// Initial standing pose: right foot flat on the ground, joints on their CPG
// references, trunk velocity consistent with a planted right foot.
WorldState initial_state(const RobotParams& params, const SimConfig& cfg, const CpgParams& cpg,
                         const ExperimentOptions& opts);

// Simulates for opts.duration (or cfg.duration). Throws SimulationDiverged or
// RobotFell (with the cycle index) on failure.
Trajectory run_experiment(const RobotParams& params, const SimConfig& cfg, const CpgParams& cpg, const PdGains& gains,
                          const ActuationMode& mode, const ExperimentOptions& opts = {});

// CSV trajectory format: "# key=value" metadata lines, one header row, then
// one row per sample in trajectory_columns() order. Numbers use the shortest
// round-trip representation so a write/read cycle is lossless.
const std::vector<std::string>& trajectory_columns();
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

class SchemaError : public Error {
public:
    using Error::Error;
};

Trajectory read_trajectory_csv(std::istream& in);
Trajectory read_trajectory_csv(const std::string& path);

}  // namespace ecowalker
