#pragma once

// CPG reference trajectories, PD joint control and the knee torque gate that
// distinguishes active (AKFI) from passive (PKFI) knee flexion initiation.

#include "ecowalker/common.hpp"

#include <optional>
#include <string>

namespace ecowalker {

struct CpgParams {
    double frequency = 1.0;       // Hz
    double hip_duty = 0.6;        // fraction of the CPG cycle before hip flexion starts
    double knee_duty = 0.6;       // fraction of the CPG cycle before knee flexion starts
    double knee_amplitude = deg2rad(55.0);
    double knee_offset = deg2rad(8.0);
    double hip_amplitude = deg2rad(26.0);
    double hip_offset = deg2rad(12.0);
    double hip_swing_steady = 0.05;  // fraction of the cycle the hip holds at the end of swing
};

void validate_cpg(const CpgParams& cpg);

struct PdGains {
    double kp_hip_right = 30.0;  // N·m/rad
    double kp_hip_left = 26.0;
    double kd_hip = 0.2;  // N·m·s/rad
    double kp_knee = 7.0;
    double kd_knee = 0.2;
    double torque_limit = 2.7;  // N·m, per actuator
};

void validate_gains(const PdGains& gains);

enum class Joint { Hip, Knee };

struct ActuationMode {
    enum class Kind { Akfi, Pkfi };
    Kind kind = Kind::Akfi;
    double start_fraction = 0.35;

    static ActuationMode akfi() { return {Kind::Akfi, 0.35}; }
    static ActuationMode pkfi(double start = 0.35) { return {Kind::Pkfi, start}; }

    // "akfi", "pkfi", "pkfi40"
    static ActuationMode parse(const std::string& name);
    std::string name() const;
};

struct JointReference {
    double hip = 0.0;
    double knee = 0.0;
    double hip_rate = 0.0;   // rad/s
    double knee_rate = 0.0;  // rad/s
};

// Right leg at `phase`, left leg at phase + 0.5 (mod 1). Throws on phase
// outside [0, 1).
JointReference reference_trajectory(const CpgParams& cpg, double phase, Side leg);

double pd_torque(const PdGains& gains, Joint joint, Side side, double cmd, double cmd_rate, double meas,
                 double meas_rate);

double knee_gate(const ActuationMode& mode, double cycle_phase, double tau);

struct MotorCommand {
    double tau_hip_left = 0.0;
    double tau_hip_right = 0.0;
    double tau_knee_left = 0.0;
    double tau_knee_right = 0.0;
    JointReference ref_left;
    JointReference ref_right;
    bool knee_gated_left = false;
    bool knee_gated_right = false;

    double hip(Side s) const { return s == Side::Left ? tau_hip_left : tau_hip_right; }
    double knee(Side s) const { return s == Side::Left ? tau_knee_left : tau_knee_right; }
};

struct LegMeasurement {
    double hip = 0.0;
    double hip_rate = 0.0;
    double knee = 0.0;
    double knee_rate = 0.0;
    double ankle = 0.0;
    double ankle_rate = 0.0;
    bool foot_contact = false;  // any foot site touches the ground
};

// Deterministic controller state machine advanced by the simulation clock.
// The CPG runs on its own clock; the knee gate runs on the phase since the
// last observed touch-down of the same leg. A touch-down is observed the same
// way the gait analysis finds it: the passive ankle rests in swing, then starts
// to move once the foot is loaded. Ankle motion only counts while the foot
// touches the ground, so stop bounces in swing are ignored.
class GaitController {
public:
    struct Options {
        double cpg_phase0 = 0.0;        // right-leg CPG phase at t = 0
        double mode_switch_time = 0.0;  // AKFI before this time, `mode` after
        double plateau_rate = 0.2;      // rad/s, ankle counts as resting below this
        double plateau_time = 0.05;     // s the ankle must rest before a touch-down counts
        double plateau_max_angle = deg2rad(-19.0);  // rest only counts with the foot hanging plantarflexed
        double activity_rate = 1.0;     // rad/s, ankle motion that marks the touch-down
        double min_cycle_fraction = 0.6;  // of a CPG period between touch-downs of one leg
    };

    GaitController(CpgParams cpg, PdGains gains, ActuationMode mode, Options options);

    MotorCommand update(double t, const LegMeasurement& left, const LegMeasurement& right);

    double cpg_phase(double t) const;
    // Periods elapsed since the last observed touch-down (not wrapped), or
    // nullopt before the first.
    std::optional<double> touchdown_phase(Side s, double t) const;
    std::optional<double> last_touchdown(Side s) const;
    bool mode_active(double t) const { return t >= options_.mode_switch_time; }
    const ActuationMode& mode() const { return mode_; }

private:
    struct LegTracker {
        std::optional<double> rest_since;
        bool armed = false;  // ankle has rested long enough
        std::optional<double> last_touchdown;
    };

    void track(LegTracker& tr, const LegMeasurement& m, double t) const;

    CpgParams cpg_;
    PdGains gains_;
    ActuationMode mode_;
    Options options_;
    LegTracker left_;
    LegTracker right_;
};

}  // namespace ecowalker
