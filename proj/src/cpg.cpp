#include "ecowalker/cpg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace ecowalker {

namespace {

double wrap_phase(double p) {
    double w = p - std::floor(p);
    return w >= 1.0 ? 0.0 : w;
}

// Hold at offset, then one raised-cosine excursion to offset + amplitude and
// back over the remainder of the cycle.
void knee_profile(const CpgParams& c, double ph, double& value, double& rate) {
    if (ph < c.knee_duty) {
        value = c.knee_offset;
        rate = 0.0;
        return;
    }
    const double span = 1.0 - c.knee_duty;
    const double s = (ph - c.knee_duty) / span;
    value = c.knee_offset + c.knee_amplitude * 0.5 * (1.0 - std::cos(2.0 * kPi * s));
    rate = c.knee_amplitude * kPi * std::sin(2.0 * kPi * s) / span * c.frequency;
}

// Extend during stance, flex during swing, hold flexed at the end of swing.
void hip_profile(const CpgParams& c, double ph, double& value, double& rate) {
    const double hold_start = 1.0 - c.hip_swing_steady;
    if (ph < c.hip_duty) {
        const double s = ph / c.hip_duty;
        value = c.hip_offset + c.hip_amplitude * 0.5 * (1.0 + std::cos(kPi * s));
        rate = -c.hip_amplitude * 0.5 * kPi * std::sin(kPi * s) / c.hip_duty * c.frequency;
    } else if (ph < hold_start) {
        const double span = hold_start - c.hip_duty;
        // Front-loaded flexion so the foot clears the ground early in swing.
        const double s = (ph - c.hip_duty) / span;
        const double w = 1.0 - (1.0 - s) * (1.0 - s);
        const double dw = 2.0 * (1.0 - s);
        value = c.hip_offset + c.hip_amplitude * 0.5 * (1.0 - std::cos(kPi * w));
        rate = c.hip_amplitude * 0.5 * kPi * std::sin(kPi * w) * dw / span * c.frequency;
    } else {
        value = c.hip_offset + c.hip_amplitude;
        rate = 0.0;
    }
}

}  // namespace

void validate_cpg(const CpgParams& c) {
    if (!(c.frequency > 0.0)) throw ParamError("non-positive CPG frequency");
    if (!(c.hip_duty > 0.0 && c.hip_duty < 1.0)) throw ParamError("hip duty factor outside (0, 1)");
    if (!(c.knee_duty > 0.0 && c.knee_duty < 1.0)) throw ParamError("knee duty factor outside (0, 1)");
    if (c.knee_amplitude < 0.0 || c.hip_amplitude < 0.0) throw ParamError("negative CPG amplitude");
    if (!(c.hip_swing_steady >= 0.0 && c.hip_duty + c.hip_swing_steady < 1.0)) {
        throw ParamError("hip swing steady leaves no room for hip flexion");
    }
}

void validate_gains(const PdGains& g) {
    if (g.kp_hip_left < 0.0 || g.kp_hip_right < 0.0 || g.kd_hip < 0.0 || g.kp_knee < 0.0 || g.kd_knee < 0.0) {
        throw ParamError("negative PD gain");
    }
    if (!(g.torque_limit > 0.0)) throw ParamError("non-positive actuator torque limit");
}

ActuationMode ActuationMode::parse(const std::string& raw) {
    std::string name = raw;
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    if (name == "akfi") return akfi();
    if (name == "pkfi") return pkfi(0.35);
    if (name == "pkfi40") return pkfi(0.40);
    throw ParamError("unknown mode '" + raw + "' (expected akfi, pkfi or pkfi40)");
}

std::string ActuationMode::name() const {
    if (kind == Kind::Akfi) return "akfi";
    if (std::abs(start_fraction - 0.35) < 1e-12) return "pkfi";
    if (std::abs(start_fraction - 0.40) < 1e-12) return "pkfi40";
    return "pkfi@" + std::to_string(start_fraction);
}

JointReference reference_trajectory(const CpgParams& cpg, double phase, Side leg) {
    if (!(phase >= 0.0 && phase < 1.0)) throw std::out_of_range("CPG phase outside [0, 1)");
    const double ph = leg == Side::Right ? phase : wrap_phase(phase + 0.5);
    JointReference ref;
    hip_profile(cpg, ph, ref.hip, ref.hip_rate);
    knee_profile(cpg, ph, ref.knee, ref.knee_rate);
    return ref;
}

double pd_torque(const PdGains& g, Joint joint, Side side, double cmd, double cmd_rate, double meas,
                 double meas_rate) {
    double kp = g.kp_knee;
    double kd = g.kd_knee;
    if (joint == Joint::Hip) {
        kp = side == Side::Left ? g.kp_hip_left : g.kp_hip_right;
        kd = g.kd_hip;
    }
    const double tau = kp * (cmd - meas) + kd * (cmd_rate - meas_rate);
    return std::clamp(tau, -g.torque_limit, g.torque_limit);
}

double knee_gate(const ActuationMode& mode, double cycle_phase, double tau) {
    if (mode.kind == ActuationMode::Kind::Akfi) return tau;
    if (cycle_phase >= mode.start_fraction && cycle_phase < 1.0) return 0.0;
    return tau;
}

GaitController::GaitController(CpgParams cpg, PdGains gains, ActuationMode mode, Options options)
    : cpg_(cpg), gains_(gains), mode_(mode), options_(options) {
    validate_cpg(cpg_);
    validate_gains(gains_);
    if (mode_.kind == ActuationMode::Kind::Pkfi && !(mode_.start_fraction > 0.0 && mode_.start_fraction < 1.0)) {
        throw ParamError("PKFI start fraction outside (0, 1)");
    }
}

double GaitController::cpg_phase(double t) const { return wrap_phase(options_.cpg_phase0 + cpg_.frequency * t); }

void GaitController::track(LegTracker& tr, const LegMeasurement& m, double t) const {
    const double rate = std::abs(m.ankle_rate);
    if (rate < options_.plateau_rate) {
        if (m.ankle > options_.plateau_max_angle) {
            tr.rest_since.reset();
            return;
        }
        if (!tr.rest_since) tr.rest_since = t;
        if (t - *tr.rest_since >= options_.plateau_time) tr.armed = true;
        return;
    }
    tr.rest_since.reset();
    if (tr.armed && m.foot_contact && rate > options_.activity_rate) {
        tr.armed = false;
        if (!tr.last_touchdown || (t - *tr.last_touchdown) * cpg_.frequency >= options_.min_cycle_fraction) {
            tr.last_touchdown = t;
        }
    }
}

std::optional<double> GaitController::last_touchdown(Side s) const {
    return s == Side::Left ? left_.last_touchdown : right_.last_touchdown;
}

std::optional<double> GaitController::touchdown_phase(Side s, double t) const {
    const auto td = last_touchdown(s);
    if (!td) return std::nullopt;
    // Past 1 the gate is open again: the cycle ended without an observed
    // touch-down.
    return (t - *td) * cpg_.frequency;
}

MotorCommand GaitController::update(double t, const LegMeasurement& left, const LegMeasurement& right) {
    track(left_, left, t);
    track(right_, right, t);

    const double phase = cpg_phase(t);
    MotorCommand cmd;
    cmd.ref_left = reference_trajectory(cpg_, phase, Side::Left);
    cmd.ref_right = reference_trajectory(cpg_, phase, Side::Right);

    auto leg_torques = [&](Side side, const LegMeasurement& m, const JointReference& ref, double& hip,
                           double& knee, bool& gated) {
        hip = pd_torque(gains_, Joint::Hip, side, ref.hip, ref.hip_rate, m.hip, m.hip_rate);
        knee = pd_torque(gains_, Joint::Knee, side, ref.knee, ref.knee_rate, m.knee, m.knee_rate);
        gated = false;
        if (mode_active(t)) {
            if (const auto ph = touchdown_phase(side, t)) {
                const double gated_knee = knee_gate(mode_, *ph, knee);
                gated = mode_.kind == ActuationMode::Kind::Pkfi && gated_knee == 0.0 && *ph >= mode_.start_fraction;
                knee = gated_knee;
            }
        }
    };
    leg_torques(Side::Left, left, cmd.ref_left, cmd.tau_hip_left, cmd.tau_knee_left, cmd.knee_gated_left);
    leg_torques(Side::Right, right, cmd.ref_right, cmd.tau_hip_right, cmd.tau_knee_right, cmd.knee_gated_right);
    return cmd;
}

}  // namespace ecowalker
