#pragma once

// SOL/GAS spring-tendons, the toe spring, and the elastic joint powers.
//
// Extensions are measured from the slack configuration, so a tendon carries
// no force at (ankle_slack_angle, knee_slack_angle):
//   e_SOL = (ankle - ankle_slack) * r_SOL
//   e_GAS = ((ankle - knee) - (ankle_slack - knee_slack)) * r_GAS
// Tendons only pull: F = k * max(e, 0).

#include "ecowalker/model.hpp"

namespace ecowalker {

struct TendonState {
    double e_sol = 0.0;
    double e_gas = 0.0;
    double f_sol = 0.0;
    double f_gas = 0.0;
};

struct LegTendons {
    TendonState left;
    TendonState right;

    const TendonState& leg(Side s) const { return s == Side::Left ? left : right; }
    TendonState& leg(Side s) { return s == Side::Left ? left : right; }
};

// Magnitudes in the joint's natural sense: tau_ankle plantarflexes,
// tau_knee_gas flexes the knee, tau_toe acts in the toe-lift sense.
struct PassiveTorques {
    double tau_ankle = 0.0;
    double tau_knee_gas = 0.0;
    double tau_toe = 0.0;
};

struct LegPassiveTorques {
    PassiveTorques left;
    PassiveTorques right;

    const PassiveTorques& leg(Side s) const { return s == Side::Left ? left : right; }
    PassiveTorques& leg(Side s) { return s == Side::Left ? left : right; }
};

struct ElasticPower {
    double p_ankle = 0.0;     // W, positive while the tendons recoil into plantarflexion
    double p_knee_gas = 0.0;  // W
    double p_toe = 0.0;       // W
    double e_elastic = 0.0;   // J stored in SOL, GAS and toe springs
};

TendonState tendon_extensions(const RobotParams& params, const LegAngles& leg);
LegTendons tendon_extensions(const RobotParams& params, const JointAngles& q);

PassiveTorques passive_torques(const RobotParams& params, const LegAngles& leg);
LegPassiveTorques passive_torques(const RobotParams& params, const JointAngles& q);

double ankle_power(const RobotParams& params, const LegAngles& q, const LegAngles& qdot);
double gas_knee_power(const RobotParams& params, const LegAngles& q, const LegAngles& qdot);
double toe_power(const RobotParams& params, const LegAngles& q, const LegAngles& qdot);

double elastic_energy(const RobotParams& params, const LegAngles& leg);
double elastic_energy(const RobotParams& params, const JointAngles& q);

ElasticPower elastic_power(const RobotParams& params, const LegAngles& q, const LegAngles& qdot);

}  // namespace ecowalker
