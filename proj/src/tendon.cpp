#include "ecowalker/tendon.hpp"

#include <algorithm>

namespace ecowalker {

TendonState tendon_extensions(const RobotParams& p, const LegAngles& leg) {
    TendonState t;
    t.e_sol = (leg.ankle - p.ankle_slack_angle) * p.r_sol;
    t.e_gas = ((leg.ankle - leg.knee) - (p.ankle_slack_angle - p.knee_slack_angle)) * p.r_gas;
    t.f_sol = p.k_sol * std::max(t.e_sol, 0.0);
    t.f_gas = p.k_gas * std::max(t.e_gas, 0.0);
    return t;
}

LegTendons tendon_extensions(const RobotParams& p, const JointAngles& q) {
    return {tendon_extensions(p, q.left), tendon_extensions(p, q.right)};
}

PassiveTorques passive_torques(const RobotParams& p, const LegAngles& leg) {
    const TendonState t = tendon_extensions(p, leg);
    PassiveTorques tau;
    tau.tau_ankle = t.f_sol * p.r_sol + t.f_gas * p.r_gas;
    tau.tau_knee_gas = t.f_gas * p.r_gas;
    tau.tau_toe = -p.k_toe * (leg.toe - p.toe_rest_angle);
    return tau;
}

LegPassiveTorques passive_torques(const RobotParams& p, const JointAngles& q) {
    return {passive_torques(p, q.left), passive_torques(p, q.right)};
}

double ankle_power(const RobotParams& p, const LegAngles& q, const LegAngles& qdot) {
    // The GAS term only enters while the GAS tendon is taut; the force clamp in
    // tendon_extensions makes that case split implicit.
    return -qdot.ankle * passive_torques(p, q).tau_ankle;
}

double gas_knee_power(const RobotParams& p, const LegAngles& q, const LegAngles& qdot) {
    return qdot.knee * passive_torques(p, q).tau_knee_gas;
}

double toe_power(const RobotParams& p, const LegAngles& q, const LegAngles& qdot) {
    return qdot.toe * passive_torques(p, q).tau_toe;
}

double elastic_energy(const RobotParams& p, const LegAngles& leg) {
    const TendonState t = tendon_extensions(p, leg);
    const double es = std::max(t.e_sol, 0.0);
    const double eg = std::max(t.e_gas, 0.0);
    const double dtoe = leg.toe - p.toe_rest_angle;
    return 0.5 * p.k_sol * es * es + 0.5 * p.k_gas * eg * eg + 0.5 * p.k_toe * dtoe * dtoe;
}

double elastic_energy(const RobotParams& p, const JointAngles& q) {
    return elastic_energy(p, q.left) + elastic_energy(p, q.right);
}

ElasticPower elastic_power(const RobotParams& p, const LegAngles& q, const LegAngles& qdot) {
    return {ankle_power(p, q, qdot), gas_knee_power(p, q, qdot), toe_power(p, q, qdot), elastic_energy(p, q)};
}

}  // namespace ecowalker
