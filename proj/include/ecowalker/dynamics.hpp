#pragma once

// Fixed-step planar multibody dynamics of the trunk-locked biped.
//
// Generalized coordinates are trunk x, y and the six hip/knee/ankle angles;
// trunk rotation is eliminated, so it stays exactly zero. Ground contact is a
// penalty spring-damper with tanh-regularized Coulomb friction at the heel
// (the ankle joint), the ball (toe joint) and the toe tip of each foot. The toe
// link is massless: its angle is solved quasi-statically each step from the
// toe spring and the toe-tip normal force.
//
// Integration is semi-implicit Euler. Velocity-dependent contact and
// hard-stop damping are linearized and treated implicitly:
//   (M + dt*C) dv = dt*Q,   v' = v + dv,   q' = q + dt*v'

#include "ecowalker/cpg.hpp"
#include "ecowalker/model.hpp"
#include "ecowalker/tendon.hpp"

#include <array>
#include <cstdint>

namespace ecowalker {

struct SimConfig {
    double dt = 5e-4;
    double contact_kn = 2.0e4;   // N/m
    double contact_dn = 64.0;    // N·s/m, ~0.9 critical at foot-mass scale
    double friction_mu = 0.8;
    double friction_vreg = 0.01;  // m/s
    double duration = 130.0;      // s
    std::uint64_t seed = 1;
    double initial_jitter = 1e-3;  // rad, seeded perturbation of the initial joint angles
    double actuator_efficiency = 0.7;
    double winding_loss = 0.1;  // W/(N·m)^2
    double idle_power = 0.5;    // W per motor driver
    int log_every = 1;          // log one sample every `log_every` steps
    bool contacts_enabled = true;
    double fall_height = 0.18;        // m, trunk height that counts as a fall
    double divergence_bound = 1000.0;  // bound on |coordinate| and |rate|
    std::array<bool, kNumCoords> locked{};  // coordinates held fixed (test rigs)
};

void validate_sim(const SimConfig& cfg);

class SimulationError : public Error {
public:
    SimulationError(const std::string& what, double t, long cycle) : Error(what), time(t), cycle_index(cycle) {}
    double time;
    long cycle_index;
};

class SimulationDiverged : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class RobotFell : public SimulationError {
public:
    using SimulationError::SimulationError;
};

enum class ContactSite { Heel = 0, Ball = 1, ToeTip = 2 };
constexpr int kNumContactSites = 3;
std::string_view contact_site_name(ContactSite s);

struct ContactPoint {
    double penetration = 0.0;
    double normal_force = 0.0;
    double tangential_force = 0.0;
    bool in_contact = false;
};

struct FootContact {
    std::array<ContactPoint, kNumContactSites> sites{};

    const ContactPoint& operator[](ContactSite s) const { return sites[static_cast<std::size_t>(s)]; }
    ContactPoint& operator[](ContactSite s) { return sites[static_cast<std::size_t>(s)]; }
    bool any() const;
    double normal_total() const;
};

struct ContactState {
    FootContact left;
    FootContact right;

    const FootContact& foot(Side s) const { return s == Side::Left ? left : right; }
    FootContact& foot(Side s) { return s == Side::Left ? left : right; }
};

struct WorldState {
    double t = 0.0;
    TrunkState trunk;
    JointAngles q;
    JointAngles qd;
    ContactState contacts;
};

// Contact force on a single point from its height above ground and velocity.
// Also returns the force's velocity slopes for implicit damping.
struct ContactEvaluation {
    ContactPoint point;
    Vec2 force = Vec2::Zero();
    double slope_tangential = 0.0;  // -dFx/dvx >= 0
    double slope_normal = 0.0;      // -dFy/dvy >= 0
};
ContactEvaluation contact_force(const SimConfig& cfg, const Vec2& position, const Vec2& velocity);

ContactState ground_contact_forces(const RobotParams& params, const SimConfig& cfg, const WorldState& state);

// Quasi-static toe angle for the current foot pose (rest angle when unloaded).
double solve_toe_angle(const RobotParams& params, const SimConfig& cfg, const TrunkState& trunk,
                       const JointAngles& q, Side side);

// Re-solves both toe angles and re-evaluates contacts in place.
void refresh_passive_state(const RobotParams& params, const SimConfig& cfg, WorldState& state);

struct JointTorques {
    double hip_left = 0.0;
    double knee_left = 0.0;
    double hip_right = 0.0;
    double knee_right = 0.0;
};
JointTorques motor_torques(const MotorCommand& cmd);

WorldState step(const RobotParams& params, const SimConfig& cfg, const WorldState& state, const MotorCommand& motor);

double motor_electrical_power(double torque, double joint_rate, const SimConfig& cfg);

CoordMatrix mass_matrix(const RobotParams& params, const JointAngles& q);

struct EnergyBreakdown {
    double kinetic = 0.0;
    double potential = 0.0;
    double elastic = 0.0;     // tendons and toe springs
    double hard_stop = 0.0;   // penalty energy of the joint limits
    double contact = 0.0;     // penalty energy of the ground springs
    double total() const { return kinetic + potential + elastic + hard_stop + contact; }
};
EnergyBreakdown energy(const RobotParams& params, const SimConfig& cfg, const WorldState& state);

// Whole-body CoM acceleration implied by the dynamics at `state` under `motor`.
Vec2 com_acceleration(const RobotParams& params, const SimConfig& cfg, const WorldState& state,
                      const MotorCommand& motor);

}  // namespace ecowalker
