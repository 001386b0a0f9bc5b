#pragma once

// Robot parameterization, joint-angle conventions and planar kinematics.
//
// Conventions (used by every module):
//   * World frame: x forward, y up, ground at y = 0.
//   * Segment orientation phi is the direction of the proximal->distal vector,
//     measured counter-clockwise from the downward vertical, so the unit
//     direction is d(phi) = (sin phi, -cos phi). phi > 0 swings the distal end
//     forward.
//   * The trunk never rotates (four-bar lock). Its frame is fixed at a forward
//     lean `trunk_lean`; hip angles are measured from the trunk axis.
//   * hip > 0 is flexion:        phi_thigh = hip - trunk_lean
//   * knee > 0 is flexion:       phi_shank = phi_thigh - knee
//   * ankle > 0 is dorsiflexion: phi_foot  = phi_shank + pi/2 + ankle
//     (ankle = 0 puts the foot perpendicular to the shank; the tendons go slack
//     at ankle_slack_angle = -22 deg, i.e. plantarflexed)
//   * toe > 0 lifts the toe tip: phi_toe = phi_foot + toe
//   * The heel contact point sits ankle_height below the ankle, perpendicular
//     to the sole. The sole runs forward from the heel to the toe joint
//     ("ball"), length l_heel. The toe is a massless pin-jointed link of
//     length l_toe; its mass is lumped into the foot.

#include "ecowalker/common.hpp"

#include <array>
#include <cstddef>

namespace ecowalker {

enum class Segment : std::size_t { Trunk, ThighL, ThighR, ShankL, ShankR, FootL, FootR };
constexpr std::size_t kNumSegments = 7;

enum class LegSegment { Thigh, Shank, Foot };

constexpr Segment segment_of(Side side, LegSegment part) {
    const auto s = static_cast<std::size_t>(side_index(side));
    switch (part) {
        case LegSegment::Thigh: return static_cast<Segment>(1 + s);
        case LegSegment::Shank: return static_cast<Segment>(3 + s);
        case LegSegment::Foot: break;
    }
    return static_cast<Segment>(5 + s);
}

constexpr std::size_t idx(Segment s) { return static_cast<std::size_t>(s); }

std::string_view segment_name(Segment s);

template <class T>
using SegmentTable = std::array<T, kNumSegments>;

// Generalized coordinates of the constrained planar model: trunk translation
// plus the six hip/knee/ankle angles. Toe angles are quasi-static and not part
// of the integrated state.
enum Coord : int { kX, kY, kHipL, kKneeL, kAnkleL, kHipR, kKneeR, kAnkleR };
constexpr int kNumCoords = 8;
using CoordVector = Eigen::Matrix<double, kNumCoords, 1>;
using CoordMatrix = Eigen::Matrix<double, kNumCoords, kNumCoords>;
using PointJacobian = Eigen::Matrix<double, 2, kNumCoords>;

constexpr int hip_coord(Side s) { return s == Side::Left ? kHipL : kHipR; }
constexpr int knee_coord(Side s) { return s == Side::Left ? kKneeL : kKneeR; }
constexpr int ankle_coord(Side s) { return s == Side::Left ? kAnkleL : kAnkleR; }

struct JointLimits {
    double min = 0.0;
    double max = 0.0;
};

struct RobotParams {
    double l_thigh = 0.160;
    double l_shank = 0.160;
    double l_heel = 0.032;
    double l_toe = 0.017;
    double ankle_height = 0.0;  // ankle joint above the sole
    double r_gas = 0.013;
    double r_sol = 0.013;
    double k_gas = 1400.0;
    double k_sol = 4500.0;
    double k_toe = 8.04e-3 * 180.0 / kPi;  // 8.04 N·mm/deg
    double toe_rest_angle = deg2rad(15.0);
    double ankle_slack_angle = deg2rad(-22.0);
    double knee_slack_angle = 0.0;
    // trunk, thigh L/R, shank L/R, foot L/R
    SegmentTable<double> segment_masses{1.26, 0.21, 0.21, 0.147, 0.147, 0.063, 0.063};
    SegmentTable<double> segment_inertias{};
    // Trunk: CoM height above the hip. Leg segments: distance from the
    // proximal joint along the segment.
    SegmentTable<double> segment_com_offsets{};
    double total_mass = 2.1;
    double supply_voltage = 24.0;
    double gravity = 9.81;

    // Extensions that are not numerically given for the hardware.
    double trunk_lean = deg2rad(20.0);
    JointLimits hip_limits{deg2rad(-30.0), deg2rad(80.0)};
    JointLimits knee_limits{0.0, deg2rad(110.0)};
    JointLimits ankle_limits{deg2rad(-22.0), deg2rad(40.0)};
    double toe_max_angle = deg2rad(75.0);
    double hard_stop_stiffness = 20.0;  // N·m/rad
    double hard_stop_damping = 0.05;    // N·m·s/rad

    RobotParams();

    double segment_length(Segment s) const;
};

// Returns params unchanged if every invariant holds; throws ParamError naming
// the first violated invariant otherwise.
const RobotParams& validate_params(const RobotParams& params);

struct LegAngles {
    double hip = 0.0;
    double knee = 0.0;
    double ankle = 0.0;
    double toe = 0.0;
};

// Also used for joint rates (rad/s).
struct JointAngles {
    LegAngles left;
    LegAngles right;

    LegAngles& leg(Side s) { return s == Side::Left ? left : right; }
    const LegAngles& leg(Side s) const { return s == Side::Left ? left : right; }
};

struct TrunkState {
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;
};

struct SegmentState {
    Vec2 proximal = Vec2::Zero();
    Vec2 distal = Vec2::Zero();
    Vec2 com_position = Vec2::Zero();
    Vec2 com_velocity = Vec2::Zero();
    double orientation = 0.0;
    double angular_velocity = 0.0;
};

struct LegPoints {
    Vec2 hip = Vec2::Zero();
    Vec2 knee = Vec2::Zero();
    Vec2 ankle = Vec2::Zero();
    Vec2 heel = Vec2::Zero();
    Vec2 ball = Vec2::Zero();
    Vec2 toe_tip = Vec2::Zero();
};

struct SegmentKinematics {
    SegmentTable<SegmentState> segments{};
    std::array<LegPoints, 2> legs{};

    const SegmentState& operator[](Segment s) const { return segments[idx(s)]; }
    const LegPoints& leg(Side s) const { return legs[static_cast<std::size_t>(side_index(s))]; }
};

inline Vec2 direction(double phi) { return {std::sin(phi), -std::cos(phi)}; }
inline Vec2 direction_derivative(double phi) { return {std::cos(phi), std::sin(phi)}; }

struct LegOrientations {
    double thigh = 0.0;
    double shank = 0.0;
    double foot = 0.0;
    double toe = 0.0;
};
LegOrientations leg_orientations(const RobotParams& params, const LegAngles& leg);

SegmentKinematics forward_kinematics(const RobotParams& params, const TrunkState& trunk,
                                     const JointAngles& q);

SegmentKinematics segment_com_velocities(const RobotParams& params, const TrunkState& trunk,
                                         const JointAngles& q, const JointAngles& qdot);

// Generalized-coordinate packing. Toe angles are dropped.
CoordVector to_coords(const TrunkState& trunk, const JointAngles& q);
CoordVector to_coord_rates(const TrunkState& trunk, const JointAngles& qdot);
void from_coords(const CoordVector& q, const CoordVector& qd, TrunkState& trunk, JointAngles& angles,
                 JointAngles& rates);

// Points on a leg whose Jacobians the dynamics needs.
enum class LegPoint { Knee, Ankle, Heel, Ball, ToeTip, ThighCom, ShankCom, FootCom };

// Linear Jacobian of a leg point w.r.t. the generalized coordinates. The toe
// tip uses the current toe angle as a fixed offset.
PointJacobian point_jacobian(const RobotParams& params, const JointAngles& q, Side side, LegPoint point);

// Velocity-product term Jdot*qdot of the same point.
Vec2 point_bias_acceleration(const RobotParams& params, const JointAngles& q, const JointAngles& qdot,
                             Side side, LegPoint point);

Vec2 point_position(const RobotParams& params, const TrunkState& trunk, const JointAngles& q, Side side,
                    LegPoint point);

// Angular Jacobian row (d orientation / d coords) of a leg segment.
Eigen::Matrix<double, 1, kNumCoords> angular_jacobian(Side side, LegSegment part);

// Whole-body center of mass.
Vec2 center_of_mass(const RobotParams& params, const SegmentKinematics& kin);

}  // namespace ecowalker
