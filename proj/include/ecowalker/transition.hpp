#pragma once

// Segment and group linear momenta, step-to-step transition impulses, CoM
// velocity vectors, kinetic energies and cost of transport.
//
// Groups: TL (trailing leg) is the thigh, shank and foot of the push-off
// side; RB (remaining body) is the trunk plus the leading leg; CoM is the
// whole robot.

#include "ecowalker/model.hpp"

#include <array>
#include <string_view>
#include <vector>

namespace ecowalker {

class TransitionError : public Error {
public:
    using Error::Error;
};

using SegmentVectors = std::array<Vec2, kNumSegments>;

// p_i = m_i * v_i for every segment.
SegmentVectors segment_momenta(const RobotParams& params, const SegmentKinematics& kin);

struct GroupMomentum {
    Vec2 tl = Vec2::Zero();
    Vec2 rb = Vec2::Zero();
    Vec2 com = Vec2::Zero();  // sum over all segments
};

GroupMomentum group_momenta(const SegmentVectors& p, Side trailing);
// Side label "L" or "R"; throws TransitionError otherwise.
GroupMomentum group_momenta(const SegmentVectors& p, std::string_view trailing);

struct GroupEnergy {
    double tl = 0.0;
    double rb = 0.0;
    double segments = 0.0;  // sum of segment translational KE
    double com = 0.0;       // 1/2 M |v_CoM|^2
};

// Translational kinetic energy, sum of 1/2 m |v|^2 per group.
GroupEnergy kinetic_energy(const RobotParams& params, const SegmentKinematics& kin, Side trailing);

// Momentum and energy time series on a common time grid.
struct MomentumSeries {
    std::vector<double> t;
    std::vector<SegmentVectors> p;          // per-segment momenta
    std::vector<SegmentVectors> v;          // per-segment CoM velocities
};

struct TransitionSnapshot {
    double t = 0.0;
    GroupMomentum p;
    Vec2 v_com = Vec2::Zero();
    GroupEnergy ke;
};

struct TransitionMetrics {
    TransitionSnapshot at_vmin;
    TransitionSnapshot at_lltd;
    TransitionSnapshot at_vmax;
    GroupMomentum dp;      // p(vmax) - p(vmin), per component
    double dabs_tl = 0.0;  // |p(vmax)| - |p(vmin)|
    double dabs_rb = 0.0;
    double dabs_com = 0.0;
    double com_direction_change_deg = 0.0;
};

TransitionSnapshot snapshot(const RobotParams& params, const MomentumSeries& series, Side trailing, double t);

TransitionMetrics transition_impulses(const RobotParams& params, const MomentumSeries& series, Side trailing,
                                      double t_vmin, double t_lltd, double t_vmax);

Vec2 com_velocity(const Vec2& p_com, double total_mass);

// angle(v1) - angle(v0) in degrees, wrapped to (-180, 180].
double direction_change_deg(const Vec2& v0, const Vec2& v1);

struct CotReport {
    double net_positive_power = 0.0;  // W, E_en
    double v_avg = 0.0;               // m/s
    double cot = 0.0;
    double cot_nr = 1.36;
    double cot_re_percent = 0.0;
};

constexpr double kNaturalRunnerCot = 1.36;

// Time average of sum_m max(0, P_m - idle) over equally spaced samples.
double net_positive_power(const std::vector<std::array<double, 4>>& motor_power, double idle_power);

CotReport cost_of_transport(double net_positive_power, double mass, double gravity, double v_avg,
                            double cot_nr = kNaturalRunnerCot);

}  // namespace ecowalker
