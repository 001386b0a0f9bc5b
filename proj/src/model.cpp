#include "ecowalker/model.hpp"

#include <cmath>
#include <string>

namespace ecowalker {

namespace {

struct Link {
    double length;
    LegSegment part;
    double offset;  // added to the segment orientation
};

// Proximal-to-distal chain of links from the hip to a leg point.
struct Chain {
    std::array<Link, 5> links{};
    int size = 0;
    bool toe = false;  // last link is the toe (orientation foot + toe angle)

    void push(double length, LegSegment part, double offset = 0.0) {
        links[static_cast<std::size_t>(size++)] = {length, part, offset};
    }
};

Chain chain_to(const RobotParams& p, Side side, LegPoint point) {
    const double c_thigh = p.segment_com_offsets[idx(segment_of(side, LegSegment::Thigh))];
    const double c_shank = p.segment_com_offsets[idx(segment_of(side, LegSegment::Shank))];
    const double c_foot = p.segment_com_offsets[idx(segment_of(side, LegSegment::Foot))];
    Chain c;
    switch (point) {
        case LegPoint::ThighCom: c.push(c_thigh, LegSegment::Thigh); break;
        case LegPoint::Knee: c.push(p.l_thigh, LegSegment::Thigh); break;
        case LegPoint::ShankCom:
            c.push(p.l_thigh, LegSegment::Thigh);
            c.push(c_shank, LegSegment::Shank);
            break;
        case LegPoint::Ankle:
            c.push(p.l_thigh, LegSegment::Thigh);
            c.push(p.l_shank, LegSegment::Shank);
            break;
        case LegPoint::FootCom:
            c.push(p.l_thigh, LegSegment::Thigh);
            c.push(p.l_shank, LegSegment::Shank);
            c.push(c_foot, LegSegment::Foot);
            break;
        case LegPoint::Heel:
            c.push(p.l_thigh, LegSegment::Thigh);
            c.push(p.l_shank, LegSegment::Shank);
            c.push(p.ankle_height, LegSegment::Foot, -0.5 * kPi);
            break;
        case LegPoint::Ball:
            c.push(p.l_thigh, LegSegment::Thigh);
            c.push(p.l_shank, LegSegment::Shank);
            c.push(p.ankle_height, LegSegment::Foot, -0.5 * kPi);
            c.push(p.l_heel, LegSegment::Foot);
            break;
        case LegPoint::ToeTip:
            c.push(p.l_thigh, LegSegment::Thigh);
            c.push(p.l_shank, LegSegment::Shank);
            c.push(p.ankle_height, LegSegment::Foot, -0.5 * kPi);
            c.push(p.l_heel, LegSegment::Foot);
            c.push(p.l_toe, LegSegment::Foot);
            c.toe = true;
            break;
    }
    return c;
}

double orientation_of(const LegOrientations& o, LegSegment part) {
    switch (part) {
        case LegSegment::Thigh: return o.thigh;
        case LegSegment::Shank: return o.shank;
        case LegSegment::Foot: break;
    }
    return o.foot;
}

double rate_of(const LegAngles& qd, LegSegment part) {
    switch (part) {
        case LegSegment::Thigh: return qd.hip;
        case LegSegment::Shank: return qd.hip - qd.knee;
        case LegSegment::Foot: break;
    }
    return qd.hip - qd.knee + qd.ankle;
}

void check_positive(double value, const char* what, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ParamError(std::string("non-positive ") + what + ": " + name);
    }
}

}  // namespace

std::string_view segment_name(Segment s) {
    switch (s) {
        case Segment::Trunk: return "trunk";
        case Segment::ThighL: return "thigh_L";
        case Segment::ThighR: return "thigh_R";
        case Segment::ShankL: return "shank_L";
        case Segment::ShankR: return "shank_R";
        case Segment::FootL: return "foot_L";
        case Segment::FootR: return "foot_R";
    }
    return "?";
}

RobotParams::RobotParams() {
    for (std::size_t i = 0; i < kNumSegments; ++i) {
        const auto s = static_cast<Segment>(i);
        const double len = segment_length(s);
        segment_inertias[i] = segment_masses[i] * len * len / 12.0;
        segment_com_offsets[i] = s == Segment::Trunk ? 0.05 : 0.5 * len;
    }
}

double RobotParams::segment_length(Segment s) const {
    switch (s) {
        case Segment::Trunk: return 0.20;
        case Segment::ThighL:
        case Segment::ThighR: return l_thigh;
        case Segment::ShankL:
        case Segment::ShankR: return l_shank;
        case Segment::FootL:
        case Segment::FootR: break;
    }
    return l_heel;
}

const RobotParams& validate_params(const RobotParams& p) {
    check_positive(p.l_thigh, "length", "l_thigh");
    check_positive(p.l_shank, "length", "l_shank");
    check_positive(p.l_heel, "length", "l_heel");
    check_positive(p.l_toe, "length", "l_toe");
    if (!(p.ankle_height >= 0.0) || !std::isfinite(p.ankle_height)) throw ParamError("negative length: ankle_height");
    check_positive(p.r_gas, "pulley radius", "r_GAS");
    check_positive(p.r_sol, "pulley radius", "r_SOL");
    check_positive(p.k_gas, "stiffness", "k_GAS");
    check_positive(p.k_sol, "stiffness", "k_SOL");
    check_positive(p.k_toe, "stiffness", "k_toe");
    check_positive(p.total_mass, "mass", "total_mass");
    check_positive(p.gravity, "gravity", "gravity");
    check_positive(p.supply_voltage, "voltage", "supply_voltage");
    double sum = 0.0;
    for (std::size_t i = 0; i < kNumSegments; ++i) {
        const auto name = std::string(segment_name(static_cast<Segment>(i)));
        check_positive(p.segment_masses[i], "mass", name.c_str());
        check_positive(p.segment_inertias[i], "inertia", name.c_str());
        if (!std::isfinite(p.segment_com_offsets[i])) throw ParamError("non-finite com offset: " + name);
        sum += p.segment_masses[i];
    }
    if (std::abs(sum - p.total_mass) > 1e-9 * p.total_mass) {
        throw ParamError("mass-sum mismatch: segment masses sum to " + std::to_string(sum) +
                         " but total_mass is " + std::to_string(p.total_mass));
    }
    for (auto part : {LegSegment::Thigh, LegSegment::Shank, LegSegment::Foot}) {
        const auto l = idx(segment_of(Side::Left, part));
        const auto r = idx(segment_of(Side::Right, part));
        if (p.segment_masses[l] != p.segment_masses[r] || p.segment_inertias[l] != p.segment_inertias[r] ||
            p.segment_com_offsets[l] != p.segment_com_offsets[r]) {
            throw ParamError("asymmetric legs: " + std::string(segment_name(static_cast<Segment>(l))));
        }
    }
    for (const auto& [lim, name] : {std::pair{p.hip_limits, "hip_limits"}, std::pair{p.knee_limits, "knee_limits"},
                                    std::pair{p.ankle_limits, "ankle_limits"}}) {
        if (!(lim.min < lim.max)) throw ParamError(std::string("empty joint range: ") + name);
    }
    if (p.hard_stop_stiffness < 0.0 || p.hard_stop_damping < 0.0) {
        throw ParamError("negative hard-stop gain");
    }
    return p;
}

LegOrientations leg_orientations(const RobotParams& params, const LegAngles& leg) {
    LegOrientations o;
    o.thigh = leg.hip - params.trunk_lean;
    o.shank = o.thigh - leg.knee;
    o.foot = o.shank + 0.5 * kPi + leg.ankle;
    o.toe = o.foot + leg.toe;
    return o;
}

SegmentKinematics forward_kinematics(const RobotParams& params, const TrunkState& trunk, const JointAngles& q) {
    SegmentKinematics kin;
    const Vec2 hip(trunk.x, trunk.y);

    auto& trunk_seg = kin.segments[idx(Segment::Trunk)];
    trunk_seg.proximal = hip;
    trunk_seg.distal = hip + Vec2(0.0, params.segment_length(Segment::Trunk));
    trunk_seg.com_position = hip + Vec2(0.0, params.segment_com_offsets[idx(Segment::Trunk)]);
    trunk_seg.orientation = 0.0;

    for (Side side : {Side::Left, Side::Right}) {
        const auto& leg = q.leg(side);
        const auto o = leg_orientations(params, leg);
        auto& pts = kin.legs[static_cast<std::size_t>(side_index(side))];
        pts.hip = hip;
        pts.knee = hip + params.l_thigh * direction(o.thigh);
        pts.ankle = pts.knee + params.l_shank * direction(o.shank);
        pts.heel = pts.ankle + params.ankle_height * direction(o.foot - 0.5 * kPi);
        pts.ball = pts.heel + params.l_heel * direction(o.foot);
        pts.toe_tip = pts.ball + params.l_toe * direction(o.toe);

        auto fill = [&](LegSegment part, const Vec2& prox, const Vec2& dist, double phi) {
            const auto s = idx(segment_of(side, part));
            auto& seg = kin.segments[s];
            seg.proximal = prox;
            seg.distal = dist;
            seg.orientation = phi;
            seg.com_position = prox + params.segment_com_offsets[s] * direction(phi);
        };
        fill(LegSegment::Thigh, pts.hip, pts.knee, o.thigh);
        fill(LegSegment::Shank, pts.knee, pts.ankle, o.shank);
        fill(LegSegment::Foot, pts.ankle, pts.ball, o.foot);
    }
    return kin;
}

SegmentKinematics segment_com_velocities(const RobotParams& params, const TrunkState& trunk, const JointAngles& q,
                                         const JointAngles& qdot) {
    SegmentKinematics kin = forward_kinematics(params, trunk, q);
    const Vec2 v_hip(trunk.vx, trunk.vy);
    kin.segments[idx(Segment::Trunk)].com_velocity = v_hip;
    kin.segments[idx(Segment::Trunk)].angular_velocity = 0.0;

    for (Side side : {Side::Left, Side::Right}) {
        const auto& rates = qdot.leg(side);
        const auto o = leg_orientations(params, q.leg(side));
        const double w_thigh = rate_of(rates, LegSegment::Thigh);
        const double w_shank = rate_of(rates, LegSegment::Shank);
        const double w_foot = rate_of(rates, LegSegment::Foot);
        const Vec2 v_knee = v_hip + params.l_thigh * w_thigh * direction_derivative(o.thigh);
        const Vec2 v_ankle = v_knee + params.l_shank * w_shank * direction_derivative(o.shank);

        auto fill = [&](LegSegment part, const Vec2& v_prox, double phi, double w) {
            const auto s = idx(segment_of(side, part));
            auto& seg = kin.segments[s];
            seg.angular_velocity = w;
            seg.com_velocity = v_prox + params.segment_com_offsets[s] * w * direction_derivative(phi);
        };
        fill(LegSegment::Thigh, v_hip, o.thigh, w_thigh);
        fill(LegSegment::Shank, v_knee, o.shank, w_shank);
        fill(LegSegment::Foot, v_ankle, o.foot, w_foot);
    }
    return kin;
}

CoordVector to_coords(const TrunkState& trunk, const JointAngles& q) {
    CoordVector c;
    c << trunk.x, trunk.y, q.left.hip, q.left.knee, q.left.ankle, q.right.hip, q.right.knee, q.right.ankle;
    return c;
}

CoordVector to_coord_rates(const TrunkState& trunk, const JointAngles& qdot) {
    CoordVector c;
    c << trunk.vx, trunk.vy, qdot.left.hip, qdot.left.knee, qdot.left.ankle, qdot.right.hip, qdot.right.knee,
        qdot.right.ankle;
    return c;
}

void from_coords(const CoordVector& q, const CoordVector& qd, TrunkState& trunk, JointAngles& angles,
                 JointAngles& rates) {
    trunk = {q[kX], q[kY], qd[kX], qd[kY]};
    for (Side side : {Side::Left, Side::Right}) {
        auto& a = angles.leg(side);
        auto& r = rates.leg(side);
        a.hip = q[hip_coord(side)];
        a.knee = q[knee_coord(side)];
        a.ankle = q[ankle_coord(side)];
        r.hip = qd[hip_coord(side)];
        r.knee = qd[knee_coord(side)];
        r.ankle = qd[ankle_coord(side)];
    }
}

Eigen::Matrix<double, 1, kNumCoords> angular_jacobian(Side side, LegSegment part) {
    Eigen::Matrix<double, 1, kNumCoords> row = Eigen::Matrix<double, 1, kNumCoords>::Zero();
    row[hip_coord(side)] = 1.0;
    if (part != LegSegment::Thigh) row[knee_coord(side)] = -1.0;
    if (part == LegSegment::Foot) row[ankle_coord(side)] = 1.0;
    return row;
}

PointJacobian point_jacobian(const RobotParams& params, const JointAngles& q, Side side, LegPoint point) {
    PointJacobian J = PointJacobian::Zero();
    J(0, kX) = 1.0;
    J(1, kY) = 1.0;
    const auto o = leg_orientations(params, q.leg(side));
    const Chain c = chain_to(params, side, point);
    for (int k = 0; k < c.size; ++k) {
        const auto& link = c.links[static_cast<std::size_t>(k)];
        const bool is_toe = c.toe && k == c.size - 1;
        const double phi = is_toe ? o.toe : orientation_of(o, link.part) + link.offset;
        J += link.length * direction_derivative(phi) * angular_jacobian(side, link.part);
    }
    return J;
}

Vec2 point_bias_acceleration(const RobotParams& params, const JointAngles& q, const JointAngles& qdot, Side side,
                             LegPoint point) {
    const auto o = leg_orientations(params, q.leg(side));
    const Chain c = chain_to(params, side, point);
    Vec2 acc = Vec2::Zero();
    for (int k = 0; k < c.size; ++k) {
        const auto& link = c.links[static_cast<std::size_t>(k)];
        const bool is_toe = c.toe && k == c.size - 1;
        const double phi = is_toe ? o.toe : orientation_of(o, link.part) + link.offset;
        const double w = rate_of(qdot.leg(side), link.part);
        acc -= link.length * w * w * direction(phi);
    }
    return acc;
}

Vec2 point_position(const RobotParams& params, const TrunkState& trunk, const JointAngles& q, Side side,
                    LegPoint point) {
    const auto o = leg_orientations(params, q.leg(side));
    const Chain c = chain_to(params, side, point);
    Vec2 p(trunk.x, trunk.y);
    for (int k = 0; k < c.size; ++k) {
        const auto& link = c.links[static_cast<std::size_t>(k)];
        const bool is_toe = c.toe && k == c.size - 1;
        p += link.length * direction(is_toe ? o.toe : orientation_of(o, link.part) + link.offset);
    }
    return p;
}

Vec2 center_of_mass(const RobotParams& params, const SegmentKinematics& kin) {
    Vec2 acc = Vec2::Zero();
    double m = 0.0;
    for (std::size_t i = 0; i < kNumSegments; ++i) {
        acc += params.segment_masses[i] * kin.segments[i].com_position;
        m += params.segment_masses[i];
    }
    return acc / m;
}

}  // namespace ecowalker
