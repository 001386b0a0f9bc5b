#include "ecowalker/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace ecowalker {

namespace {

constexpr std::array<LegPoint, kNumContactSites> kSitePoints{LegPoint::Heel, LegPoint::Ball, LegPoint::ToeTip};

struct SegmentJacobians {
    SegmentTable<PointJacobian> linear;
    SegmentTable<Eigen::Matrix<double, 1, kNumCoords>> angular;
    SegmentTable<Vec2> bias;
};

SegmentJacobians segment_jacobians(const RobotParams& p, const JointAngles& q, const JointAngles& qd) {
    SegmentJacobians sj;
    const auto trunk = idx(Segment::Trunk);
    sj.linear[trunk] = PointJacobian::Zero();
    sj.linear[trunk](0, kX) = 1.0;
    sj.linear[trunk](1, kY) = 1.0;
    sj.angular[trunk].setZero();
    sj.bias[trunk] = Vec2::Zero();
    for (Side side : {Side::Left, Side::Right}) {
        const std::array<std::pair<LegSegment, LegPoint>, 3> parts{
            std::pair{LegSegment::Thigh, LegPoint::ThighCom}, std::pair{LegSegment::Shank, LegPoint::ShankCom},
            std::pair{LegSegment::Foot, LegPoint::FootCom}};
        for (const auto& [part, point] : parts) {
            const auto s = idx(segment_of(side, part));
            sj.linear[s] = point_jacobian(p, q, side, point);
            sj.angular[s] = angular_jacobian(side, part);
            sj.bias[s] = point_bias_acceleration(p, q, qd, side, point);
        }
    }
    return sj;
}

struct Assembly {
    CoordMatrix mass = CoordMatrix::Zero();
    CoordVector force = CoordVector::Zero();
    CoordMatrix damping = CoordMatrix::Zero();
    SegmentJacobians jac;
};

void add_hard_stop(const RobotParams& p, const JointLimits& lim, int coord, const CoordVector& q,
                   const CoordVector& v, Assembly& a) {
    const double k = p.hard_stop_stiffness;
    const double d = p.hard_stop_damping;
    if (q[coord] < lim.min) {
        const double tau = k * (lim.min - q[coord]) - d * v[coord];
        if (tau > 0.0) {
            a.force[coord] += tau;
            a.damping(coord, coord) += d;
        }
    } else if (q[coord] > lim.max) {
        const double tau = -k * (q[coord] - lim.max) - d * v[coord];
        if (tau < 0.0) {
            a.force[coord] += tau;
            a.damping(coord, coord) += d;
        }
    }
}

double hard_stop_energy(const RobotParams& p, const JointLimits& lim, double angle) {
    const double viol = angle < lim.min ? lim.min - angle : (angle > lim.max ? angle - lim.max : 0.0);
    return 0.5 * p.hard_stop_stiffness * viol * viol;
}

Assembly assemble(const RobotParams& p, const SimConfig& cfg, const WorldState& s, const MotorCommand& motor,
                  ContactState* contacts_out) {
    Assembly a;
    a.jac = segment_jacobians(p, s.q, s.qd);
    const CoordVector q = to_coords(s.trunk, s.q);
    const CoordVector v = to_coord_rates(s.trunk, s.qd);

    for (std::size_t i = 0; i < kNumSegments; ++i) {
        const double m = p.segment_masses[i];
        const auto& J = a.jac.linear[i];
        const auto& w = a.jac.angular[i];
        a.mass.noalias() += m * J.transpose() * J + p.segment_inertias[i] * w.transpose() * w;
        a.force.noalias() += m * J.transpose() * (Vec2(0.0, -p.gravity) - a.jac.bias[i]);
    }

    const JointTorques tau = motor_torques(motor);
    a.force[kHipL] += tau.hip_left;
    a.force[kKneeL] += tau.knee_left;
    a.force[kHipR] += tau.hip_right;
    a.force[kKneeR] += tau.knee_right;

    for (Side side : {Side::Left, Side::Right}) {
        const PassiveTorques pt = passive_torques(p, s.q.leg(side));
        a.force[ankle_coord(side)] -= pt.tau_ankle;
        a.force[knee_coord(side)] += pt.tau_knee_gas;
        // Reaction of the toe spring on the foot.
        a.force.noalias() -= pt.tau_toe * angular_jacobian(side, LegSegment::Foot).transpose();

        add_hard_stop(p, p.hip_limits, hip_coord(side), q, v, a);
        add_hard_stop(p, p.knee_limits, knee_coord(side), q, v, a);
        add_hard_stop(p, p.ankle_limits, ankle_coord(side), q, v, a);
    }

    ContactState contacts;
    if (cfg.contacts_enabled) {
        for (Side side : {Side::Left, Side::Right}) {
            const PointJacobian J_ball = point_jacobian(p, s.q, side, LegPoint::Ball);
            for (int k = 0; k < kNumContactSites; ++k) {
                const LegPoint lp = kSitePoints[static_cast<std::size_t>(k)];
                const PointJacobian J = lp == LegPoint::Ball ? J_ball : point_jacobian(p, s.q, side, lp);
                const Vec2 pos = point_position(p, s.trunk, s.q, side, lp);
                const ContactEvaluation ev = contact_force(cfg, pos, J * v);
                contacts.foot(side).sites[static_cast<std::size_t>(k)] = ev.point;
                if (!ev.point.in_contact) continue;
                // The massless toe passes its tip force to the foot at the toe joint.
                const PointJacobian& J_apply = lp == LegPoint::ToeTip ? J_ball : J;
                a.force.noalias() += J_apply.transpose() * ev.force;
                const Eigen::Matrix2d D = Eigen::Vector2d(ev.slope_tangential, ev.slope_normal).asDiagonal();
                a.damping.noalias() += J_apply.transpose() * D * J;
            }
        }
    }
    if (contacts_out) *contacts_out = contacts;

    for (int i = 0; i < kNumCoords; ++i) {
        if (!cfg.locked[static_cast<std::size_t>(i)]) continue;
        a.mass.row(i).setZero();
        a.mass.col(i).setZero();
        a.mass(i, i) = 1.0;
        a.damping.row(i).setZero();
        a.damping.col(i).setZero();
        a.force[i] = 0.0;
    }
    return a;
}

double toe_tip_height(const RobotParams& p, double ball_y, double foot_phi, double toe) {
    return ball_y + p.l_toe * direction(foot_phi + toe).y();
}

}  // namespace

void validate_sim(const SimConfig& c) {
    if (!(c.dt > 0.0)) throw ParamError("non-positive time step");
    if (c.contact_kn < 0.0 || c.contact_dn < 0.0) throw ParamError("negative contact stiffness or damping");
    if (c.friction_mu < 0.0 || !(c.friction_vreg > 0.0)) throw ParamError("invalid friction parameters");
    if (c.duration < 0.0) throw ParamError("negative duration");
    if (!(c.actuator_efficiency > 0.0 && c.actuator_efficiency <= 1.0)) {
        throw ParamError("actuator efficiency outside (0, 1]");
    }
    if (c.winding_loss < 0.0 || c.idle_power < 0.0) throw ParamError("negative actuator loss parameter");
    if (c.log_every < 1) throw ParamError("log_every must be >= 1");
}

std::string_view contact_site_name(ContactSite s) {
    switch (s) {
        case ContactSite::Heel: return "heel";
        case ContactSite::Ball: return "ball";
        case ContactSite::ToeTip: break;
    }
    return "toe";
}

bool FootContact::any() const {
    return std::any_of(sites.begin(), sites.end(), [](const ContactPoint& c) { return c.in_contact; });
}

double FootContact::normal_total() const {
    double n = 0.0;
    for (const auto& c : sites) n += c.normal_force;
    return n;
}

ContactEvaluation contact_force(const SimConfig& cfg, const Vec2& position, const Vec2& velocity) {
    ContactEvaluation ev;
    const double pen = -position.y();
    if (pen <= 0.0) return ev;
    ev.point.penetration = pen;
    const double raw = cfg.contact_kn * pen - cfg.contact_dn * velocity.y();
    if (raw <= 0.0) return ev;
    ev.point.in_contact = true;
    ev.point.normal_force = raw;
    ev.slope_normal = cfg.contact_dn;
    const double u = velocity.x() / cfg.friction_vreg;
    const double th = std::tanh(u);
    ev.point.tangential_force = -cfg.friction_mu * raw * th;
    ev.slope_tangential = cfg.friction_mu * raw * (1.0 - th * th) / cfg.friction_vreg;
    ev.force = Vec2(ev.point.tangential_force, ev.point.normal_force);
    return ev;
}

ContactState ground_contact_forces(const RobotParams& p, const SimConfig& cfg, const WorldState& s) {
    ContactState out;
    if (!cfg.contacts_enabled) return out;
    const CoordVector v = to_coord_rates(s.trunk, s.qd);
    for (Side side : {Side::Left, Side::Right}) {
        for (int k = 0; k < kNumContactSites; ++k) {
            const LegPoint lp = kSitePoints[static_cast<std::size_t>(k)];
            const Vec2 pos = point_position(p, s.trunk, s.q, side, lp);
            const Vec2 vel = point_jacobian(p, s.q, side, lp) * v;
            out.foot(side).sites[static_cast<std::size_t>(k)] = contact_force(cfg, pos, vel).point;
        }
    }
    return out;
}

double solve_toe_angle(const RobotParams& p, const SimConfig& cfg, const TrunkState& trunk, const JointAngles& q,
                       Side side) {
    const double rest = p.toe_rest_angle;
    if (!cfg.contacts_enabled) return rest;
    const double ball_y = point_position(p, trunk, q, side, LegPoint::Ball).y();
    const double foot_phi = leg_orientations(p, q.leg(side)).foot;
    // Net toe moment about the toe joint, positive lifting the tip.
    auto residual = [&](double toe) {
        const double pen = std::max(0.0, -toe_tip_height(p, ball_y, foot_phi, toe));
        const double lever = p.l_toe * std::sin(foot_phi + toe);
        return -p.k_toe * (toe - rest) + lever * cfg.contact_kn * pen;
    };
    if (residual(rest) <= 0.0) return rest;
    double hi = p.toe_max_angle;
    if (residual(hi) > 0.0) return hi;
    double lo = rest;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void refresh_passive_state(const RobotParams& p, const SimConfig& cfg, WorldState& s) {
    for (Side side : {Side::Left, Side::Right}) s.q.leg(side).toe = solve_toe_angle(p, cfg, s.trunk, s.q, side);
    s.contacts = ground_contact_forces(p, cfg, s);
}

JointTorques motor_torques(const MotorCommand& cmd) {
    return {cmd.tau_hip_left, cmd.tau_knee_left, cmd.tau_hip_right, cmd.tau_knee_right};
}

WorldState step(const RobotParams& p, const SimConfig& cfg, const WorldState& s, const MotorCommand& motor) {
    // Kick-drift-kick (velocity Verlet). Each half kick treats the contact,
    // friction and hard-stop damping implicitly; motor torques are held over
    // the step.
    const double h = 0.5 * cfg.dt;
    auto kick = [&](const WorldState& at, const CoordVector& v0) -> CoordVector {
        const Assembly a = assemble(p, cfg, at, motor, nullptr);
        const CoordMatrix lhs = a.mass + h * a.damping;
        return v0 + lhs.partialPivLu().solve(h * a.force);
    };

    const CoordVector v_half = kick(s, to_coord_rates(s.trunk, s.qd));
    const CoordVector q = to_coords(s.trunk, s.q) + cfg.dt * v_half;

    WorldState next;
    next.t = s.t + cfg.dt;
    from_coords(q, v_half, next.trunk, next.q, next.qd);
    for (Side side : {Side::Left, Side::Right}) {
        next.q.leg(side).toe = solve_toe_angle(p, cfg, next.trunk, next.q, side);
    }
    const CoordVector v = kick(next, v_half);
    from_coords(q, v, next.trunk, next.q, next.qd);
    for (Side side : {Side::Left, Side::Right}) {
        next.qd.leg(side).toe = (next.q.leg(side).toe - s.q.leg(side).toe) / cfg.dt;
    }
    for (int i = 0; i < kNumCoords; ++i) {
        if (!std::isfinite(q[i]) || !std::isfinite(v[i]) || std::abs(q[i]) > cfg.divergence_bound ||
            std::abs(v[i]) > cfg.divergence_bound) {
            throw SimulationDiverged("simulation diverged at t = " + std::to_string(next.t), next.t, -1);
        }
    }
    next.contacts = ground_contact_forces(p, cfg, next);
    return next;
}

double motor_electrical_power(double torque, double joint_rate, const SimConfig& cfg) {
    return std::max(0.0, torque * joint_rate) / cfg.actuator_efficiency + cfg.winding_loss * torque * torque;
}

CoordMatrix mass_matrix(const RobotParams& p, const JointAngles& q) {
    const SegmentJacobians sj = segment_jacobians(p, q, JointAngles{});
    CoordMatrix M = CoordMatrix::Zero();
    for (std::size_t i = 0; i < kNumSegments; ++i) {
        M.noalias() += p.segment_masses[i] * sj.linear[i].transpose() * sj.linear[i] +
                       p.segment_inertias[i] * sj.angular[i].transpose() * sj.angular[i];
    }
    return M;
}

EnergyBreakdown energy(const RobotParams& p, const SimConfig& cfg, const WorldState& s) {
    EnergyBreakdown e;
    const CoordVector v = to_coord_rates(s.trunk, s.qd);
    e.kinetic = 0.5 * v.dot(mass_matrix(p, s.q) * v);
    const SegmentKinematics kin = forward_kinematics(p, s.trunk, s.q);
    for (std::size_t i = 0; i < kNumSegments; ++i) {
        e.potential += p.segment_masses[i] * p.gravity * kin.segments[i].com_position.y();
    }
    e.elastic = elastic_energy(p, s.q);
    for (Side side : {Side::Left, Side::Right}) {
        const auto& leg = s.q.leg(side);
        e.hard_stop += hard_stop_energy(p, p.hip_limits, leg.hip) + hard_stop_energy(p, p.knee_limits, leg.knee) +
                       hard_stop_energy(p, p.ankle_limits, leg.ankle);
        if (cfg.contacts_enabled) {
            for (const auto lp : kSitePoints) {
                const double pen = std::max(0.0, -point_position(p, s.trunk, s.q, side, lp).y());
                e.contact += 0.5 * cfg.contact_kn * pen * pen;
            }
        }
    }
    return e;
}

Vec2 com_acceleration(const RobotParams& p, const SimConfig& cfg, const WorldState& s, const MotorCommand& motor) {
    const Assembly a = assemble(p, cfg, s, motor, nullptr);
    const CoordVector qdd = a.mass.ldlt().solve(a.force);
    Vec2 acc = Vec2::Zero();
    double m = 0.0;
    for (std::size_t i = 0; i < kNumSegments; ++i) {
        acc += p.segment_masses[i] * (a.jac.linear[i] * qdd + a.jac.bias[i]);
        m += p.segment_masses[i];
    }
    return acc / m;
}

}  // namespace ecowalker
