#include "ecowalker/transition.hpp"

#include <algorithm>
#include <cmath>

namespace ecowalker {

namespace {

bool in_trailing_leg(Segment s, Side trailing) {
    for (auto part : {LegSegment::Thigh, LegSegment::Shank, LegSegment::Foot}) {
        if (segment_of(trailing, part) == s) return true;
    }
    return false;
}

// Linear interpolation weight of t within the series, with bounds checking.
std::pair<std::size_t, double> locate(const std::vector<double>& ts, double t) {
    if (ts.empty() || t < ts.front() || t > ts.back()) {
        throw TransitionError("event time outside signal span");
    }
    const auto it = std::lower_bound(ts.begin(), ts.end(), t);
    const auto i = static_cast<std::size_t>(it - ts.begin());
    if (*it == t || i == 0) return {i, 0.0};
    return {i - 1, (t - ts[i - 1]) / (ts[i] - ts[i - 1])};
}

SegmentVectors lerp(const std::vector<SegmentVectors>& xs, std::size_t i, double w) {
    if (w == 0.0) return xs[i];
    SegmentVectors out;
    for (std::size_t s = 0; s < kNumSegments; ++s) out[s] = xs[i][s] + w * (xs[i + 1][s] - xs[i][s]);
    return out;
}

}  // namespace

SegmentVectors segment_momenta(const RobotParams& params, const SegmentKinematics& kin) {
    SegmentVectors p;
    for (std::size_t i = 0; i < kNumSegments; ++i) p[i] = params.segment_masses[i] * kin.segments[i].com_velocity;
    return p;
}

GroupMomentum group_momenta(const SegmentVectors& p, Side trailing) {
    GroupMomentum g;
    for (std::size_t i = 0; i < kNumSegments; ++i) {
        (in_trailing_leg(static_cast<Segment>(i), trailing) ? g.tl : g.rb) += p[i];
        g.com += p[i];
    }
    return g;
}

GroupMomentum group_momenta(const SegmentVectors& p, std::string_view trailing) {
    if (trailing == "L") return group_momenta(p, Side::Left);
    if (trailing == "R") return group_momenta(p, Side::Right);
    throw TransitionError("unknown side label: '" + std::string(trailing) + "'");
}

namespace {

GroupEnergy energy_from_velocities(const RobotParams& params, const SegmentVectors& v, Side trailing) {
    GroupEnergy e;
    Vec2 p_com = Vec2::Zero();
    for (std::size_t i = 0; i < kNumSegments; ++i) {
        const double m = params.segment_masses[i];
        const double ke = 0.5 * m * v[i].squaredNorm();
        (in_trailing_leg(static_cast<Segment>(i), trailing) ? e.tl : e.rb) += ke;
        e.segments += ke;
        p_com += m * v[i];
    }
    e.com = 0.5 * p_com.squaredNorm() / params.total_mass;
    return e;
}

}  // namespace

GroupEnergy kinetic_energy(const RobotParams& params, const SegmentKinematics& kin, Side trailing) {
    SegmentVectors v;
    for (std::size_t i = 0; i < kNumSegments; ++i) v[i] = kin.segments[i].com_velocity;
    return energy_from_velocities(params, v, trailing);
}

Vec2 com_velocity(const Vec2& p_com, double total_mass) {
    if (!(total_mass > 0.0)) throw TransitionError("non-positive total mass");
    return p_com / total_mass;
}

double direction_change_deg(const Vec2& v0, const Vec2& v1) {
    if (v0.norm() == 0.0 || v1.norm() == 0.0) throw TransitionError("direction of a zero velocity vector is undefined");
    double d = std::atan2(v1.y(), v1.x()) - std::atan2(v0.y(), v0.x());
    if (d > kPi) d -= 2.0 * kPi;
    if (d <= -kPi) d += 2.0 * kPi;
    return rad2deg(d);
}

TransitionSnapshot snapshot(const RobotParams& params, const MomentumSeries& series, Side trailing, double t) {
    const auto [i, w] = locate(series.t, t);
    TransitionSnapshot s;
    s.t = t;
    s.p = group_momenta(lerp(series.p, i, w), trailing);
    s.v_com = com_velocity(s.p.com, params.total_mass);
    s.ke = energy_from_velocities(params, lerp(series.v, i, w), trailing);
    return s;
}

TransitionMetrics transition_impulses(const RobotParams& params, const MomentumSeries& series, Side trailing,
                                      double t_vmin, double t_lltd, double t_vmax) {
    if (!(t_vmin < t_vmax)) throw TransitionError("transition window ends before it starts");
    TransitionMetrics m;
    m.at_vmin = snapshot(params, series, trailing, t_vmin);
    m.at_lltd = snapshot(params, series, trailing, t_lltd);
    m.at_vmax = snapshot(params, series, trailing, t_vmax);
    const auto& a = m.at_vmin.p;
    const auto& b = m.at_vmax.p;
    m.dp.tl = b.tl - a.tl;
    m.dp.rb = b.rb - a.rb;
    m.dp.com = b.com - a.com;
    m.dabs_tl = b.tl.norm() - a.tl.norm();
    m.dabs_rb = b.rb.norm() - a.rb.norm();
    m.dabs_com = b.com.norm() - a.com.norm();
    m.com_direction_change_deg = direction_change_deg(m.at_vmin.v_com, m.at_vmax.v_com);
    return m;
}

double net_positive_power(const std::vector<std::array<double, 4>>& motor_power, double idle_power) {
    if (motor_power.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& row : motor_power) {
        for (double p : row) sum += std::max(0.0, p - idle_power);
    }
    return sum / static_cast<double>(motor_power.size());
}

CotReport cost_of_transport(double net_positive_power, double mass, double gravity, double v_avg, double cot_nr) {
    if (!(v_avg > 0.0)) throw TransitionError("non-positive average speed");
    if (!(mass > 0.0) || !(gravity > 0.0)) throw TransitionError("non-positive mass or gravity");
    CotReport r;
    r.net_positive_power = net_positive_power;
    r.v_avg = v_avg;
    r.cot = net_positive_power / (mass * gravity * v_avg);
    r.cot_nr = cot_nr;
    r.cot_re_percent = 100.0 * r.cot / cot_nr;
    return r;
}

}  // namespace ecowalker
