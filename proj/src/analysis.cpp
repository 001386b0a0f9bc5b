#include "ecowalker/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "csv_format.hpp"

namespace ecowalker {

void validate_analysis(const AnalysisConfig& cfg) {
    if (!(cfg.resample_rate > 0.0)) throw ParamError("non-positive resample rate");
    if (cfg.filter_order < 1) throw ParamError("filter order must be at least 1");
    const double nyquist = 0.5 * cfg.resample_rate;
    if (!(cfg.angle_cutoff > 0.0 && cfg.angle_cutoff < nyquist) ||
        !(cfg.velocity_cutoff > 0.0 && cfg.velocity_cutoff < nyquist)) {
        throw ParamError("invalid cutoff: must lie in (0, Nyquist)");
    }
    if (cfg.cycles < 0) throw ParamError("negative cycle count");
    if (!(cfg.cot_nr > 0.0)) throw ParamError("non-positive reference COT");
    if (!(cfg.events.rate_threshold > 0.0)) throw ParamError("non-positive event rate threshold");
    if (!(cfg.events.transition_half_window > 0.0 && cfg.events.transition_half_window <= 0.5)) {
        throw ParamError("transition half window outside (0, 0.5]");
    }
}

namespace {

template <typename Get>
Signal raw_signal(const Trajectory& traj, std::string name, std::string unit, Get get) {
    Signal s;
    s.name = std::move(name);
    s.unit = std::move(unit);
    s.t.reserve(traj.samples.size());
    s.values.reserve(traj.samples.size());
    for (const auto& smp : traj.samples) {
        s.t.push_back(smp.t);
        s.values.push_back(get(smp));
    }
    return s;
}

struct Pipeline {
    const AnalysisConfig& cfg;

    Signal angle(const Signal& raw) const {
        return lowpass_zero_phase(resample(raw, cfg.resample_rate), cfg.filter_order, cfg.angle_cutoff);
    }
    Signal rate(const Signal& filtered_angle) const {
        return lowpass_zero_phase(gradient(filtered_angle), cfg.filter_order, cfg.velocity_cutoff);
    }
    Signal power(const Signal& raw) const {
        return lowpass_zero_phase(resample(raw, cfg.resample_rate), cfg.filter_order, cfg.velocity_cutoff);
    }
};

LegSignals leg_signals(const Trajectory& traj, Side side, const Pipeline& pl) {
    const std::string sf(side_suffix(side));
    LegSignals l;
    l.hip = pl.angle(raw_signal(traj, "hip_" + sf, "rad", [side](const Sample& s) { return s.q.leg(side).hip; }));
    l.knee = pl.angle(raw_signal(traj, "knee_" + sf, "rad", [side](const Sample& s) { return s.q.leg(side).knee; }));
    l.ankle =
        pl.angle(raw_signal(traj, "ankle_" + sf, "rad", [side](const Sample& s) { return s.q.leg(side).ankle; }));
    l.hip_rate = pl.rate(l.hip);
    l.knee_rate = pl.rate(l.knee);
    l.ankle_rate = pl.rate(l.ankle);
    return l;
}

Signal like(const Signal& grid, std::string name, std::string unit, std::vector<double> values) {
    Signal s = grid;
    s.name = std::move(name);
    s.unit = std::move(unit);
    s.values = std::move(values);
    return s;
}

double circular_mean(const std::vector<double>& phases) {
    double c = 0.0, s = 0.0;
    for (double p : phases) {
        c += std::cos(2.0 * kPi * p);
        s += std::sin(2.0 * kPi * p);
    }
    double m = std::atan2(s, c) / (2.0 * kPi);
    return m < 0.0 ? m + 1.0 : m;
}

}  // namespace

GaitSignals prepare_signals(const Trajectory& traj, const RobotParams& params, const AnalysisConfig& cfg) {
    validate_analysis(cfg);
    if (traj.samples.size() < 3) throw SignalError("trajectory has fewer than 3 samples");
    const Pipeline pl{cfg};
    GaitSignals g;
    g.left = leg_signals(traj, Side::Left, pl);
    g.right = leg_signals(traj, Side::Right, pl);
    g.x = pl.angle(raw_signal(traj, "x", "m", [](const Sample& s) { return s.trunk.x; }));
    g.y = pl.angle(raw_signal(traj, "y", "m", [](const Sample& s) { return s.trunk.y; }));
    g.vx = pl.rate(g.x);
    g.vy = pl.rate(g.y);
    static const char* power_names[] = {"power_hip_L", "power_knee_L", "power_hip_R", "power_knee_R"};
    for (std::size_t m = 0; m < 4; ++m) {
        g.motor_power[m] = pl.power(raw_signal(traj, power_names[m], "W", [m](const Sample& s) { return s.motor_power[m]; }));
    }

    const std::size_t n = g.x.size();
    auto& ms = g.momenta;
    ms.t = g.x.t;
    ms.p.resize(n);
    ms.v.resize(n);
    std::vector<double> cvx(n), cvy(n);
    for (std::size_t i = 0; i < n; ++i) {
        const TrunkState trunk{g.x.values[i], g.y.values[i], g.vx.values[i], g.vy.values[i]};
        JointAngles q, qd;
        for (Side side : {Side::Left, Side::Right}) {
            const auto& l = g.leg(side);
            q.leg(side) = {l.hip.values[i], l.knee.values[i], l.ankle.values[i], 0.0};
            qd.leg(side) = {l.hip_rate.values[i], l.knee_rate.values[i], l.ankle_rate.values[i], 0.0};
        }
        const SegmentKinematics kin = segment_com_velocities(params, trunk, q, qd);
        for (std::size_t s = 0; s < kNumSegments; ++s) ms.v[i][s] = kin.segments[s].com_velocity;
        ms.p[i] = segment_momenta(params, kin);
        const Vec2 v_com = com_velocity(group_momenta(ms.p[i], Side::Right).com, params.total_mass);
        cvx[i] = v_com.x();
        cvy[i] = v_com.y();
    }
    g.com_vx = like(g.x, "com_vx", "m/s", std::move(cvx));
    g.com_vy = like(g.x, "com_vy", "m/s", std::move(cvy));
    return g;
}

AnalysisResult analyze_trajectory(const Trajectory& traj, const RobotParams& params, const AnalysisConfig& cfg) {
    const GaitSignals sig = prepare_signals(traj, params, cfg);
    const double onset = traj.metadata_number("steady_onset").value_or(0.0);

    AnalysisResult res;
    std::vector<double> kept_td[2];
    for (Side side : {Side::Left, Side::Right}) {
        const auto k = static_cast<std::size_t>(side_index(side));
        const TouchdownResult td = detect_touchdowns(sig.leg(side).ankle, cfg.touchdown);
        res.touchdowns[k] = td.times;
        if (!td.diagnostic.empty()) res.diagnostics.push_back(std::string(side_suffix(side)) + ": " + td.diagnostic);

        const auto first = std::lower_bound(td.times.begin(), td.times.end(), onset);
        std::vector<double> steady(first, td.times.end());
        if (cfg.cycles > 0 && steady.size() > static_cast<std::size_t>(cfg.cycles) + 1) {
            steady.resize(static_cast<std::size_t>(cfg.cycles) + 1);
        }
        kept_td[k] = steady;
        for (std::size_t c = 0; c + 1 < steady.size(); ++c) {
            CycleResult cr;
            cr.events.cycle = static_cast<int>(c);
            cr.events.leg = side;
            cr.events.t_start = steady[c];
            cr.events.t_end = steady[c + 1];
            try {
                cr.events.events = detect_cycle_events(sig.leg(side), sig.leg(opposite(side)), sig.com_vy,
                                                       steady[c], steady[c + 1], cfg.events);
                const auto& e = cr.events.events;
                cr.transition = transition_impulses(params, sig.momenta, side, e.t_vmin, e.t_lltd, e.t_vmax);
                res.cycles.push_back(cr);
            } catch (const Error& err) {
                res.failures.push_back({static_cast<int>(c), side, err.what()});
            }
        }
        if (steady.size() < 2) {
            res.diagnostics.push_back(std::string(side_suffix(side)) + ": no complete steady cycle");
        }
    }
    if (kept_td[0].size() < 2 && kept_td[1].size() < 2) throw SignalError("fewer than 1 complete cycle");

    // Analyzed span: union of the kept cycles of both legs.
    res.window_start = std::numeric_limits<double>::infinity();
    res.window_end = -std::numeric_limits<double>::infinity();
    for (const auto& tds : kept_td) {
        if (tds.size() < 2) continue;
        res.window_start = std::min(res.window_start, tds.front());
        res.window_end = std::max(res.window_end, tds.back());
    }
    const double span = res.window_end - res.window_start;
    const double v_avg = (interpolate(sig.x, res.window_end) - interpolate(sig.x, res.window_start)) / span;
    const double idle = traj.metadata_number("idle_power").value_or(SimConfig{}.idle_power);
    std::vector<std::array<double, 4>> power;
    for (std::size_t i = 0; i < sig.x.size(); ++i) {
        const double t = sig.x.t[i];
        if (t < res.window_start || t > res.window_end) continue;
        power.push_back({sig.motor_power[0].values[i], sig.motor_power[1].values[i], sig.motor_power[2].values[i],
                         sig.motor_power[3].values[i]});
    }
    const double e_en = net_positive_power(power, idle);
    try {
        res.cot = cost_of_transport(e_en, params.total_mass, params.gravity, v_avg, cfg.cot_nr);
    } catch (const TransitionError& err) {
        res.diagnostics.push_back(std::string("COT undefined: ") + err.what());
        res.cot.net_positive_power = e_en;
        res.cot.v_avg = v_avg;
        res.cot.cot_nr = cfg.cot_nr;
        res.cot.cot = std::numeric_limits<double>::quiet_NaN();
        res.cot.cot_re_percent = std::numeric_limits<double>::quiet_NaN();
    }

    const auto& right_td = kept_td[side_index(Side::Right)];
    if (right_td.size() >= 2) {
        std::vector<double> phases;
        for (double t : right_td) {
            const auto it = std::lower_bound(traj.samples.begin(), traj.samples.end(), t,
                                             [](const Sample& s, double v) { return s.t < v; });
            if (it != traj.samples.end()) phases.push_back(it->cpg_phase);
        }
        res.touchdown_cpg_phase = circular_mean(phases);
        res.hip_R = average_cycles(sig.right.hip, right_td);
        res.knee_R = average_cycles(sig.right.knee, right_td);
        res.ankle_R = average_cycles(sig.right.ankle, right_td);
        res.com_vx_R = average_cycles(sig.com_vx, right_td);
        res.com_vy_R = average_cycles(sig.com_vy, right_td);
    }
    return res;
}

std::vector<MetricRow> AnalysisResult::metric_rows() const {
    std::vector<MetricRow> rows;
    for (const auto& c : cycles) {
        const auto& ev = c.events;
        const auto& e = ev.events;
        const auto& tm = c.transition;
        auto add = [&](const std::string& name, double v) { rows.push_back({ev.cycle, ev.leg, name, v}); };
        add("t_SKF", ev.percent(e.t_skf));
        add("t_SHF", ev.percent(e.t_shf));
        add("t_SAPF", ev.percent(e.t_sapf));
        add("t_LLTD", ev.percent(e.t_lltd));
        add("t_TO", ev.percent(e.t_to));
        add("t_vmin", ev.percent(e.t_vmin));
        add("t_vmax", ev.percent(e.t_vmax));
        add("dt_SAPF_LLTD", ev.sapf_lltd_delta());
        add("cycle_duration", ev.t_end - ev.t_start);
        const std::pair<const char*, Vec2> dps[] = {{"TL", tm.dp.tl}, {"RB", tm.dp.rb}, {"CoM", tm.dp.com}};
        const double dabs[] = {tm.dabs_tl, tm.dabs_rb, tm.dabs_com};
        for (std::size_t g = 0; g < 3; ++g) {
            const std::string grp = dps[g].first;
            add("dabs_p_" + grp, dabs[g]);
            add("dp_" + grp + "_x", dps[g].second.x());
            add("dp_" + grp + "_y", dps[g].second.y());
        }
        add("com_direction_change_deg", tm.com_direction_change_deg);
        const std::pair<const char*, const TransitionSnapshot*> snaps[] = {
            {"vmin", &tm.at_vmin}, {"LLTD", &tm.at_lltd}, {"vmax", &tm.at_vmax}};
        for (const auto& [at, s] : snaps) {
            const std::string sfx = std::string("_at_") + at;
            add("p_TL_x" + sfx, s->p.tl.x());
            add("p_TL_y" + sfx, s->p.tl.y());
            add("p_RB_x" + sfx, s->p.rb.x());
            add("p_RB_y" + sfx, s->p.rb.y());
            add("p_CoM_x" + sfx, s->p.com.x());
            add("p_CoM_y" + sfx, s->p.com.y());
            add("v_CoM_x" + sfx, s->v_com.x());
            add("v_CoM_y" + sfx, s->v_com.y());
            add("ke_TL" + sfx, s->ke.tl);
            add("ke_RB" + sfx, s->ke.rb);
            add("ke_segments" + sfx, s->ke.segments);
            add("ke_CoM" + sfx, s->ke.com);
        }
    }
    return rows;
}

void write_events_csv(std::ostream& out, const AnalysisResult& res) {
    std::vector<CycleEvents> rows;
    rows.reserve(res.cycles.size());
    for (const auto& c : res.cycles) rows.push_back(c.events);
    write_events_csv(out, rows);
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
    out << "cycle,leg,measure,value\n";
    for (const auto& r : rows) {
        out << r.cycle << ',' << side_suffix(r.leg) << ',' << r.measure << ',' << csv::number(r.value) << '\n';
    }
}

std::vector<MetricRow> read_metrics_csv(std::istream& in) {
    std::vector<MetricRow> rows;
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header) {
            if (line != "cycle,leg,measure,value") {
                throw SchemaError("line " + std::to_string(lineno) + ": expected header 'cycle,leg,measure,value'");
            }
            header = true;
            continue;
        }
        const auto f = csv::split(line, ',');
        if (f.size() != 4) {
            throw SchemaError("line " + std::to_string(lineno) + ": " + std::to_string(f.size()) +
                              " fields, expected 4");
        }
        MetricRow r;
        const auto cycle = csv::parse_number(f[0]);
        const auto value = csv::parse_number(f[3]);
        if (!cycle || *cycle < 0 || std::floor(*cycle) != *cycle) {
            throw SchemaError("line " + std::to_string(lineno) + ": bad cycle index '" + std::string(f[0]) + "'");
        }
        if (f[1] != "L" && f[1] != "R") {
            throw SchemaError("line " + std::to_string(lineno) + ": bad leg '" + std::string(f[1]) + "'");
        }
        if (!value) throw SchemaError("line " + std::to_string(lineno) + ": bad value '" + std::string(f[3]) + "'");
        r.cycle = static_cast<int>(*cycle);
        r.leg = f[1] == "L" ? Side::Left : Side::Right;
        r.measure = std::string(f[2]);
        r.value = *value;
        rows.push_back(std::move(r));
    }
    if (!header) throw SchemaError("missing header row");
    return rows;
}

void write_summary_csv(std::ostream& out, const AnalysisResult& res) {
    auto count = [&](Side s) {
        return std::count_if(res.cycles.begin(), res.cycles.end(), [s](const CycleResult& c) { return c.events.leg == s; });
    };
    auto failed = [&](Side s) {
        return std::count_if(res.failures.begin(), res.failures.end(), [s](const CycleFailure& c) { return c.leg == s; });
    };
    out << "key,value\n";
    out << "cycles_L," << count(Side::Left) << '\n';
    out << "cycles_R," << count(Side::Right) << '\n';
    out << "failed_cycles_L," << failed(Side::Left) << '\n';
    out << "failed_cycles_R," << failed(Side::Right) << '\n';
    out << "window_start," << csv::number(res.window_start) << '\n';
    out << "window_end," << csv::number(res.window_end) << '\n';
    out << "v_avg," << csv::number(res.cot.v_avg) << '\n';
    out << "net_positive_power," << csv::number(res.cot.net_positive_power) << '\n';
    out << "cot," << csv::number(res.cot.cot) << '\n';
    out << "cot_nr," << csv::number(res.cot.cot_nr) << '\n';
    out << "cot_re_percent," << csv::number(res.cot.cot_re_percent) << '\n';
    out << "touchdown_cpg_phase," << csv::number(res.touchdown_cpg_phase) << '\n';
}

}  // namespace ecowalker
