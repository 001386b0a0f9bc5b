#include "ecowalker/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "csv_format.hpp"

namespace ecowalker {

std::optional<double> Trajectory::metadata_number(const std::string& key) const {
    const auto it = metadata.find(key);
    if (it == metadata.end()) return std::nullopt;
    return csv::parse_number(it->second);
}

double ExperimentOptions::default_duration(const CpgParams& cpg) const {
    return (warmup_cycles + settle_cycles + cycles + 3) / cpg.frequency;
}

WorldState initial_state(const RobotParams& params, const SimConfig& cfg, const CpgParams& cpg,
                         const ExperimentOptions& opts) {
    WorldState s;
    const JointReference rr = reference_trajectory(cpg, opts.cpg_phase0, Side::Right);
    const JointReference rl = reference_trajectory(cpg, opts.cpg_phase0, Side::Left);

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> jitter(0.0, cfg.initial_jitter);
    auto noise = [&] { return cfg.initial_jitter > 0.0 ? jitter(rng) : 0.0; };

    s.q.right.hip = rr.hip + noise();
    s.q.right.knee = rr.knee + noise();
    s.q.left.hip = rl.hip + noise();
    s.q.left.knee = rl.knee + noise();
    for (Side side : {Side::Left, Side::Right}) s.q.leg(side).toe = params.toe_rest_angle;

    // Right foot flat: foot orientation pi/2 means shank + ankle = 0.
    const LegOrientations right = leg_orientations(params, s.q.right);
    s.q.right.ankle = -right.shank;
    s.q.left.ankle = params.ankle_slack_angle;

    s.qd.right.hip = rr.hip_rate;
    s.qd.right.knee = rr.knee_rate;
    s.qd.right.ankle = -(rr.hip_rate - rr.knee_rate);
    s.qd.left.hip = rl.hip_rate;
    s.qd.left.knee = rl.knee_rate;

    // Right heel slightly below ground (about the static sink of one foot).
    const double sink = 0.5 * params.total_mass * params.gravity / cfg.contact_kn;
    const LegOrientations r = leg_orientations(params, s.q.right);
    s.trunk.y = params.l_thigh * std::cos(r.thigh) + params.l_shank * std::cos(r.shank) + params.ankle_height - sink;

    // Trunk velocity that keeps the planted heel at rest.
    TrunkState still = s.trunk;
    const PointJacobian j = point_jacobian(params, s.q, Side::Right, LegPoint::Heel);
    const Vec2 v_rel = j * to_coord_rates(still, s.qd);
    s.trunk.vx = -v_rel.x();
    s.trunk.vy = -v_rel.y();

    refresh_passive_state(params, cfg, s);
    return s;
}

namespace {

LegMeasurement measure(const WorldState& s, Side side) {
    LegMeasurement m;
    m.hip = s.q.leg(side).hip;
    m.hip_rate = s.qd.leg(side).hip;
    m.knee = s.q.leg(side).knee;
    m.knee_rate = s.qd.leg(side).knee;
    m.ankle = s.q.leg(side).ankle;
    m.ankle_rate = s.qd.leg(side).ankle;
    m.foot_contact = s.contacts.foot(side).any();
    return m;
}

}  // namespace

Trajectory run_experiment(const RobotParams& params, const SimConfig& cfg, const CpgParams& cpg, const PdGains& gains,
                          const ActuationMode& mode, const ExperimentOptions& opts) {
    validate_params(params);
    validate_sim(cfg);
    validate_cpg(cpg);
    validate_gains(gains);
    if (opts.warmup_cycles < 0 || opts.settle_cycles < 0 || opts.cycles < 0) {
        throw ParamError("negative cycle count in experiment options");
    }

    const double duration = opts.duration.value_or(cfg.duration);
    if (!(duration >= 0.0)) throw ParamError("negative duration");
    const double switch_time = opts.warmup_cycles / cpg.frequency;
    const double steady_onset = (opts.warmup_cycles + opts.settle_cycles) / cpg.frequency;

    Trajectory traj;
    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    traj.metadata["dt"] = fmt(cfg.dt * cfg.log_every);
    traj.metadata["sim_dt"] = fmt(cfg.dt);
    traj.metadata["idle_power"] = fmt(cfg.idle_power);
    traj.metadata["mode"] = mode.name();
    traj.metadata["pkfi_start"] = fmt(mode.start_fraction);
    traj.metadata["mode_switch_time"] = fmt(switch_time);
    traj.metadata["steady_onset"] = fmt(steady_onset);
    traj.metadata["steady_cycles"] = std::to_string(opts.cycles);
    traj.metadata["frequency"] = fmt(cpg.frequency);
    traj.metadata["cpg_phase0"] = fmt(opts.cpg_phase0);
    traj.metadata["seed"] = std::to_string(cfg.seed);
    traj.metadata["total_mass"] = fmt(params.total_mass);
    traj.metadata["gravity"] = fmt(params.gravity);

    const long n_steps = std::lround(duration / cfg.dt);
    if (n_steps == 0) return traj;
    traj.samples.reserve(static_cast<std::size_t>(n_steps / cfg.log_every + 1));

    GaitController ctrl(cpg, gains, mode, {opts.cpg_phase0, switch_time});
    WorldState state = initial_state(params, cfg, cpg, opts);

    for (long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        state.t = t;
        const MotorCommand cmd = ctrl.update(t, measure(state, Side::Left), measure(state, Side::Right));

        if (k % cfg.log_every == 0) {
            Sample smp;
            smp.t = t;
            smp.trunk = state.trunk;
            smp.q = state.q;
            smp.qd = state.qd;
            smp.hip_cmd_left = cmd.ref_left.hip;
            smp.knee_cmd_left = cmd.ref_left.knee;
            smp.hip_cmd_right = cmd.ref_right.hip;
            smp.knee_cmd_right = cmd.ref_right.knee;
            smp.motor = motor_torques(cmd);
            smp.passive = passive_torques(params, state.q);
            smp.contacts = state.contacts;
            smp.motor_power = {
                motor_electrical_power(smp.motor.hip_left, state.qd.left.hip, cfg) + cfg.idle_power,
                motor_electrical_power(smp.motor.knee_left, state.qd.left.knee, cfg) + cfg.idle_power,
                motor_electrical_power(smp.motor.hip_right, state.qd.right.hip, cfg) + cfg.idle_power,
                motor_electrical_power(smp.motor.knee_right, state.qd.right.knee, cfg) + cfg.idle_power,
            };
            smp.cpg_phase = ctrl.cpg_phase(t);
            smp.knee_gated_left = cmd.knee_gated_left;
            smp.knee_gated_right = cmd.knee_gated_right;
            traj.samples.push_back(smp);
        }

        state = step(params, cfg, state, cmd);
        if (state.trunk.y < cfg.fall_height) {
            const long cycle = static_cast<long>(std::floor(state.t * cpg.frequency));
            throw RobotFell("robot fell at t = " + fmt(state.t) + " s (cycle " + std::to_string(cycle) + ")",
                            state.t, cycle);
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

struct Column {
    std::string name;
    std::function<double(const Sample&)> get;
    std::function<void(Sample&, double)> set;
};

template <class Member>
void add(std::vector<Column>& cols, std::string name, Member member) {
    cols.push_back({std::move(name), [member](const Sample& s) { return static_cast<double>(member(const_cast<Sample&>(s))); },
                    [member](Sample& s, double v) { member(s) = v; }});
}

template <class Member>
void add_flag(std::vector<Column>& cols, std::string name, Member member) {
    cols.push_back({std::move(name), [member](const Sample& s) { return member(const_cast<Sample&>(s)) ? 1.0 : 0.0; },
                    [member](Sample& s, double v) { member(s) = v != 0.0; }});
}

std::vector<Column> build_columns() {
    std::vector<Column> c;
    add(c, "t", [](Sample& s) -> double& { return s.t; });
    add(c, "x", [](Sample& s) -> double& { return s.trunk.x; });
    add(c, "y", [](Sample& s) -> double& { return s.trunk.y; });
    add(c, "vx", [](Sample& s) -> double& { return s.trunk.vx; });
    add(c, "vy", [](Sample& s) -> double& { return s.trunk.vy; });
    for (Side side : {Side::Left, Side::Right}) {
        const std::string sf(side_suffix(side));
        add(c, "hip_" + sf, [side](Sample& s) -> double& { return s.q.leg(side).hip; });
        add(c, "knee_" + sf, [side](Sample& s) -> double& { return s.q.leg(side).knee; });
        add(c, "ankle_" + sf, [side](Sample& s) -> double& { return s.q.leg(side).ankle; });
        add(c, "toe_" + sf, [side](Sample& s) -> double& { return s.q.leg(side).toe; });
    }
    for (Side side : {Side::Left, Side::Right}) {
        const std::string sf(side_suffix(side));
        add(c, "hip_rate_" + sf, [side](Sample& s) -> double& { return s.qd.leg(side).hip; });
        add(c, "knee_rate_" + sf, [side](Sample& s) -> double& { return s.qd.leg(side).knee; });
        add(c, "ankle_rate_" + sf, [side](Sample& s) -> double& { return s.qd.leg(side).ankle; });
        add(c, "toe_rate_" + sf, [side](Sample& s) -> double& { return s.qd.leg(side).toe; });
    }
    add(c, "hip_cmd_L", [](Sample& s) -> double& { return s.hip_cmd_left; });
    add(c, "knee_cmd_L", [](Sample& s) -> double& { return s.knee_cmd_left; });
    add(c, "hip_cmd_R", [](Sample& s) -> double& { return s.hip_cmd_right; });
    add(c, "knee_cmd_R", [](Sample& s) -> double& { return s.knee_cmd_right; });
    add(c, "tau_hip_L", [](Sample& s) -> double& { return s.motor.hip_left; });
    add(c, "tau_knee_L", [](Sample& s) -> double& { return s.motor.knee_left; });
    add(c, "tau_hip_R", [](Sample& s) -> double& { return s.motor.hip_right; });
    add(c, "tau_knee_R", [](Sample& s) -> double& { return s.motor.knee_right; });
    for (Side side : {Side::Left, Side::Right}) {
        const std::string sf(side_suffix(side));
        add(c, "tau_ankle_" + sf, [side](Sample& s) -> double& { return s.passive.leg(side).tau_ankle; });
        add(c, "tau_knee_gas_" + sf, [side](Sample& s) -> double& { return s.passive.leg(side).tau_knee_gas; });
        add(c, "tau_toe_" + sf, [side](Sample& s) -> double& { return s.passive.leg(side).tau_toe; });
    }
    for (Side side : {Side::Left, Side::Right}) {
        const std::string sf(side_suffix(side));
        for (ContactSite site : {ContactSite::Heel, ContactSite::Ball, ContactSite::ToeTip}) {
            const std::string nm(contact_site_name(site));
            add(c, "fn_" + nm + "_" + sf,
                [side, site](Sample& s) -> double& { return s.contacts.foot(side)[site].normal_force; });
            add(c, "ft_" + nm + "_" + sf,
                [side, site](Sample& s) -> double& { return s.contacts.foot(side)[site].tangential_force; });
            add(c, "pen_" + nm + "_" + sf,
                [side, site](Sample& s) -> double& { return s.contacts.foot(side)[site].penetration; });
            add_flag(c, "contact_" + nm + "_" + sf,
                     [side, site](Sample& s) -> bool& { return s.contacts.foot(side)[site].in_contact; });
        }
    }
    add(c, "power_hip_L", [](Sample& s) -> double& { return s.motor_power[0]; });
    add(c, "power_knee_L", [](Sample& s) -> double& { return s.motor_power[1]; });
    add(c, "power_hip_R", [](Sample& s) -> double& { return s.motor_power[2]; });
    add(c, "power_knee_R", [](Sample& s) -> double& { return s.motor_power[3]; });
    add(c, "cpg_phase", [](Sample& s) -> double& { return s.cpg_phase; });
    add_flag(c, "knee_gated_L", [](Sample& s) -> bool& { return s.knee_gated_left; });
    add_flag(c, "knee_gated_R", [](Sample& s) -> bool& { return s.knee_gated_right; });
    return c;
}

const std::vector<Column>& columns() {
    static const std::vector<Column> cols = build_columns();
    return cols;
}

using csv::append_number;
using csv::split;

}  // namespace

const std::vector<std::string>& trajectory_columns() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& c : columns()) n.push_back(c.name);
        return n;
    }();
    return names;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    for (const auto& [k, v] : traj.metadata) out << "# " << k << '=' << v << '\n';
    const auto& cols = columns();
    std::string line;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) line += ',';
        line += cols[i].name;
    }
    out << line << '\n';
    for (const Sample& s : traj.samples) {
        line.clear();
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) line += ',';
            append_number(line, cols[i].get(s));
        }
        line += '\n';
        out << line;
    }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    write_trajectory_csv(f, traj);
    if (!f) throw Error("write failed: '" + path + "'");
}

Trajectory read_trajectory_csv(std::istream& in) {
    Trajectory traj;
    const auto& cols = columns();
    std::string line;
    long lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header_seen) {
            if (line.rfind('#', 0) == 0) {
                const std::string body = line.substr(line.find_first_not_of("# ") == std::string::npos
                                                         ? line.size()
                                                         : line.find_first_not_of("# "));
                const auto eq = body.find('=');
                if (eq != std::string::npos) traj.metadata[body.substr(0, eq)] = body.substr(eq + 1);
                continue;
            }
            if (line.empty()) continue;
            const auto names = split(line, ',');
            if (names.size() != cols.size()) {
                throw SchemaError("line " + std::to_string(lineno) + ": header has " + std::to_string(names.size()) +
                                  " columns, expected " + std::to_string(cols.size()));
            }
            for (std::size_t i = 0; i < cols.size(); ++i) {
                if (names[i] != cols[i].name) {
                    throw SchemaError("line " + std::to_string(lineno) + ": column " + std::to_string(i + 1) +
                                      " is '" + std::string(names[i]) + "', expected '" + cols[i].name + "'");
                }
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != cols.size()) {
            throw SchemaError("line " + std::to_string(lineno) + ": " + std::to_string(fields.size()) +
                              " fields, expected " + std::to_string(cols.size()));
        }
        Sample s;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const auto parsed = csv::parse_number(fields[i]);
            const double v = parsed.value_or(0.0);
            if (!parsed || !std::isfinite(v)) {
                throw SchemaError("line " + std::to_string(lineno) + ": bad value '" + std::string(fields[i]) +
                                  "' in column '" + cols[i].name + "'");
            }
            cols[i].set(s, v);
        }
        if (!traj.samples.empty() && !(s.t > traj.samples.back().t)) {
            throw SchemaError("line " + std::to_string(lineno) + ": time not strictly increasing");
        }
        traj.samples.push_back(s);
    }
    if (!header_seen) throw SchemaError("missing header row");
    return traj;
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "'");
    return read_trajectory_csv(f);
}

}  // namespace ecowalker
