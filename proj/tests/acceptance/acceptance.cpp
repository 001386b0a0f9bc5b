// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when any line fails.

#include "ecowalker/analysis.hpp"
#include "ecowalker/config.hpp"
#include "ecowalker/stats.hpp"
#include "ecowalker/tendon.hpp"
#include "oracles.hpp"
#include "synthetic_events.hpp"

#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ecowalker;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(const char* name, const Outcome& o) {
    std::printf("%s  %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Run {
    std::string mode;
    Trajectory traj;
    AnalysisResult result;
    bool completed = false;
    std::string failure;
    int steady_right = 0;
};

ExperimentConfig shipped_config() { return load_experiment_config(ECOWALKER_CONFIG_DIR "/experiment.toml"); }

Run simulate(const ExperimentConfig& base, const char* mode) {
    ExperimentConfig cfg = base;
    cfg.mode = ActuationMode::parse(mode);
    Run r;
    r.mode = mode;
    try {
        r.traj = run_experiment(cfg.robot, cfg.sim, cfg.cpg, cfg.gains, cfg.mode, cfg.options);
        r.result = analyze_trajectory(r.traj, cfg.robot, cfg.analysis);
        r.completed = true;
        for (const auto& c : r.result.cycles) r.steady_right += c.events.leg == Side::Right;
    } catch (const Error& e) {
        r.failure = e.what();
    }
    return r;
}

std::string csv_text(const Trajectory& t) {
    std::ostringstream out;
    write_trajectory_csv(out, t);
    return out.str();
}

// --- analytic and property criteria ---------------------------------------

Outcome momentum_additivity(const RobotParams& p, const std::vector<const Run*>& runs) {
    double worst = 0.0, worst_delta = 0.0;
    std::size_t samples = 0, cycles = 0;
    auto check = [&](const GroupMomentum& g, double& w) {
        const double scale = g.tl.norm() + g.rb.norm();
        if (scale > 0.0) w = std::max(w, (g.tl + g.rb - g.com).norm() / scale);
    };
    for (const Run* r : runs) {
        if (!r->completed) return {false, r->mode + " did not complete"};
        for (const Sample& s : r->traj.samples) {
            const SegmentVectors seg = segment_momenta(p, segment_com_velocities(p, s.trunk, s.q, s.qd));
            for (Side side : {Side::Left, Side::Right}) check(group_momenta(seg, side), worst);
            ++samples;
        }
        for (const auto& c : r->result.cycles) {
            check(c.transition.dp, worst_delta);
            check(c.transition.at_vmin.p, worst_delta);
            check(c.transition.at_vmax.p, worst_delta);
            ++cycles;
        }
    }
    const bool ok = worst <= 1e-9 && worst_delta <= 1e-9 && samples > 0 && cycles > 0;
    return {ok, fmt("max rel. error %.1e over %zu samples, %.1e over %zu transitions (tol 1e-9)", worst, samples,
                    worst_delta, cycles)};
}

Outcome elastic_power_balance() {
    RobotParams p;
    const oracle::TendonOracle o(p);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int n = 0;
    for (int traj = 0; traj < 20; ++traj) {
        // Sinusoidal joint trajectories spanning slack and taut states.
        const double a0 = -0.3 + 0.6 * u(rng), a1 = 0.4 * u(rng), wa = 2 + 10 * u(rng);
        const double k0 = 0.6 * u(rng), k1 = 0.5 * u(rng), wk = 2 + 10 * u(rng);
        const double t0 = 0.2 + 0.5 * u(rng), t1 = 0.2 * u(rng), wt = 2 + 10 * u(rng);
        auto q_at = [&](double t) {
            return LegAngles{0.0, k0 + k1 * std::sin(wk * t), a0 + a1 * std::sin(wa * t), t0 + t1 * std::sin(wt * t)};
        };
        auto qd_at = [&](double t) {
            return LegAngles{0.0, k1 * wk * std::cos(wk * t), a1 * wa * std::cos(wa * t), t1 * wt * std::cos(wt * t)};
        };
        for (int i = 0; i < 500; ++i) {
            const double t = i * 2e-3;
            const LegAngles q = q_at(t), qd = qd_at(t);
            const ElasticPower ep = elastic_power(p, q, qd);
            const double de_dt = o.energy_rate(q.ankle, q.knee, q.toe, qd.ankle, qd.knee, qd.toe);
            const double scale = std::abs(ep.p_ankle) + std::abs(ep.p_knee_gas) + std::abs(ep.p_toe);
            if (scale == 0.0) continue;
            worst = std::max(worst, std::abs(ep.p_ankle + ep.p_knee_gas + ep.p_toe + de_dt) / scale);
            ++n;
        }
    }
    return {worst <= 1e-9 && n > 1000, fmt("max rel. error %.1e over %d samples (tol 1e-9)", worst, n)};
}

Outcome tendon_arithmetic() {
    RobotParams p;
    const LegAngles pose{0.0, 0.0, 0.0, p.toe_rest_angle};
    const TendonState t = tendon_extensions(p, pose);
    const double sol_torque = t.f_sol * p.r_sol;
    // Hand evaluation: 22 deg of ankle travel from slack on a 13 mm pulley,
    // 4.5 N/mm spring, same 13 mm lever.
    const double oracle_torque = (22.0 * pi / 180.0 * 0.013) * 4500.0 * 0.013;
    const bool match = std::abs(sol_torque - oracle_torque) <= 1e-6;
    const bool printed = std::lround(sol_torque * 1e4) == 2920;

    const LegAngles slack{0.0, p.knee_slack_angle, p.ankle_slack_angle, p.toe_rest_angle};
    const TendonState s = tendon_extensions(p, slack);
    const PassiveTorques tau = passive_torques(p, slack);
    const bool zero = s.f_sol == 0.0 && s.f_gas == 0.0 && tau.tau_ankle == 0.0 && tau.tau_knee_gas == 0.0 &&
                      tau.tau_toe == 0.0;
    return {match && printed && zero,
            fmt("SOL ankle torque %.7f N m (oracle %.7f, 4 d.p. %.4f); slack forces %s", sol_torque, oracle_torque,
                std::round(sol_torque * 1e4) / 1e4, zero ? "exactly zero" : "NON-ZERO")};
}

Outcome energy_conservation() {
    const auto pend = oracle::pendulum_drift();
    const auto drop = oracle::drop_drift();
    const double lim = 0.1 / 100.0;
    return {pend.relative_per_second < lim && drop.relative_per_second < lim,
            fmt("pendulum %.4f %%/s, drop %.4f %%/s at dt = 5e-4 s (limit 0.1 %%/s)",
                100 * pend.relative_per_second, 100 * drop.relative_per_second)};
}

Outcome event_detectors() {
    try {
        const auto truth = synthetic::truth();
        const auto base = synthetic::detect(0.0);
        const double err = synthetic::max_error(base, truth);
        bool equivariant = true;
        for (int k : {1, 3, 17, 250, 999, 2500, 10007}) {
            equivariant = equivariant && synthetic::shifted_by(base, synthetic::detect(k / synthetic::kRate), k);
        }
        return {err <= 0.002 && equivariant,
                fmt("max error %.2f ms (tol 2 ms); shift-equivariance %s", 1e3 * err, equivariant ? "exact" : "BROKEN")};
    } catch (const Error& e) {
        return {false, e.what()};
    }
}

Outcome filter_properties() {
    const double rate = 1000.0;
    double dc = 0.0;
    const Signal c = make_uniform("c", "", 0.0, 1 / rate, std::vector<double>(4000, 0.7391));
    for (int order : {1, 2, 3, 4}) {
        for (double cutoff : {5.0, 10.0, 25.0}) {
            for (double v : lowpass_zero_phase(c, order, cutoff).values) dc = std::max(dc, std::abs(v - 0.7391));
        }
    }
    int shift = 0;
    for (double centre : {0.5, 0.8123, 1.5}) {
        const Signal s = oracle::sampled("b", 0.0, 2.0, rate, [&](double t) { return oracle::bump(t, centre, 0.06); });
        const Signal f = lowpass_zero_phase(s, 2, 10.0);
        const auto peak = [](const std::vector<double>& v) { return std::max_element(v.begin(), v.end()) - v.begin(); };
        shift = std::max(shift, static_cast<int>(std::abs(peak(f.values) - peak(s.values))));
    }
    const Signal sine = oracle::sampled("s", 0.0, 6.0, rate, [](double t) { return std::sin(2 * pi * t); });
    const Signal fs = lowpass_zero_phase(sine, 2, 10.0);
    // Amplitude by projection onto sin and cos over whole periods away from the ends.
    double ps = 0, pc = 0;
    for (std::size_t i = 1000; i < 5000; ++i) {
        ps += fs.values[i] * std::sin(2 * pi * fs.t[i]);
        pc += fs.values[i] * std::cos(2 * pi * fs.t[i]);
    }
    const double amp = 2.0 * std::hypot(ps, pc) / 4000.0;
    const double expected = oracle::butterworth_power_gain(2, 10.0, rate, 1.0);
    const bool ok = dc <= 1e-12 && shift == 0 && amp >= 0.99 && std::abs(amp - expected) < 1e-6;
    return {ok, fmt("DC error %.1e; peak shift %d samples; 1 Hz amplitude %.6f (oracle %.6f, min 0.99)", dc, shift, amp,
                    expected)};
}

Outcome wilcoxon() {
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g(0.25, 1.0);
    double worst = 0.0;
    for (std::size_t n = 1; n <= 12; ++n) {
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> d(n);
            for (double& x : d) x = g(rng);
            std::vector<double> mags;
            for (double x : d) mags.push_back(std::abs(x));
            const std::vector<double> ranks = average_ranks(mags);
            double w = 0;
            for (std::size_t i = 0; i < n; ++i) w += d[i] > 0 ? ranks[i] : 0.0;
            const double ref = oracle::wilcoxon_enumerated_p(ranks, w);
            worst = std::max(worst, std::abs(wilcoxon_exact_p(ranks, w) - ref));
            if (n >= kWilcoxonMinPairs) {
                worst = std::max(worst, std::abs(wilcoxon_signed_rank(std::vector<double>(n, 0.0), d).p - ref));
            }
        }
    }
    const double p5 = wilcoxon_signed_rank({0, 0, 0, 0, 0}, {0.3, 0.1, 0.5, 0.2, 0.4}).p;
    double swap = 0.0;
    for (std::size_t n : {5, 8, 12, 30, 120}) {
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = g(rng);
            b[i] = g(rng);
        }
        swap = std::max(swap, std::abs(wilcoxon_signed_rank(a, b).p - wilcoxon_signed_rank(b, a).p));
    }
    return {worst <= 1e-12 && std::abs(p5 - 0.0625) <= 1e-12 && swap <= 1e-12,
            fmt("enumeration max diff %.1e (N = 1..12); N = 5 all positive p = %.6f; label swap diff %.1e", worst, p5,
                swap)};
}

Outcome cot_arithmetic() {
    const CotReport r = cost_of_transport(5.076, 2.1, 9.81, 0.44);
    return {std::abs(r.cot - 0.560) <= 0.001 && std::abs(r.cot_re_percent - 41.2) <= 0.1,
            fmt("COT %.4f (0.560 +- 0.001); COT_re %.2f %% (41.2 +- 0.1)", r.cot, r.cot_re_percent)};
}

// --- simulated gait criteria ----------------------------------------------

struct Direction {
    bool a = false, b = false, c = false, d = false;
    std::string detail;
    bool all() const { return a && b && c && d; }
};

Direction directional(const Run& akfi, const Run& other) {
    Direction out;
    if (!akfi.completed || !other.completed) {
        out.detail = "run did not complete";
        return out;
    }
    std::vector<std::string> ids{"t_SKF", "t_SAPF", "dt_SAPF_LLTD", "dabs_p_TL", "dabs_p_RB"};
    const auto samples = pair_metrics(akfi.result.metric_rows(), other.result.metric_rows(), Side::Right, ids);
    const ComparisonReport rep = build_report(samples, "AKFI", other.mode);
    std::map<std::string, const ReportRow*> row;
    for (const auto& r : rep.rows) row[r.measure] = &r;
    auto sig = [&](const char* id) { return row[id]->p && *row[id]->p < 1e-3; };
    auto pv = [&](const char* id) { return row[id]->p ? *row[id]->p : 1.0; };
    const auto* skf = row["t_SKF"];
    const auto* sapf = row["t_SAPF"];
    const auto* dt = row["dt_SAPF_LLTD"];
    const auto* tl = row["dabs_p_TL"];
    const auto* rb = row["dabs_p_RB"];
    out.a = skf->mean_b > skf->mean_a && sig("t_SKF") && sapf->mean_b > sapf->mean_a && sig("t_SAPF");
    out.b = dt->mean_a > 0 && dt->mean_b < 0 && sig("dt_SAPF_LLTD");
    out.c = tl->mean_b > tl->mean_a && sig("dabs_p_TL");
    out.d = rb->mean_b < rb->mean_a && sig("dabs_p_RB");
    out.detail = fmt("n = %d; (a) SKF %.2f->%.2f p=%.1e, SAPF %.2f->%.2f p=%.1e %s; (b) dt %.2f / %.2f p=%.1e %s; "
                     "(c) d|p_TL| %.4f->%.4f p=%.1e %s; (d) d|p_RB| %.4f->%.4f p=%.1e %s",
                     skf->n, skf->mean_a, skf->mean_b, pv("t_SKF"), sapf->mean_a, sapf->mean_b, pv("t_SAPF"),
                     out.a ? "ok" : "FAIL", dt->mean_a, dt->mean_b, pv("dt_SAPF_LLTD"), out.b ? "ok" : "FAIL",
                     tl->mean_a, tl->mean_b, pv("dabs_p_TL"), out.c ? "ok" : "FAIL", rb->mean_a, rb->mean_b,
                     pv("dabs_p_RB"), out.d ? "ok" : "FAIL");
    return out;
}

std::string run_status(const Run& r) {
    if (!r.completed) return r.mode + " failed: " + r.failure;
    return fmt("%s %d cycles", r.mode.c_str(), r.steady_right);
}

double max_event_sd(const Run& r, std::string& which) {
    static const char* names[] = {"SKF", "SHF", "SAPF", "LLTD", "TO", "vmin", "vmax"};
    double worst = 0.0;
    for (int e = 0; e < 7; ++e) {
        std::vector<double> v;
        for (const auto& c : r.result.cycles) {
            if (c.events.leg != Side::Right) continue;
            const auto& ev = c.events.events;
            const double ts[] = {ev.t_skf, ev.t_shf, ev.t_sapf, ev.t_lltd, ev.t_to, ev.t_vmin, ev.t_vmax};
            v.push_back(c.events.percent(ts[e]));
        }
        if (v.size() < 2) return INFINITY;
        double m = 0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double ss = 0;
        for (double x : v) ss += (x - m) * (x - m);
        const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
        if (sd > worst) {
            worst = sd;
            which = names[e];
        }
    }
    return worst;
}

}  // namespace

int main() {
    const ExperimentConfig cfg = shipped_config();
    std::printf("simulating AKFI, PKFI and PKFI40 (%d steady cycles each)...\n", cfg.options.cycles);
    std::fflush(stdout);
    const Run akfi = simulate(cfg, "akfi");
    const Run pkfi = simulate(cfg, "pkfi");
    const Run pkfi40 = simulate(cfg, "pkfi40");
    const Run akfi_again = simulate(cfg, "akfi");
    std::printf("\n");

    report("momentum additivity", momentum_additivity(cfg.robot, {&akfi, &pkfi, &pkfi40}));
    report("elastic power balance", elastic_power_balance());
    report("tendon arithmetic", tendon_arithmetic());
    report("energy conservation", energy_conservation());
    report("event detectors", event_detectors());
    report("filter properties", filter_properties());
    report("wilcoxon", wilcoxon());
    report("COT arithmetic", cot_arithmetic());

    const Direction dir = directional(akfi, pkfi);
    report("directional (a)-(d) PKFI", {dir.all(), dir.detail});

    const Direction dir40 = directional(akfi, pkfi40);
    const int need = 120;
    const bool stable = akfi.completed && pkfi.completed && pkfi40.completed && akfi.steady_right >= need &&
                        pkfi.steady_right >= need;
    report("stability", {stable && dir40.all(), run_status(akfi) + ", " + run_status(pkfi) + ", " +
                                                    run_status(pkfi40) + " (need 120); PKFI40 (a)-(d): " +
                                                    dir40.detail});

    const bool same = akfi.completed && akfi_again.completed && csv_text(akfi.traj) == csv_text(akfi_again.traj);
    report("determinism", {same, same ? fmt("two AKFI runs, %zu samples, byte-identical CSV", akfi.traj.samples.size())
                                      : std::string("CSV output differs between identical runs")});

    std::string detail;
    bool sd_ok = true;
    for (const Run* r : {&akfi, &pkfi, &pkfi40}) {
        std::string which = "-";
        const double sd = r->completed ? max_event_sd(*r, which) : INFINITY;
        sd_ok = sd_ok && sd < 0.5;
        detail += fmt("%s max SD %.2f %%GC (%s); ", r->mode.c_str(), sd, which.c_str());
    }
    report("event repeatability", {sd_ok, detail + "limit 0.5 %GC"});

    std::printf("\n%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
