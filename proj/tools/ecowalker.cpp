// Command-line front end: simulate, analyze, compare, report.

#include "ecowalker/analysis.hpp"
#include "ecowalker/config.hpp"
#include "ecowalker/plots.hpp"
#include "ecowalker/stats.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace ecowalker;

namespace {

struct CommonFlags {
    std::string config;
    std::string mode;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> cycles;
};

ExperimentConfig load_config(const CommonFlags& f) {
    ExperimentConfig cfg;
    const fs::path path = resolve_config_path(f.config);
    if (!f.config.empty() && path.empty()) throw ConfigError("config file not found: " + f.config);
    if (!path.empty()) cfg = load_experiment_config(path);
    if (!f.mode.empty()) {
        try {
            cfg.mode = ActuationMode::parse(f.mode);
        } catch (const ParamError& e) {
            throw ConfigError(e.what());
        }
    }
    if (f.seed) cfg.sim.seed = *f.seed;
    if (f.cycles) {
        if (*f.cycles < 1) throw ConfigError("--cycles must be at least 1");
        cfg.options.cycles = *f.cycles;
        cfg.analysis.cycles = *f.cycles;
        if (!cfg.options.duration) cfg.options.duration = cfg.options.default_duration(cfg.cpg);
    }
    if (!f.out.empty()) cfg.output_dir = f.out;
    return cfg;
}

template <class Fn>
void write_file(const fs::path& path, Fn&& fn) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    fn(out);
}

Trajectory simulate(const ExperimentConfig& cfg) {
    Trajectory traj = run_experiment(cfg.robot, cfg.sim, cfg.cpg, cfg.gains, cfg.mode, cfg.options);
    for (const auto& [k, v] : config_echo(cfg)) traj.metadata[k] = v;
    return traj;
}

AnalysisResult analyze(const Trajectory& traj, const ExperimentConfig& cfg, const fs::path& dir,
                       const std::string& label) {
    const RobotParams params = robot_params_from_metadata(traj.metadata, cfg.robot);
    AnalysisResult res = analyze_trajectory(traj, params, cfg.analysis);
    write_file(dir / "events.csv", [&](std::ostream& o) { write_events_csv(o, res); });
    write_file(dir / "metrics.csv", [&](std::ostream& o) { write_metrics_csv(o, res.metric_rows()); });
    write_file(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(o, res); });
    write_plots(dir / "plots", {{label, &res}});
    for (const auto& d : res.diagnostics) std::cerr << "note: " << d << '\n';
    return res;
}

ComparisonReport compare(const std::vector<MetricRow>& a, const std::vector<MetricRow>& b, const std::string& label_a,
                         const std::string& label_b, const fs::path& dir, const std::string& stem) {
    std::vector<std::string> ids;
    for (const auto& m : table_measures()) ids.push_back(m.id);
    const auto samples = pair_metrics(a, b, Side::Right, ids);
    const ComparisonReport rep = build_report(samples, label_a, label_b);
    if (rep.rows.empty() || rep.rows.front().n < kWilcoxonMinPairs) {
        throw StatsError("fewer than " + std::to_string(kWilcoxonMinPairs) + " common cycles");
    }
    write_file(dir / (stem + ".csv"), [&](std::ostream& o) { write_report_csv(o, rep); });
    write_file(dir / (stem + ".txt"), [&](std::ostream& o) { write_report_text(o, rep); });
    return rep;
}

std::vector<MetricRow> read_metrics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    try {
        return read_metrics_csv(in);
    } catch (const SchemaError& e) {
        throw SchemaError(path + ": " + e.what());
    }
}

std::string upper(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

void print_summary(const std::string& label, const AnalysisResult& res) {
    int n_right = 0;
    for (const auto& c : res.cycles) n_right += c.events.leg == Side::Right;
    std::cout << label << ": " << n_right << " right-leg cycles, " << res.failures.size() << " failed, v = "
              << res.cot.v_avg << " m/s, COT = " << res.cot.cot << " (" << res.cot.cot_re_percent
              << " % of natural runner)\n";
}

void add_common(CLI::App* cmd, CommonFlags& f, bool simulation_flags) {
    cmd->add_option("--config", f.config, "experiment TOML file (default: $ECOWALKER_CONFIG_DIR/experiment.toml)");
    cmd->add_option("--out", f.out, "output directory");
    if (simulation_flags) {
        cmd->add_option("--mode", f.mode, "knee mode: akfi, pkfi or pkfi40");
        cmd->add_option("--seed", f.seed, "random seed");
        cmd->add_option("--cycles", f.cycles, "steady-state cycles to simulate and keep");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"EcoWalker-2 gait simulation and analysis"};
    app.require_subcommand(1);

    CommonFlags sim_f, ana_f, cmp_f, rep_f;
    auto* sim = app.add_subcommand("simulate", "run one experiment and write its trajectory CSV");
    add_common(sim, sim_f, true);

    std::string traj_path;
    auto* ana = app.add_subcommand("analyze", "run the gait-analysis pipeline on a trajectory CSV");
    ana->add_option("trajectory", traj_path, "trajectory CSV")->required();
    add_common(ana, ana_f, false);
    ana->add_option("--cycles", ana_f.cycles, "steady-state cycles to keep per leg");

    std::string metrics_a, metrics_b, labels = "A,B";
    auto* cmp = app.add_subcommand("compare", "paired Wilcoxon comparison of two metrics CSVs");
    cmp->add_option("metrics_a", metrics_a, "metrics CSV of condition A")->required();
    cmp->add_option("metrics_b", metrics_b, "metrics CSV of condition B")->required();
    cmp->add_option("--labels", labels, "condition labels, comma separated");
    add_common(cmp, cmp_f, false);

    auto* rep = app.add_subcommand("report", "simulate and analyze AKFI, PKFI and PKFI40 and compare them");
    add_common(rep, rep_f, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            const ExperimentConfig cfg = load_config(sim_f);
            const fs::path dir = cfg.output_dir;
            const fs::path path = dir / ("trajectory_" + cfg.mode.name() + ".csv");
            try {
                const Trajectory traj = simulate(cfg);
                write_file(path, [&](std::ostream& o) { write_trajectory_csv(o, traj); });
                std::cout << "wrote " << path.string() << " (" << traj.samples.size() << " samples)\n";
            } catch (const SimulationError& e) {
                std::cerr << "simulation failed in cycle " << e.cycle_index << " at t = " << e.time
                          << " s: " << e.what() << '\n';
                return 2;
            }
        } else if (*ana) {
            const ExperimentConfig cfg = load_config(ana_f);
            const Trajectory traj = read_trajectory_csv(traj_path);
            const fs::path dir = ana_f.out.empty() ? fs::path(traj_path).parent_path() / "analysis" : fs::path(ana_f.out);
            const auto mode = traj.metadata.find("mode");
            const std::string label = mode == traj.metadata.end() ? "run" : upper(mode->second);
            print_summary(label, analyze(traj, cfg, dir, label));
            std::cout << "wrote " << dir.string() << '\n';
        } else if (*cmp) {
            const auto comma = labels.find(',');
            if (comma == std::string::npos) throw ConfigError("--labels expects two comma-separated names");
            const fs::path dir = cmp_f.out.empty() ? fs::path(".") : fs::path(cmp_f.out);
            const ComparisonReport r = compare(read_metrics(metrics_a), read_metrics(metrics_b),
                                               labels.substr(0, comma), labels.substr(comma + 1), dir, "report");
            write_report_text(std::cout, r);
        } else if (*rep) {
            const ExperimentConfig base = load_config(rep_f);
            const fs::path dir = base.output_dir;
            std::vector<std::pair<std::string, AnalysisResult>> results;
            for (const char* m : {"akfi", "pkfi", "pkfi40"}) {
                ExperimentConfig cfg = base;
                cfg.mode = ActuationMode::parse(m);
                const fs::path sub = dir / m;
                Trajectory traj;
                try {
                    traj = simulate(cfg);
                } catch (const SimulationError& e) {
                    std::cerr << m << ": simulation failed in cycle " << e.cycle_index << " at t = " << e.time
                              << " s: " << e.what() << '\n';
                    return 2;
                }
                write_file(sub / "trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, traj); });
                results.emplace_back(upper(m), analyze(traj, cfg, sub, upper(m)));
                print_summary(upper(m), results.back().second);
            }
            std::vector<PlotSeries> series;
            for (const auto& [label, res] : results) series.push_back({label, &res});
            write_plots(dir / "plots", series);
            const auto akfi_rows = results[0].second.metric_rows();
            for (std::size_t i = 1; i < results.size(); ++i) {
                const std::string& label = results[i].first;
                std::cout << "\n" << results[0].first << " vs " << label << '\n';
                const auto r = compare(akfi_rows, results[i].second.metric_rows(), results[0].first, label, dir,
                                       "compare_" + label);
                write_report_text(std::cout, r);
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
