#pragma once

// Gait analysis of a trajectory log: resample, filter, segment by ankle-based
// touch-downs, detect events, and compute transition metrics and COT for the
// steady-state cycles.

#include "ecowalker/events.hpp"
#include "ecowalker/experiment.hpp"
#include "ecowalker/signal.hpp"
#include "ecowalker/transition.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ecowalker {

struct AnalysisConfig {
    double resample_rate = 1000.0;  // Hz
    int filter_order = 2;
    double angle_cutoff = 25.0;     // Hz
    double velocity_cutoff = 15.0;  // Hz, also used for powers
    TouchdownConfig touchdown{0.2, 0.1, 1.0, deg2rad(-19.0)};
    EventConfig events;
    int cycles = 120;  // steady cycles kept per leg; 0 keeps all
    double cot_nr = kNaturalRunnerCot;
};

void validate_analysis(const AnalysisConfig& cfg);

// Filtered, uniformly sampled signals derived from a trajectory.
struct GaitSignals {
    LegSignals left;
    LegSignals right;
    Signal x, y, vx, vy;      // trunk (hip joint) position and velocity
    Signal com_vx, com_vy;    // whole-body CoM velocity
    Signal motor_power[4];    // hip_L, knee_L, hip_R, knee_R, incl. idle
    MomentumSeries momenta;

    const LegSignals& leg(Side s) const { return s == Side::Left ? left : right; }
};

GaitSignals prepare_signals(const Trajectory& traj, const RobotParams& params, const AnalysisConfig& cfg);

struct CycleResult {
    CycleEvents events;
    TransitionMetrics transition;
};

// Long-format metric row.
struct MetricRow {
    int cycle = 0;
    Side leg = Side::Right;
    std::string measure;
    double value = 0.0;
};

struct CycleFailure {
    int cycle = 0;
    Side leg = Side::Right;
    std::string reason;
};

struct AnalysisResult {
    std::vector<CycleResult> cycles;       // both legs, ordered by leg then cycle
    std::vector<CycleFailure> failures;    // cycles whose events could not be detected
    std::vector<double> touchdowns[2];     // all detected touch-downs per leg (index by side_index)
    CotReport cot;
    double window_start = 0.0;             // analyzed span used for COT and speed
    double window_end = 0.0;
    double touchdown_cpg_phase = 0.0;      // mean right-leg CPG phase at its touch-downs
    // Cycle-averaged curves of the right leg's steady cycles (for plots).
    CycleSet hip_R, knee_R, ankle_R, com_vx_R, com_vy_R;
    std::vector<std::string> diagnostics;

    std::vector<MetricRow> metric_rows() const;
};

// Steady state starts at the trajectory's `steady_onset` metadata (0 if absent).
AnalysisResult analyze_trajectory(const Trajectory& traj, const RobotParams& params, const AnalysisConfig& cfg = {});

void write_events_csv(std::ostream& out, const AnalysisResult& res);
void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metrics_csv(std::istream& in);
// key,value rows: COT, speed, cycle counts, phase offset.
void write_summary_csv(std::ostream& out, const AnalysisResult& res);

}  // namespace ecowalker
