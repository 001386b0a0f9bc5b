#pragma once

// Kinematic gait-event detectors. Every detector returns a sample time of its
// input signal, so shifting the time axis shifts the events by the same amount.
//
// Angle conventions follow model.hpp: hip and knee flexion positive, ankle
// dorsiflexion positive.

#include "ecowalker/signal.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace ecowalker {

class EventError : public Error {
public:
    using Error::Error;
};

struct EventConfig {
    double rate_threshold = 1.0;  // rad/s
    double to_window = 0.040;     // s after the steepest plantarflexion
    double skf_before = 0.2;      // s before SHF
    double skf_after = 0.1;       // s after SHF
    // Half-width of the CoM velocity search window around LLTD, as a fraction
    // of the cycle. A cycle holds two step transitions; this picks the one
    // where the analyzed leg trails.
    double transition_half_window = 0.25;
};

// Stance extremum (peak dorsiflexion) of the ankle in [t0, t1].
double detect_sapf(const Signal& ankle, double t0, double t1);

// Minimum ankle angle within cfg.to_window after the most negative ankle
// gradient in [t0, t1].
double detect_to(const Signal& ankle, const Signal& ankle_rate, double t0, double t1, const EventConfig& cfg = {});
double detect_to(const Signal& ankle, double t0, double t1, const EventConfig& cfg = {});

// Latest sample in [t0, t_to) where |gradient| rises through the threshold.
double detect_lltd(const Signal& leading_ankle_rate, double t0, double t_to, const EventConfig& cfg = {});

// First flexion gradient above the threshold after peak extension in [t0, t1].
double detect_shf(const Signal& hip, const Signal& hip_rate, double t0, double t1, const EventConfig& cfg = {});
double detect_shf(const Signal& hip, double t0, double t1, const EventConfig& cfg = {});

// First flexion gradient above the threshold in [t_shf - before, t_shf + after].
double detect_skf(const Signal& knee_rate, double t_shf, const EventConfig& cfg = {});

struct TransitionWindow {
    double t_vmin = 0.0;
    double t_vmax = 0.0;
    bool fallback = false;  // only one maximum followed the minimum
};

// Global minimum of the CoM vertical velocity in [t0, t1] and the second local
// maximum after it.
TransitionWindow detect_transition_window(const Signal& com_vy, double t0, double t1);

// Event times of one gait cycle of one leg, in seconds.
struct GaitEvents {
    double t_skf = 0.0;
    double t_shf = 0.0;
    double t_sapf = 0.0;
    double t_lltd = 0.0;
    double t_to = 0.0;
    double t_vmin = 0.0;
    double t_vmax = 0.0;
    bool vmax_fallback = false;
};

struct CycleEvents {
    int cycle = 0;
    Side leg = Side::Right;
    double t_start = 0.0;  // touch-down opening the cycle
    double t_end = 0.0;    // next touch-down of the same leg
    GaitEvents events;

    double percent(double t) const { return 100.0 * (t - t_start) / (t_end - t_start); }
    // t_LLTD - t_SAPF, in %GC.
    double sapf_lltd_delta() const { return percent(events.t_lltd) - percent(events.t_sapf); }
};

// Filtered joint signals the cycle detector reads. Rates are gradients of the
// corresponding angles.
struct LegSignals {
    Signal hip, knee, ankle;
    Signal hip_rate, knee_rate, ankle_rate;
};

// Runs all detectors on one cycle of `leg`; `other` is the opposite
// (leading) leg. The transition window is searched within
// cfg.transition_half_window of the cycle around LLTD.
GaitEvents detect_cycle_events(const LegSignals& leg, const LegSignals& other, const Signal& com_vy, double t_start,
                               double t_end, const EventConfig& cfg = {});

// Events CSV: one row per (cycle, leg), every event in s and in %GC.
void write_events_csv(std::ostream& out, const std::vector<CycleEvents>& rows);

}  // namespace ecowalker
