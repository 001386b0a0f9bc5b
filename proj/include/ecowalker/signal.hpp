#pragma once

// Resampling, zero-phase Butterworth filtering, gradients, touch-down
// segmentation and cycle averaging.

#include "ecowalker/common.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ecowalker {

class SignalError : public Error {
public:
    using Error::Error;
};

struct Signal {
    std::string name;
    std::string unit;
    std::vector<double> t;       // s, strictly increasing
    std::vector<double> values;
    double dt = 0.0;             // sample period when uniform, else 0

    std::size_t size() const { return values.size(); }
    bool uniform() const { return dt > 0.0; }
    // Throws SignalError on length mismatch, non-increasing time or non-finite values.
    void validate() const;
};

// Uniform signal with t[i] = t0 + i*dt.
Signal make_uniform(std::string name, std::string unit, double t0, double dt, std::vector<double> values);

// Linear interpolation onto t0, t0 + 1/rate, ... up to the last sample time.
Signal resample(const Signal& sig, double rate);

// Digital Butterworth low-pass as cascaded second-order sections.
struct SosSection {
    double b0, b1, b2, a1, a2;  // a0 = 1
};
std::vector<SosSection> butterworth_lowpass(int order, double cutoff, double sample_rate);

// Forward-backward filtering with odd reflective padding and steady-state
// initial conditions, so a constant input passes unchanged.
std::vector<double> filtfilt(const std::vector<SosSection>& sos, const std::vector<double>& x);
Signal lowpass_zero_phase(const Signal& sig, int order, double cutoff);

// Second-order central differences; second-order one-sided at the ends.
std::vector<double> gradient(const std::vector<double>& x, double dt);
Signal gradient(const Signal& sig);

struct TouchdownConfig {
    double plateau_rate = 0.2;       // rad/s
    double plateau_duration = 0.1;   // s
    double activity_rate = 1.0;      // rad/s
    // When set, a plateau only counts while the ankle is at or below this
    // angle (the plantarflexed swing posture).
    std::optional<double> plateau_max_angle;
};

struct TouchdownResult {
    std::vector<std::size_t> indices;
    std::vector<double> times;
    std::string diagnostic;  // set when nothing was found
};

TouchdownResult detect_touchdowns(const Signal& ankle, const TouchdownConfig& cfg = {});

struct CycleSet {
    std::vector<double> grid;                 // %GC, 0..100
    std::vector<std::vector<double>> cycles;  // one row per complete cycle
    std::vector<double> mean;
    std::vector<double> sd;                   // sample SD; zero for a single cycle
    std::vector<double> touchdowns;           // s, cycle boundaries
};

constexpr std::size_t kCycleGridPoints = 1001;

// Time-normalizes every complete cycle between consecutive touch-downs.
CycleSet average_cycles(const Signal& sig, const std::vector<double>& touchdowns,
                        std::size_t grid_points = kCycleGridPoints);

// Value of `sig` at time `t` by linear interpolation (clamped at the ends).
double interpolate(const Signal& sig, double t);

}  // namespace ecowalker
