#include "ecowalker/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace ecowalker {

void Signal::validate() const {
    if (t.size() != values.size()) throw SignalError("signal '" + name + "': time and value lengths differ");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || !std::isfinite(t[i])) {
            throw SignalError("signal '" + name + "': non-finite sample at index " + std::to_string(i));
        }
        if (i > 0 && !(t[i] > t[i - 1])) {
            throw SignalError("signal '" + name + "': time not strictly increasing at index " + std::to_string(i));
        }
    }
}

Signal make_uniform(std::string name, std::string unit, double t0, double dt, std::vector<double> values) {
    if (!(dt > 0.0)) throw SignalError("non-positive sample period");
    Signal s;
    s.name = std::move(name);
    s.unit = std::move(unit);
    s.dt = dt;
    s.values = std::move(values);
    s.t.resize(s.values.size());
    for (std::size_t i = 0; i < s.t.size(); ++i) s.t[i] = t0 + static_cast<double>(i) * dt;
    return s;
}

double interpolate(const Signal& sig, double t) {
    const auto& ts = sig.t;
    if (ts.empty()) throw SignalError("interpolate on empty signal '" + sig.name + "'");
    if (t <= ts.front()) return sig.values.front();
    if (t >= ts.back()) return sig.values.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const auto i = static_cast<std::size_t>(it - ts.begin());
    const double w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
    return sig.values[i - 1] + w * (sig.values[i] - sig.values[i - 1]);
}

Signal resample(const Signal& sig, double rate) {
    if (sig.size() < 2) throw SignalError("resample needs at least 2 samples: '" + sig.name + "'");
    if (!(rate > 0.0)) throw SignalError("non-positive resampling rate");
    sig.validate();
    const double dt = 1.0 / rate;
    const double t0 = sig.t.front();
    const double span = sig.t.back() - t0;
    // Tolerate rounding so a grid that lands on the last sample keeps it.
    const auto n = static_cast<std::size_t>(std::floor(span / dt * (1.0 + 1e-12))) + 1;
    std::vector<double> out(n);
    std::size_t j = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = std::min(t0 + static_cast<double>(i) * dt, sig.t.back());
        while (j + 1 < sig.size() && sig.t[j] < t) ++j;
        const double w = (t - sig.t[j - 1]) / (sig.t[j] - sig.t[j - 1]);
        out[i] = sig.values[j - 1] + std::clamp(w, 0.0, 1.0) * (sig.values[j] - sig.values[j - 1]);
    }
    return make_uniform(sig.name, sig.unit, t0, dt, std::move(out));
}

std::vector<SosSection> butterworth_lowpass(int order, double cutoff, double sample_rate) {
    if (order < 1) throw SignalError("filter order must be at least 1");
    if (!(sample_rate > 0.0)) throw SignalError("non-positive sample rate");
    if (!(cutoff > 0.0) || !(cutoff < 0.5 * sample_rate)) {
        throw SignalError("invalid cutoff: must lie in (0, Nyquist)");
    }
    const double fs2 = 2.0 * sample_rate;
    const double wc = fs2 * std::tan(kPi * cutoff / sample_rate);  // prewarped
    std::vector<SosSection> sos;

    // Conjugate analog pole pairs, mapped by the bilinear transform.
    for (int k = 0; k < order / 2; ++k) {
        const double theta = kPi * (2.0 * k + 1.0 + order) / (2.0 * order);
        const std::complex<double> s = wc * std::polar(1.0, theta);
        const std::complex<double> z = (fs2 + s) / (fs2 - s);
        const double a1 = -2.0 * z.real();
        const double a2 = std::norm(z);
        const double g = (1.0 + a1 + a2) / 4.0;  // unit DC gain with zeros at z = -1
        sos.push_back({g, 2.0 * g, g, a1, a2});
    }
    if (order % 2 == 1) {
        const double p = (fs2 - wc) / (fs2 + wc);
        const double g = (1.0 - p) / 2.0;
        sos.push_back({g, g, 0.0, -p, 0.0});
    }
    return sos;
}

namespace {

// Transposed direct form II, in place, starting from the steady state of a
// constant input x0.
void sosfilt_steady(const std::vector<SosSection>& sos, std::vector<double>& x) {
    if (x.empty()) return;
    double level = x.front();
    for (const auto& s : sos) {
        const double gain = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
        const double y_ss = gain * level;
        double z2 = s.b2 * level - s.a2 * y_ss;
        double z1 = s.b1 * level - s.a1 * y_ss + z2;
        for (double& v : x) {
            const double in = v;
            const double out = s.b0 * in + z1;
            z1 = s.b1 * in - s.a1 * out + z2;
            z2 = s.b2 * in - s.a2 * out;
            v = out;
        }
        level = y_ss;
    }
}

}  // namespace

std::vector<double> filtfilt(const std::vector<SosSection>& sos, const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    const std::size_t taps = 2 * sos.size() + 1;
    const std::size_t pad = std::min(3 * taps, n - 1);

    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[n - 1 - i]);

    sosfilt_steady(sos, ext);
    std::reverse(ext.begin(), ext.end());
    sosfilt_steady(sos, ext);
    std::reverse(ext.begin(), ext.end());
    return {ext.begin() + static_cast<std::ptrdiff_t>(pad), ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

Signal lowpass_zero_phase(const Signal& sig, int order, double cutoff) {
    if (!sig.uniform()) throw SignalError("filtering needs a uniform signal: '" + sig.name + "'");
    Signal out = sig;
    out.values = filtfilt(butterworth_lowpass(order, cutoff, 1.0 / sig.dt), sig.values);
    return out;
}

std::vector<double> gradient(const std::vector<double>& x, double dt) {
    const std::size_t n = x.size();
    if (n < 3) throw SignalError("gradient needs at least 3 samples");
    std::vector<double> g(n);
    for (std::size_t i = 1; i + 1 < n; ++i) g[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt);
    g[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * dt);
    g[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * dt);
    return g;
}

Signal gradient(const Signal& sig) {
    if (!sig.uniform()) throw SignalError("gradient needs a uniform signal: '" + sig.name + "'");
    Signal out = sig;
    out.name = sig.name + "_rate";
    out.unit = sig.unit + "/s";
    out.values = gradient(sig.values, sig.dt);
    return out;
}

TouchdownResult detect_touchdowns(const Signal& ankle, const TouchdownConfig& cfg) {
    TouchdownResult res;
    if (ankle.size() < 3) {
        res.diagnostic = "signal too short";
        return res;
    }
    const auto g = gradient(ankle.values, ankle.dt > 0.0 ? ankle.dt : (ankle.t[1] - ankle.t[0]));
    std::optional<std::size_t> rest_start;
    bool armed = false;
    int plateaus = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double rate = std::abs(g[i]);
        const bool posture_ok = !cfg.plateau_max_angle || ankle.values[i] <= *cfg.plateau_max_angle;
        if (rate < cfg.plateau_rate && posture_ok) {
            if (!rest_start) rest_start = i;
            if (!armed && ankle.t[i] - ankle.t[*rest_start] >= cfg.plateau_duration) {
                armed = true;
                ++plateaus;
            }
            continue;
        }
        rest_start.reset();
        if (armed && rate > cfg.activity_rate) {
            res.indices.push_back(i);
            res.times.push_back(ankle.t[i]);
            armed = false;
        }
    }
    if (res.indices.empty()) {
        res.diagnostic = plateaus == 0 ? "no swing plateau found" : "no activity after plateau";
    }
    return res;
}

CycleSet average_cycles(const Signal& sig, const std::vector<double>& touchdowns, std::size_t grid_points) {
    if (grid_points < 2) throw SignalError("cycle grid needs at least 2 points");
    if (touchdowns.size() < 2) throw SignalError("zero complete cycles");
    CycleSet set;
    set.touchdowns = touchdowns;
    set.grid.resize(grid_points);
    for (std::size_t k = 0; k < grid_points; ++k) {
        set.grid[k] = 100.0 * static_cast<double>(k) / static_cast<double>(grid_points - 1);
    }
    for (std::size_t c = 0; c + 1 < touchdowns.size(); ++c) {
        const double t0 = touchdowns[c];
        const double t1 = touchdowns[c + 1];
        if (!(t1 > t0)) throw SignalError("touch-downs not strictly increasing");
        std::vector<double> row(grid_points);
        for (std::size_t k = 0; k < grid_points; ++k) row[k] = interpolate(sig, t0 + (t1 - t0) * set.grid[k] / 100.0);
        set.cycles.push_back(std::move(row));
    }
    const double n = static_cast<double>(set.cycles.size());
    set.mean.assign(grid_points, 0.0);
    set.sd.assign(grid_points, 0.0);
    for (const auto& row : set.cycles) {
        for (std::size_t k = 0; k < grid_points; ++k) set.mean[k] += row[k] / n;
    }
    if (set.cycles.size() > 1) {
        for (const auto& row : set.cycles) {
            for (std::size_t k = 0; k < grid_points; ++k) {
                const double d = row[k] - set.mean[k];
                set.sd[k] += d * d / (n - 1.0);
            }
        }
        for (double& v : set.sd) v = std::sqrt(v);
    }
    return set;
}

}  // namespace ecowalker
