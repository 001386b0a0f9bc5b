#include "ecowalker/events.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "csv_format.hpp"

namespace ecowalker {

namespace {

struct Range {
    std::size_t begin;  // first index with t >= t0
    std::size_t end;    // one past the last index with t <= t1
    bool empty() const { return begin >= end; }
};

Range window(const Signal& s, double t0, double t1) {
    const auto b = std::lower_bound(s.t.begin(), s.t.end(), t0);
    const auto e = std::upper_bound(s.t.begin(), s.t.end(), t1);
    return {static_cast<std::size_t>(b - s.t.begin()), static_cast<std::size_t>(std::max(b, e) - s.t.begin())};
}

void require_same_grid(const Signal& a, const Signal& b) {
    if (a.size() != b.size()) throw EventError("signal '" + a.name + "' and its rate differ in length");
}

std::string fmt_time(double t) {
    std::ostringstream os;
    os << t;
    return os.str();
}

}  // namespace

double detect_sapf(const Signal& ankle, double t0, double t1) {
    const Range r = window(ankle, t0, t1);
    if (r.end - r.begin < 3) throw EventError("no extremum: SAPF window too short");
    const auto first = ankle.values.begin() + static_cast<std::ptrdiff_t>(r.begin);
    const auto last = ankle.values.begin() + static_cast<std::ptrdiff_t>(r.end);
    const auto i = static_cast<std::size_t>(std::max_element(first, last) - ankle.values.begin());
    if (i == r.begin || i + 1 == r.end) throw EventError("no extremum: ankle angle monotone in SAPF window");
    return ankle.t[i];
}

double detect_to(const Signal& ankle, const Signal& ankle_rate, double t0, double t1, const EventConfig& cfg) {
    require_same_grid(ankle, ankle_rate);
    const Range r = window(ankle_rate, t0, t1);
    if (r.empty()) throw EventError("no negative gradient peak: empty TO window");
    std::size_t peak = r.begin;
    for (std::size_t i = r.begin; i < r.end; ++i) {
        if (ankle_rate.values[i] < ankle_rate.values[peak]) peak = i;
    }
    if (!(ankle_rate.values[peak] < 0.0)) throw EventError("no negative gradient peak in TO window");
    const Range w = window(ankle, ankle.t[peak], ankle.t[peak] + cfg.to_window);
    std::size_t best = w.begin;
    for (std::size_t i = w.begin; i < w.end; ++i) {
        if (ankle.values[i] < ankle.values[best]) best = i;
    }
    return ankle.t[best];
}

double detect_to(const Signal& ankle, double t0, double t1, const EventConfig& cfg) {
    return detect_to(ankle, gradient(ankle), t0, t1, cfg);
}

double detect_lltd(const Signal& leading_ankle_rate, double t0, double t_to, const EventConfig& cfg) {
    const auto& g = leading_ankle_rate.values;
    const Range r = window(leading_ankle_rate, t0, t_to);
    std::optional<std::size_t> found;
    for (std::size_t i = std::max<std::size_t>(r.begin, 1); i < r.end; ++i) {
        if (!(leading_ankle_rate.t[i] < t_to)) break;
        if (std::abs(g[i]) > cfg.rate_threshold && std::abs(g[i - 1]) <= cfg.rate_threshold) found = i;
    }
    if (!found) throw EventError("no threshold crossing of the leading ankle before TO at t = " + fmt_time(t_to));
    return leading_ankle_rate.t[*found];
}

double detect_shf(const Signal& hip, const Signal& hip_rate, double t0, double t1, const EventConfig& cfg) {
    require_same_grid(hip, hip_rate);
    const Range r = window(hip, t0, t1);
    if (r.empty()) throw EventError("no exceedance: empty SHF window");
    std::size_t ext = r.begin;
    for (std::size_t i = r.begin; i < r.end; ++i) {
        if (hip.values[i] < hip.values[ext]) ext = i;
    }
    for (std::size_t i = ext; i < r.end; ++i) {
        if (hip_rate.values[i] > cfg.rate_threshold) return hip.t[i];
    }
    throw EventError("no exceedance: hip flexion rate stays below threshold after peak extension");
}

double detect_shf(const Signal& hip, double t0, double t1, const EventConfig& cfg) {
    return detect_shf(hip, gradient(hip), t0, t1, cfg);
}

double detect_skf(const Signal& knee_rate, double t_shf, const EventConfig& cfg) {
    const Range r = window(knee_rate, t_shf - cfg.skf_before, t_shf + cfg.skf_after);
    for (std::size_t i = r.begin; i < r.end; ++i) {
        if (knee_rate.values[i] > cfg.rate_threshold) return knee_rate.t[i];
    }
    throw EventError("no exceedance: knee flexion rate below threshold around SHF at t = " + fmt_time(t_shf));
}

TransitionWindow detect_transition_window(const Signal& com_vy, double t0, double t1) {
    const Range r = window(com_vy, t0, t1);
    if (r.end - r.begin < 3) throw EventError("no minimum/maximum structure: window too short");
    const auto& v = com_vy.values;
    std::size_t imin = r.begin;
    for (std::size_t i = r.begin; i < r.end; ++i) {
        if (v[i] < v[imin]) imin = i;
    }
    std::vector<std::size_t> maxima;
    for (std::size_t i = imin + 1; i + 1 < r.end && maxima.size() < 2; ++i) {
        if (v[i] > v[i - 1] && v[i] >= v[i + 1]) maxima.push_back(i);
    }
    if (maxima.empty()) throw EventError("no minimum/maximum structure: no maximum after the CoM velocity minimum");
    TransitionWindow w;
    w.t_vmin = com_vy.t[imin];
    w.fallback = maxima.size() < 2;
    w.t_vmax = com_vy.t[maxima.back()];
    return w;
}

GaitEvents detect_cycle_events(const LegSignals& leg, const LegSignals& other, const Signal& com_vy, double t_start,
                               double t_end, const EventConfig& cfg) {
    GaitEvents ev;
    ev.t_to = detect_to(leg.ankle, leg.ankle_rate, t_start, t_end, cfg);
    ev.t_sapf = detect_sapf(leg.ankle, t_start, ev.t_to);
    ev.t_lltd = detect_lltd(other.ankle_rate, t_start, ev.t_to, cfg);
    ev.t_shf = detect_shf(leg.hip, leg.hip_rate, t_start, t_end, cfg);
    ev.t_skf = detect_skf(leg.knee_rate, ev.t_shf, cfg);
    const double half = cfg.transition_half_window * (t_end - t_start);
    const TransitionWindow w =
        detect_transition_window(com_vy, std::max(t_start, ev.t_lltd - half), std::min(t_end, ev.t_lltd + half));
    ev.t_vmin = w.t_vmin;
    ev.t_vmax = w.t_vmax;
    ev.vmax_fallback = w.fallback;
    return ev;
}

void write_events_csv(std::ostream& out, const std::vector<CycleEvents>& rows) {
    static const char* names[] = {"SKF", "SHF", "SAPF", "LLTD", "TO", "vmin", "vmax"};
    out << "cycle,leg,t_start,t_end";
    for (const char* n : names) out << ",t_" << n << "_s";
    for (const char* n : names) out << ",t_" << n << "_pct";
    out << ",dt_SAPF_LLTD_pct,vmax_fallback\n";
    for (const auto& r : rows) {
        const auto& e = r.events;
        const double ts[] = {e.t_skf, e.t_shf, e.t_sapf, e.t_lltd, e.t_to, e.t_vmin, e.t_vmax};
        out << r.cycle << ',' << side_suffix(r.leg) << ',' << csv::number(r.t_start) << ',' << csv::number(r.t_end);
        for (double t : ts) out << ',' << csv::number(t);
        for (double t : ts) out << ',' << csv::number(r.percent(t));
        out << ',' << csv::number(r.sapf_lltd_delta()) << ',' << (e.vmax_fallback ? 1 : 0) << '\n';
    }
}

}  // namespace ecowalker
