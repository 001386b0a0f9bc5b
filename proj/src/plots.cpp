#include "ecowalker/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "csv_format.hpp"

namespace ecowalker {

namespace {

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

const char* color(std::size_t i) { return kColors[i % std::size(kColors)]; }

std::string num(double v) {
    std::ostringstream os;
    os.precision(5);
    os << v;
    return os.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad(double frac) {
        if (!(lo <= hi)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
        const double d = (hi - lo) * frac;
        lo -= d;
        hi += d;
    }
};

// Evenly spaced "nice" tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi, int target = 5) {
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> out;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
        out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    }
    return out;
}

// One plotting area inside an SVG document.
class Panel {
public:
    Panel(std::ostream& out, double x, double y, double w, double h, Range xr, Range yr)
        : out_(out), x_(x), y_(y), w_(w), h_(h), xr_(xr), yr_(yr) {}

    double px(double v) const { return x_ + (v - xr_.lo) / (xr_.hi - xr_.lo) * w_; }
    double py(double v) const { return y_ + h_ - (v - yr_.lo) / (yr_.hi - yr_.lo) * h_; }

    void axes(const std::string& xlabel, const std::string& ylabel, const std::string& title) {
        out_ << "<rect x='" << num(x_) << "' y='" << num(y_) << "' width='" << num(w_) << "' height='" << num(h_)
             << "' fill='none' stroke='#444'/>\n";
        for (double t : ticks(xr_.lo, xr_.hi)) {
            out_ << "<line x1='" << num(px(t)) << "' y1='" << num(y_ + h_) << "' x2='" << num(px(t)) << "' y2='"
                 << num(y_ + h_ + 4) << "' stroke='#444'/>\n";
            text(px(t), y_ + h_ + 16, num(t), "middle", 11);
        }
        for (double t : ticks(yr_.lo, yr_.hi)) {
            out_ << "<line x1='" << num(x_ - 4) << "' y1='" << num(py(t)) << "' x2='" << num(x_) << "' y2='"
                 << num(py(t)) << "' stroke='#444'/>\n";
            text(x_ - 6, py(t) + 4, num(t), "end", 11);
        }
        if (yr_.lo < 0.0 && yr_.hi > 0.0) {
            out_ << "<line x1='" << num(x_) << "' y1='" << num(py(0)) << "' x2='" << num(x_ + w_) << "' y2='"
                 << num(py(0)) << "' stroke='#bbb' stroke-dasharray='3,3'/>\n";
        }
        text(x_ + w_ / 2, y_ + h_ + 34, xlabel, "middle", 12);
        out_ << "<text x='" << num(x_ - 48) << "' y='" << num(y_ + h_ / 2) << "' font-size='12' text-anchor='middle'"
             << " transform='rotate(-90 " << num(x_ - 48) << ' ' << num(y_ + h_ / 2) << ")'>" << escape(ylabel)
             << "</text>\n";
        text(x_ + w_ / 2, y_ - 8, title, "middle", 13);
    }

    void text(double x, double y, const std::string& s, const char* anchor, int size,
              const char* fill = "#000") {
        out_ << "<text x='" << num(x) << "' y='" << num(y) << "' font-size='" << size << "' text-anchor='" << anchor
             << "' fill='" << fill << "'>" << escape(s) << "</text>\n";
    }

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const char* stroke,
                  double width = 1.5, const char* extra = "") {
        out_ << "<polyline fill='none' stroke='" << stroke << "' stroke-width='" << num(width) << "' " << extra
             << " points='";
        for (std::size_t i = 0; i < xs.size(); ++i) out_ << num(px(xs[i])) << ',' << num(py(ys[i])) << ' ';
        out_ << "'/>\n";
    }

    // Filled band between lo and hi.
    void band(const std::vector<double>& xs, const std::vector<double>& lo, const std::vector<double>& hi,
              const char* fill) {
        out_ << "<polygon fill='" << fill << "' fill-opacity='0.2' stroke='none' points='";
        for (std::size_t i = 0; i < xs.size(); ++i) out_ << num(px(xs[i])) << ',' << num(py(hi[i])) << ' ';
        for (std::size_t i = xs.size(); i-- > 0;) out_ << num(px(xs[i])) << ',' << num(py(lo[i])) << ' ';
        out_ << "'/>\n";
    }

    void vline(double x, const char* stroke, const char* dash = "4,3") {
        out_ << "<line x1='" << num(px(x)) << "' y1='" << num(y_) << "' x2='" << num(px(x)) << "' y2='"
             << num(y_ + h_) << "' stroke='" << stroke << "' stroke-dasharray='" << dash << "'/>\n";
    }

    void arrow(double x0, double y0, double x1, double y1, const char* stroke) {
        out_ << "<line x1='" << num(px(x0)) << "' y1='" << num(py(y0)) << "' x2='" << num(px(x1)) << "' y2='"
             << num(py(y1)) << "' stroke='" << stroke << "' stroke-width='2' marker-end='url(#arrow)'/>\n";
    }

    void rect_data(double x0, double x1, double y0, double y1, const char* fill) {
        const double top = std::min(py(y0), py(y1));
        out_ << "<rect x='" << num(px(x0)) << "' y='" << num(top) << "' width='" << num(px(x1) - px(x0))
             << "' height='" << num(std::abs(py(y1) - py(y0))) << "' fill='" << fill << "'/>\n";
    }

    void segment(double x0, double y0, double x1, double y1, const char* stroke) {
        out_ << "<line x1='" << num(px(x0)) << "' y1='" << num(py(y0)) << "' x2='" << num(px(x1)) << "' y2='"
             << num(py(y1)) << "' stroke='" << stroke << "'/>\n";
    }

    void dot(double x, double y, const char* fill, double r = 3.5) {
        out_ << "<circle cx='" << num(px(x)) << "' cy='" << num(py(y)) << "' r='" << num(r) << "' fill='" << fill
             << "'/>\n";
    }

private:
    std::ostream& out_;
    double x_, y_, w_, h_;
    Range xr_, yr_;
};

void begin(std::ostream& out, double w, double h) {
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << num(w) << "' height='" << num(h)
        << "' font-family='sans-serif'>\n"
        << "<defs><marker id='arrow' viewBox='0 0 10 10' refX='9' refY='5' markerWidth='6' markerHeight='6'"
        << " orient='auto-start-reverse'><path d='M0,0 L10,5 L0,10 z' fill='context-stroke'/></marker></defs>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n";
}

void end(std::ostream& out) { out << "</svg>\n"; }

void legend(std::ostream& out, const std::vector<PlotSeries>& series, double x, double y) {
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double yy = y + 16.0 * static_cast<double>(i);
        out << "<line x1='" << num(x) << "' y1='" << num(yy) << "' x2='" << num(x + 20) << "' y2='" << num(yy)
            << "' stroke='" << color(i) << "' stroke-width='3'/>\n"
            << "<text x='" << num(x + 26) << "' y='" << num(yy + 4) << "' font-size='12'>" << escape(series[i].label)
            << "</text>\n";
    }
}

struct MeanSd {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double sd = 0.0;
    std::size_t n = 0;
};

MeanSd stats_of(const std::vector<double>& v) {
    MeanSd s;
    s.n = v.size();
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

// Per-cycle values of a right-leg measure.
std::vector<double> right_leg_values(const AnalysisResult& res, const std::string& measure) {
    std::vector<double> out;
    for (const auto& r : res.metric_rows()) {
        if (r.leg == Side::Right && r.measure == measure) out.push_back(r.value);
    }
    return out;
}

std::vector<double> to_degrees(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), rad2deg);
    return out;
}

const std::pair<const char*, const char*> kEvents[] = {
    {"t_SKF", "SKF"}, {"t_SHF", "SHF"}, {"t_SAPF", "SAPF"}, {"t_LLTD", "LLTD"},
    {"t_TO", "TO"},   {"t_vmin", "vmin"}, {"t_vmax", "vmax"},
};

}  // namespace

void plot_joint_angles(std::ostream& out, const std::vector<PlotSeries>& series) {
    const double w = 520, h = 200, left = 80, top = 40, gap = 70;
    begin(out, left + w + 150, top + 3 * (h + gap));
    const std::pair<const char*, CycleSet AnalysisResult::*> joints[] = {
        {"hip", &AnalysisResult::hip_R}, {"knee", &AnalysisResult::knee_R}, {"ankle", &AnalysisResult::ankle_R}};
    for (std::size_t j = 0; j < 3; ++j) {
        Range xr{0.0, 100.0}, yr;
        for (const auto& s : series) {
            const CycleSet& cs = s.result->*joints[j].second;
            for (std::size_t i = 0; i < cs.mean.size(); ++i) {
                yr.add(rad2deg(cs.mean[i] - cs.sd[i]));
                yr.add(rad2deg(cs.mean[i] + cs.sd[i]));
            }
        }
        yr.pad(0.05);
        Panel p(out, left, top + static_cast<double>(j) * (h + gap), w, h, xr, yr);
        p.axes("gait cycle (%)", std::string(joints[j].first) + " angle (deg)",
               std::string("right ") + joints[j].first);
        for (std::size_t k = 0; k < series.size(); ++k) {
            const CycleSet& cs = series[k].result->*joints[j].second;
            if (cs.mean.empty()) continue;
            std::vector<double> lo(cs.mean.size()), hi(cs.mean.size());
            for (std::size_t i = 0; i < cs.mean.size(); ++i) {
                lo[i] = rad2deg(cs.mean[i] - cs.sd[i]);
                hi[i] = rad2deg(cs.mean[i] + cs.sd[i]);
            }
            p.band(cs.grid, lo, hi, color(k));
            p.polyline(cs.grid, to_degrees(cs.mean), color(k));
            p.vline(stats_of(right_leg_values(*series[k].result, j == 1 ? "t_SKF" : j == 2 ? "t_SAPF" : "t_SHF")).mean,
                    color(k));
        }
    }
    legend(out, series, left + w + 20, top + 10);
    end(out);
}

void plot_event_timeline(std::ostream& out, const std::vector<PlotSeries>& series) {
    const double w = 560, row = 26, left = 70, top = 40;
    const double h = row * static_cast<double>(std::size(kEvents));
    begin(out, left + w + 150, top + h + 60);
    Range xr{0.0, 100.0};
    Range yr{0.0, static_cast<double>(std::size(kEvents))};
    Panel p(out, left, top, w, h, xr, yr);
    p.axes("gait cycle (%)", "", "event timing, right leg (mean ± SD)");
    for (std::size_t e = 0; e < std::size(kEvents); ++e) {
        const double y = static_cast<double>(std::size(kEvents) - e) - 0.5;
        p.text(left - 8, p.py(y) + 4, kEvents[e].second, "end", 12);
        for (std::size_t k = 0; k < series.size(); ++k) {
            const MeanSd s = stats_of(right_leg_values(*series[k].result, kEvents[e].first));
            if (s.n == 0) continue;
            const double yy = y + 0.18 * (static_cast<double>(k) - 0.5 * static_cast<double>(series.size() - 1));
            p.segment(s.mean - s.sd, yy, s.mean + s.sd, yy, color(k));
            p.dot(s.mean, yy, color(k));
        }
    }
    legend(out, series, left + w + 20, top + 10);
    end(out);
}

void plot_momentum_bars(std::ostream& out, const std::vector<PlotSeries>& series) {
    const char* const measures[] = {"dabs_p_TL", "dp_TL_x",  "dp_TL_y",   "dabs_p_RB", "dp_RB_x",
                                    "dp_RB_y",   "dabs_p_CoM", "dp_CoM_x", "dp_CoM_y"};
    const char* const labels[] = {"Δ|p| TL", "Δpx TL", "Δpy TL", "Δ|p| RB", "Δpx RB",
                                  "Δpy RB",  "Δ|p| CoM", "Δpx CoM", "Δpy CoM"};
    constexpr std::size_t n = std::size(measures);
    std::vector<std::vector<MeanSd>> st(series.size(), std::vector<MeanSd>(n));
    Range yr;
    yr.add(0.0);
    for (std::size_t k = 0; k < series.size(); ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            st[k][m] = stats_of(right_leg_values(*series[k].result, measures[m]));
            yr.add(st[k][m].mean - st[k][m].sd);
            yr.add(st[k][m].mean + st[k][m].sd);
        }
    }
    yr.pad(0.08);
    const double w = 640, h = 300, left = 80, top = 40;
    begin(out, left + w + 150, top + h + 70);
    Panel p(out, left, top, w, h, Range{0.0, static_cast<double>(n)}, yr);
    p.axes("", "momentum change (kg m/s)", "step-to-step transition, right leg trailing");
    const double slot = 0.8 / static_cast<double>(std::max<std::size_t>(series.size(), 1));
    for (std::size_t m = 0; m < n; ++m) {
        p.text(p.px(static_cast<double>(m) + 0.5), top + h + 16, labels[m], "middle", 11);
        for (std::size_t k = 0; k < series.size(); ++k) {
            const MeanSd& s = st[k][m];
            if (s.n == 0) continue;
            const double x0 = static_cast<double>(m) + 0.1 + slot * static_cast<double>(k);
            p.rect_data(x0, x0 + slot * 0.9, 0.0, s.mean, color(k));
            const double xc = x0 + slot * 0.45;
            p.segment(xc, s.mean - s.sd, xc, s.mean + s.sd, "#000");
        }
    }
    legend(out, series, left + w + 20, top + 10);
    end(out);
}

void plot_hodograph(std::ostream& out, const std::vector<PlotSeries>& series) {
    Range xr, yr;
    for (const auto& s : series) {
        for (double v : s.result->com_vx_R.mean) xr.add(v);
        for (double v : s.result->com_vy_R.mean) yr.add(v);
    }
    xr.add(0.0);
    xr.pad(0.08);
    yr.pad(0.08);
    const double w = 460, h = 360, left = 80, top = 40;
    begin(out, left + w + 150, top + h + 60);
    Panel p(out, left, top, w, h, xr, yr);
    p.axes("CoM vx (m/s)", "CoM vy (m/s)", "CoM hodograph, right-leg cycle");
    for (std::size_t k = 0; k < series.size(); ++k) {
        const AnalysisResult& r = *series[k].result;
        if (r.com_vx_R.mean.empty()) continue;
        p.polyline(r.com_vx_R.mean, r.com_vy_R.mean, color(k));
        for (const char* at : {"vmin", "vmax"}) {
            const double vx = stats_of(right_leg_values(r, std::string("v_CoM_x_at_") + at)).mean;
            const double vy = stats_of(right_leg_values(r, std::string("v_CoM_y_at_") + at)).mean;
            if (std::isfinite(vx) && std::isfinite(vy)) {
                p.arrow(0.0, 0.0, vx, vy, color(k));
                p.text(p.px(vx) + 4, p.py(vy) - 4, at, "start", 11, color(k));
            }
        }
    }
    legend(out, series, left + w + 20, top + 10);
    end(out);
}

void write_plots(const std::filesystem::path& dir, const std::vector<PlotSeries>& series) {
    std::filesystem::create_directories(dir);
    const std::pair<const char*, void (*)(std::ostream&, const std::vector<PlotSeries>&)> figs[] = {
        {"joint_angles.svg", plot_joint_angles},
        {"events.svg", plot_event_timeline},
        {"momentum.svg", plot_momentum_bars},
        {"hodograph.svg", plot_hodograph},
    };
    for (const auto& [name, fn] : figs) {
        std::ofstream f(dir / name);
        if (!f) throw Error("cannot write " + (dir / name).string());
        fn(f, series);
    }
}

}  // namespace ecowalker
