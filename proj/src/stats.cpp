#include "ecowalker/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "csv_format.hpp"

namespace ecowalker {

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double wilcoxon_exact_p(const std::vector<double>& ranks, double w_plus) {
    // Average ranks are multiples of 1/2, so doubled ranks are integers.
    std::vector<long> r2;
    long total = 0;
    for (double r : ranks) {
        r2.push_back(std::lround(2.0 * r));
        total += r2.back();
    }
    std::vector<double> counts(static_cast<std::size_t>(total) + 1, 0.0);
    counts[0] = 1.0;
    long reach = 0;
    for (long r : r2) {
        for (long s = reach; s >= 0; --s) counts[static_cast<std::size_t>(s + r)] += counts[static_cast<std::size_t>(s)];
        reach += r;
    }
    const long w2 = std::lround(2.0 * w_plus);
    double lower = 0.0, upper = 0.0;
    for (long s = 0; s <= total; ++s) {
        if (s <= w2) lower += counts[static_cast<std::size_t>(s)];
        if (s >= w2) upper += counts[static_cast<std::size_t>(s)];
    }
    const double all = std::ldexp(1.0, static_cast<int>(ranks.size()));
    return std::min(1.0, 2.0 * std::min(lower, upper) / all);
}

double wilcoxon_normal_p(const std::vector<double>& ranks, double w_plus) {
    const double n = static_cast<double>(ranks.size());
    const double mean = n * (n + 1.0) / 4.0;
    double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
    std::map<double, int> ties;
    for (double r : ranks) ++ties[r];
    for (const auto& [r, t] : ties) var -= (static_cast<double>(t) * t * t - t) / 48.0;
    if (!(var > 0.0)) throw StatsError("degenerate sample: zero variance");
    const double z = std::max(0.0, std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b, int exact_limit) {
    if (a.size() != b.size()) throw StatsError("paired samples differ in length");
    std::vector<double> mags;
    std::vector<bool> positive;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = b[i] - a[i];
        if (!std::isfinite(d)) throw StatsError("non-finite difference");
        if (d == 0.0) continue;
        mags.push_back(std::abs(d));
        positive.push_back(d > 0.0);
    }
    if (mags.empty()) throw StatsError("degenerate sample: all differences are zero");
    if (static_cast<int>(mags.size()) < kWilcoxonMinPairs) {
        throw StatsError("too few non-zero differences: " + std::to_string(mags.size()) + " < " +
                         std::to_string(kWilcoxonMinPairs));
    }
    const auto ranks = average_ranks(mags);
    WilcoxonResult res;
    res.n = static_cast<int>(mags.size());
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (positive[i]) res.w_plus += ranks[i];
    }
    res.exact = res.n <= exact_limit;
    res.p = res.exact ? wilcoxon_exact_p(ranks, res.w_plus) : wilcoxon_normal_p(ranks, res.w_plus);
    return res;
}

double percent_difference(double mean_a, double mean_b) { return (mean_b - mean_a) / mean_a * 100.0; }

const std::vector<MeasureInfo>& table_measures() {
    static const std::vector<MeasureInfo> m = {
        {"t_SKF", "t_SKF (%GC)"},
        {"t_SAPF", "t_SAPF (%GC)"},
        {"dt_SAPF_LLTD", "dt_SAPF-LLTD (%GC)"},
        {"dabs_p_TL", "d|p_TL| (kg m/s)"},
        {"dp_TL_x", "dp_TL,x (kg m/s)"},
        {"dp_TL_y", "dp_TL,y (kg m/s)"},
        {"dabs_p_RB", "d|p_RB| (kg m/s)"},
        {"dp_RB_x", "dp_RB,x (kg m/s)"},
        {"dp_RB_y", "dp_RB,y (kg m/s)"},
        {"dabs_p_CoM", "d|p_CoM| (kg m/s)"},
        {"dp_CoM_x", "dp_CoM,x (kg m/s)"},
        {"dp_CoM_y", "dp_CoM,y (kg m/s)"},
    };
    return m;
}

std::vector<PairedSample> pair_metrics(const std::vector<MetricRow>& a, const std::vector<MetricRow>& b, Side leg,
                                       const std::vector<std::string>& measures) {
    auto index = [leg](const std::vector<MetricRow>& rows) {
        std::map<std::string, std::map<int, double>> m;
        for (const auto& r : rows) {
            if (r.leg == leg) m[r.measure][r.cycle] = r.value;
        }
        return m;
    };
    const auto ia = index(a);
    const auto ib = index(b);
    std::vector<PairedSample> out;
    for (const auto& name : measures) {
        const auto fa = ia.find(name);
        const auto fb = ib.find(name);
        if (fa == ia.end() || fb == ib.end()) throw StatsError("missing measure: " + name);
        PairedSample s;
        s.measure = name;
        for (const auto& [cycle, va] : fa->second) {
            const auto it = fb->second.find(cycle);
            if (it == fb->second.end()) continue;
            s.a.push_back(va);
            s.b.push_back(it->second);
        }
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

std::pair<double, double> mean_sd(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    if (x.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

std::string label_of(const std::string& id) {
    for (const auto& m : table_measures()) {
        if (m.id == id) return m.label;
    }
    return id;
}

}  // namespace

ComparisonReport build_report(const std::vector<PairedSample>& samples, const std::string& label_a,
                              const std::string& label_b) {
    ComparisonReport rep;
    rep.label_a = label_a;
    rep.label_b = label_b;
    for (const auto& s : samples) {
        if (s.a.empty() || s.a.size() != s.b.size()) throw StatsError("missing measure: " + s.measure);
        ReportRow row;
        row.measure = s.measure;
        row.label = label_of(s.measure);
        row.n = static_cast<int>(s.a.size());
        std::tie(row.mean_a, row.sd_a) = mean_sd(s.a);
        std::tie(row.mean_b, row.sd_b) = mean_sd(s.b);
        row.diff_percent = percent_difference(row.mean_a, row.mean_b);
        try {
            row.p = wilcoxon_signed_rank(s.a, s.b).p;
        } catch (const StatsError& e) {
            row.note = e.what();
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

void write_report_csv(std::ostream& out, const ComparisonReport& rep) {
    out << "measure,n,p_value," << "mean_" << rep.label_a << ",sd_" << rep.label_a << ",mean_" << rep.label_b
        << ",sd_" << rep.label_b << ",diff_percent,note\n";
    for (const auto& r : rep.rows) {
        out << r.measure << ',' << r.n << ',' << (r.p ? csv::number(*r.p) : std::string()) << ','
            << csv::number(r.mean_a) << ',' << csv::number(r.sd_a) << ',' << csv::number(r.mean_b) << ','
            << csv::number(r.sd_b) << ',' << csv::number(r.diff_percent) << ',' << r.note << '\n';
    }
}

void write_report_text(std::ostream& out, const ComparisonReport& rep) {
    auto fixed = [](double v, int prec) {
        std::ostringstream os;
        os << std::fixed << std::setprecision(prec) << v;
        return os.str();
    };
    auto sci = [](double v) {
        std::ostringstream os;
        os << std::scientific << std::setprecision(2) << v;
        return os.str();
    };
    out << std::left << std::setw(22) << "measure" << std::right << std::setw(10) << "p value" << std::setw(11)
        << rep.label_a << std::setw(9) << "SD" << std::setw(11) << rep.label_b << std::setw(9) << "SD"
        << std::setw(11) << "diff %" << '\n';
    out << std::string(83, '-') << '\n';
    for (const auto& r : rep.rows) {
        out << std::left << std::setw(22) << r.label << std::right << std::setw(10) << (r.p ? sci(*r.p) : "n/a")
            << std::setw(11) << fixed(r.mean_a, 4) << std::setw(9) << fixed(r.sd_a, 4) << std::setw(11)
            << fixed(r.mean_b, 4) << std::setw(9) << fixed(r.sd_b, 4) << std::setw(11) << fixed(r.diff_percent, 2)
            << '\n';
    }
    for (const auto& r : rep.rows) {
        if (!r.p) out << r.measure << ": " << r.note << '\n';
    }
    out << "N = " << (rep.rows.empty() ? 0 : rep.rows.front().n) << " paired cycles\n";
}

}  // namespace ecowalker
