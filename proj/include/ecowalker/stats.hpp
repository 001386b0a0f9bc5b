#pragma once

// Paired Wilcoxon signed-rank test and the AKFI/PKFI comparison report.

#include "ecowalker/analysis.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ecowalker {

class StatsError : public Error {
public:
    using Error::Error;
};

struct WilcoxonResult {
    int n = 0;            // pairs left after dropping zero differences
    double w_plus = 0.0;  // sum of ranks of positive differences (b - a)
    double p = 1.0;       // two-sided
    bool exact = true;
};

constexpr int kWilcoxonExactLimit = 25;
constexpr int kWilcoxonMinPairs = 5;

// Zero differences are dropped and tied magnitudes get average ranks. Exact
// null distribution (over the observed ranks) up to `exact_limit` pairs, else
// the normal approximation with tie and continuity corrections.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b,
                                    int exact_limit = kWilcoxonExactLimit);

// Building blocks, exposed for testing. `ranks` are the average ranks of the
// non-zero |differences| and `w_plus` the sum over positive differences.
double wilcoxon_exact_p(const std::vector<double>& ranks, double w_plus);
double wilcoxon_normal_p(const std::vector<double>& ranks, double w_plus);
std::vector<double> average_ranks(const std::vector<double>& values);

// (mean_b - mean_a) / mean_a * 100
double percent_difference(double mean_a, double mean_b);

struct PairedSample {
    std::string measure;
    std::vector<double> a;
    std::vector<double> b;
};

struct MeasureInfo {
    std::string id;     // metrics CSV measure name
    std::string label;  // table label
};

// The twelve compared measures, in table order.
const std::vector<MeasureInfo>& table_measures();

// Pairs per-cycle values of `leg` by cycle index, keeping cycles present in both.
std::vector<PairedSample> pair_metrics(const std::vector<MetricRow>& a, const std::vector<MetricRow>& b, Side leg,
                                       const std::vector<std::string>& measures);

struct ReportRow {
    std::string measure;
    std::string label;
    int n = 0;
    std::optional<double> p;  // unset when the test could not run
    std::string note;         // reason when p is unset
    double mean_a = 0.0, sd_a = 0.0;
    double mean_b = 0.0, sd_b = 0.0;
    double diff_percent = 0.0;
};

struct ComparisonReport {
    std::string label_a = "AKFI";
    std::string label_b = "PKFI";
    std::vector<ReportRow> rows;
};

// Throws StatsError when a measure has no pairs.
ComparisonReport build_report(const std::vector<PairedSample>& samples, const std::string& label_a = "AKFI",
                              const std::string& label_b = "PKFI");

void write_report_csv(std::ostream& out, const ComparisonReport& report);
void write_report_text(std::ostream& out, const ComparisonReport& report);

}  // namespace ecowalker
