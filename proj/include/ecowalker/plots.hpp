#pragma once

// Standalone SVG figures of analysis results. Each function takes one or more
// labelled results so runs can be overlaid (e.g. AKFI and PKFI).

#include "ecowalker/analysis.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ecowalker {

struct PlotSeries {
    std::string label;
    const AnalysisResult* result = nullptr;
};

// Hip, knee and ankle angle of the right leg over the gait cycle, mean ± SD.
void plot_joint_angles(std::ostream& out, const std::vector<PlotSeries>& series);
// Mean ± SD timing of SKF, SHF, SAPF, LLTD, TO, vmin and vmax in %GC.
void plot_event_timeline(std::ostream& out, const std::vector<PlotSeries>& series);
// Mean momentum changes over the step-to-step transition, per group and component.
void plot_momentum_bars(std::ostream& out, const std::vector<PlotSeries>& series);
// Cycle-averaged CoM hodograph with the velocity vectors at vmin and vmax.
void plot_hodograph(std::ostream& out, const std::vector<PlotSeries>& series);

// Writes joint_angles.svg, events.svg, momentum.svg and hodograph.svg.
void write_plots(const std::filesystem::path& dir, const std::vector<PlotSeries>& series);

}  // namespace ecowalker
