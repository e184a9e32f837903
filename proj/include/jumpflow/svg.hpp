#pragma once

#include <string>
#include <utility>
#include <vector>

namespace jumpflow {

struct PlotSeries {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

/// Minimal SVG plot: axes, tick labels, one polyline per series, legend.
/// log_x / log_y switch the corresponding axis to log10; nonpositive values
/// are dropped from log axes.
std::string render_svg_plot(const std::string& title,
                            const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<PlotSeries>& series,
                            bool log_x = true,
                            bool log_y = true);

} // namespace jumpflow
