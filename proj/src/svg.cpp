#include "jumpflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace jumpflow {

namespace {

constexpr int kWidth = 640, kHeight = 440;
constexpr int kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

std::string render_svg_plot(const std::string& title,
                            const std::string& x_label,
                            const std::string& y_label,
                            const std::vector<PlotSeries>& series,
                            bool log_x,
                            bool log_y) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    auto usable = [&](double x, double y) {
        if (log_x && x <= 0.0) return false;
        if (log_y && y <= 0.0) return false;
        return std::isfinite(x) && std::isfinite(y);
    };
    for (const auto& s : series)
        for (auto [x, y] : s.points)
            if (usable(x, y)) {
                const double tx = log_x ? std::log10(x) : x;
                const double ty = log_y ? std::log10(y) : y;
                xmin = std::min(xmin, tx);
                xmax = std::max(xmax, tx);
                ymin = std::min(ymin, ty);
                ymax = std::max(ymax, ty);
            }
    if (!(xmin <= xmax)) {
        xmin = 0.0;
        xmax = 1.0;
    }
    if (!(ymin <= ymax)) {
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double tx) { return kLeft + (tx - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double ty) { return kHeight - kBottom - (ty - ymin) / (ymax - ymin) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
           "\" height=\"" + std::to_string(kHeight) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + std::to_string(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"15\">" + title + "</text>\n";

    // Axes box.
    svg += "<rect x=\"" + std::to_string(kLeft) + "\" y=\"" + std::to_string(kTop) + "\" width=\"" +
           num(pw) + "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";

    // Four ticks per axis.
    for (int i = 0; i <= 4; ++i) {
        const double tx = xmin + (xmax - xmin) * i / 4.0;
        const double ty = ymin + (ymax - ymin) * i / 4.0;
        const double vx = log_x ? std::pow(10.0, tx) : tx;
        const double vy = log_y ? std::pow(10.0, ty) : ty;
        svg += "<line x1=\"" + num(px(tx)) + "\" y1=\"" + std::to_string(kHeight - kBottom) +
               "\" x2=\"" + num(px(tx)) + "\" y2=\"" + std::to_string(kHeight - kBottom + 5) +
               "\" stroke=\"#444\"/>\n";
        svg += "<text x=\"" + num(px(tx)) + "\" y=\"" + std::to_string(kHeight - kBottom + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + num(vx) +
               "</text>\n";
        svg += "<line x1=\"" + std::to_string(kLeft - 5) + "\" y1=\"" + num(py(ty)) + "\" x2=\"" +
               std::to_string(kLeft) + "\" y2=\"" + num(py(ty)) + "\" stroke=\"#444\"/>\n";
        svg += "<text x=\"" + std::to_string(kLeft - 8) + "\" y=\"" + num(py(ty) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(vy) +
               "</text>\n";
    }
    svg += "<text x=\"" + std::to_string(kWidth / 2) + "\" y=\"" + std::to_string(kHeight - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + x_label +
           "</text>\n";
    svg += "<text x=\"16\" y=\"" + std::to_string(kHeight / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 " +
           std::to_string(kHeight / 2) + ")\">" + y_label + "</text>\n";

    int color = 0;
    int legend_y = kTop + 14;
    for (const auto& s : series) {
        const char* c = kColors[color % 6];
        std::string pts;
        for (auto [x, y] : s.points) {
            if (!usable(x, y)) continue;
            const double tx = log_x ? std::log10(x) : x;
            const double ty = log_y ? std::log10(y) : y;
            pts += num(px(tx)) + "," + num(py(ty)) + " ";
        }
        if (!pts.empty()) {
            svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + c +
                   "\" stroke-width=\"1.5\"/>\n";
        }
        svg += "<rect x=\"" + std::to_string(kLeft + 8) + "\" y=\"" + std::to_string(legend_y - 9) +
               "\" width=\"10\" height=\"10\" fill=\"" + c + "\"/>\n";
        svg += "<text x=\"" + std::to_string(kLeft + 22) + "\" y=\"" + std::to_string(legend_y) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + s.name + "</text>\n";
        legend_y += 14;
        ++color;
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace jumpflow
