#ifndef REACHUNDER_SVG_HPP
#define REACHUNDER_SVG_HPP

#include <span>
#include <string>
#include <vector>

#include "reachunder/zonotope.hpp"

namespace reachunder {

/// One legend entry: a group of 2-D sets drawn in the same colour.
struct PlotSeries {
    std::string label;
    std::string color;
    std::vector<Zonotope> sets;
};

struct PlotOptions {
    int width = 640;
    int height = 480;
    int directions = 360;
    std::string title;
    std::string x_label = "x1";
    std::string y_label = "x2";
    double fill_opacity = 0.25;
};

/// red, green, blue, black, then a fixed extension.
const std::string& series_color(std::size_t k);

/// Renders an overlay of outline_2d polygons with axes and a legend.
/// Output depends only on the inputs (fixed number formatting, no clocks).
std::string render_svg(std::span<const PlotSeries> series, const PlotOptions& opts);

}  // namespace reachunder

#endif
