#include "reachunder/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace reachunder {

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    // avoid "-0.000"
    if (std::string(buf) == "-0.000") {
        return "0.000";
    }
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

/// Tick spacing of 1, 2 or 5 times a power of ten, about `target` ticks.
double nice_step(double span, int target)
{
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

}  // namespace

const std::string& series_color(std::size_t k)
{
    static const std::vector<std::string> palette = {"#d62728", "#2ca02c", "#1f77b4", "#000000",
                                                     "#ff7f0e", "#9467bd", "#8c564b", "#e377c2"};
    return palette[k % palette.size()];
}

std::string render_svg(std::span<const PlotSeries> series, const PlotOptions& opts)
{
    std::size_t total = 0;
    for (const auto& s : series) {
        total += s.sets.size();
    }
    if (total == 0) {
        throw std::invalid_argument("render_svg: nothing to plot (empty set list)");
    }

    std::vector<std::vector<std::vector<Vector>>> outlines;
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -xmin;
    double ymin = xmin;
    double ymax = -xmin;
    for (const auto& s : series) {
        auto& group = outlines.emplace_back();
        for (const Zonotope& z : s.sets) {
            if (z.dim() != 2) {
                throw std::invalid_argument(
                    "render_svg: only 2-D sets can be plotted; coordinate projection is not "
                    "supported");
            }
            std::vector<Vector> poly;
            for (Vector& p : outline_2d(z, opts.directions)) {
                if (poly.empty() || !p.isApprox(poly.back(), 0.0)) {
                    poly.push_back(std::move(p));
                }
            }
            for (const Vector& p : poly) {
                xmin = std::min(xmin, p[0]);
                xmax = std::max(xmax, p[0]);
                ymin = std::min(ymin, p[1]);
                ymax = std::max(ymax, p[1]);
            }
            group.push_back(std::move(poly));
        }
    }
    auto pad = [](double& lo, double& hi) {
        double span = hi - lo;
        if (span <= 0.0) {
            span = std::max(1.0, std::abs(lo));
            lo -= 0.5 * span;
            hi += 0.5 * span;
            return;
        }
        lo -= 0.05 * span;
        hi += 0.05 * span;
    };
    pad(xmin, xmax);
    pad(ymin, ymax);

    const double left = 70.0;
    const double right = 20.0 + 130.0;  // legend column
    const double top = opts.title.empty() ? 20.0 : 40.0;
    const double bottom = 50.0;
    const double pw = opts.width - left - right;
    const double ph = opts.height - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\""
        << opts.height << "\" viewBox=\"0 0 " << opts.width << ' ' << opts.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!opts.title.empty()) {
        out << "<text x=\"" << fmt(left + 0.5 * pw) << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"15\">" << escape(opts.title) << "</text>\n";
    }

    // axes and ticks
    out << "<g stroke=\"#444444\" stroke-width=\"1\" fill=\"none\">\n";
    out << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw)
        << "\" height=\"" << fmt(ph) << "\"/>\n</g>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#222222\">\n";
    const double xs = nice_step(xmax - xmin, 6);
    for (double x = std::ceil(xmin / xs) * xs; x <= xmax; x += xs) {
        out << "<line x1=\"" << fmt(sx(x)) << "\" y1=\"" << fmt(top + ph) << "\" x2=\""
            << fmt(sx(x)) << "\" y2=\"" << fmt(top + ph + 5) << "\" stroke=\"#444444\"/>";
        out << "<text x=\"" << fmt(sx(x)) << "\" y=\"" << fmt(top + ph + 18)
            << "\" text-anchor=\"middle\">" << fmt(std::abs(x) < 1e-12 * xs ? 0.0 : x)
            << "</text>\n";
    }
    const double ys = nice_step(ymax - ymin, 6);
    for (double y = std::ceil(ymin / ys) * ys; y <= ymax; y += ys) {
        out << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(sy(y)) << "\" x2=\""
            << fmt(left) << "\" y2=\"" << fmt(sy(y)) << "\" stroke=\"#444444\"/>";
        out << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(sy(y) + 4)
            << "\" text-anchor=\"end\">" << fmt(std::abs(y) < 1e-12 * ys ? 0.0 : y)
            << "</text>\n";
    }
    out << "<text x=\"" << fmt(left + 0.5 * pw) << "\" y=\"" << fmt(opts.height - 10.0)
        << "\" text-anchor=\"middle\">" << escape(opts.x_label) << "</text>\n";
    out << "<text x=\"16\" y=\"" << fmt(top + 0.5 * ph) << "\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 16 " << fmt(top + 0.5 * ph) << ")\">" << escape(opts.y_label)
        << "</text>\n</g>\n";

    // polygons
    char opacity[16];
    std::snprintf(opacity, sizeof opacity, "%.2f", opts.fill_opacity);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const std::string& color = series[k].color.empty() ? series_color(k) : series[k].color;
        out << "<g stroke=\"" << color << "\" fill=\"" << color << "\" fill-opacity=\""
            << opacity << "\" stroke-width=\"1.2\">\n";
        for (const auto& poly : outlines[k]) {
            if (poly.size() == 1) {
                out << "<circle cx=\"" << fmt(sx(poly[0][0])) << "\" cy=\"" << fmt(sy(poly[0][1]))
                    << "\" r=\"2\"/>\n";
                continue;
            }
            out << "<polygon points=\"";
            for (std::size_t p = 0; p < poly.size(); ++p) {
                out << (p ? " " : "") << fmt(sx(poly[p][0])) << ',' << fmt(sy(poly[p][1]));
            }
            out << "\"/>\n";
        }
        out << "</g>\n";
    }

    // legend
    out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const std::string& color = series[k].color.empty() ? series_color(k) : series[k].color;
        const double y = top + 10.0 + 20.0 * static_cast<double>(k);
        const double x = left + pw + 15.0;
        out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"14\" height=\"10\" "
            << "fill=\"" << color << "\" stroke=\"" << color << "\"/>";
        out << "<text x=\"" << fmt(x + 20.0) << "\" y=\"" << fmt(y + 9.0) << "\">"
            << escape(series[k].label) << "</text>\n";
    }
    out << "</g>\n</svg>\n";
    return out.str();
}

}  // namespace reachunder
