#pragma once

// Minimal deterministic SVG line plots: containers <svg>/<text> carry
// explicit end tags, every shape element is self-closed. Points with
// non-finite coordinates are skipped.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace cbs {

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

namespace svgdetail {

inline std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline const char* color(std::size_t i)
{
    static const char* palette[] = {"#1f6fb4", "#d1495b", "#3a8c5c",
                                    "#8a5ab6", "#c98a1f", "#4d4d4d"};
    return palette[i % 6];
}

} // namespace svgdetail

inline std::string emit_svg(const std::vector<PlotSeries>& series, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel)
{
    using svgdetail::num;
    const double W = 720, H = 480, ml = 80, mr = 30, mt = 48, mb = 60;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
    }
    if (ymin > ymax) {
        ymin = 0;
        ymax = 1;
    }
    if (xmax == xmin)
        xmax = xmin + 1;
    if (ymax == ymin)
        ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
    const auto py = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) +
                      "\" height=\"" + num(H) + "\" viewBox=\"0 0 " + num(W) + " " + num(H) +
                      "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + num(W) + "\" height=\"" + num(H) +
           "\" fill=\"white\"/>\n";
    // axes
    svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(H - mb) + "\" x2=\"" + num(W - mr) +
           "\" y2=\"" + num(H - mb) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) +
           "\" y2=\"" + num(H - mb) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    // ticks
    for (int t = 0; t <= 5; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 5.0;
        const double yv = ymin + (ymax - ymin) * t / 5.0;
        svg += "<line x1=\"" + num(px(xv)) + "\" y1=\"" + num(H - mb) + "\" x2=\"" +
               num(px(xv)) + "\" y2=\"" + num(H - mb + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(H - mb + 20) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + num(xv) + "</text>\n";
        svg += "<line x1=\"" + num(ml - 5) + "\" y1=\"" + num(py(yv)) + "\" x2=\"" +
               num(ml) + "\" y2=\"" + num(py(yv)) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(py(yv) + 4) +
               "\" font-size=\"12\" text-anchor=\"end\">" + num(yv) + "</text>\n";
    }
    // labels and title
    svg += "<text x=\"" + num((ml + W - mr) / 2) + "\" y=\"" + num(H - 16) +
           "\" font-size=\"14\" text-anchor=\"middle\">" + xlabel + "</text>\n";
    svg += "<text x=\"18\" y=\"" + num((mt + H - mb) / 2) +
           "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num((mt + H - mb) / 2) + ")\">" + ylabel + "</text>\n";
    svg += "<text x=\"" + num(W / 2) + "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">" +
           title + "</text>\n";
    // series
    for (std::size_t k = 0; k < series.size(); ++k) {
        std::string pts;
        for (std::size_t i = 0; i < series[k].x.size(); ++i) {
            if (!std::isfinite(series[k].x[i]) || !std::isfinite(series[k].y[i]))
                continue;
            pts += num(px(series[k].x[i])) + "," + num(py(series[k].y[i])) + " ";
        }
        if (!pts.empty())
            svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
                   std::string(svgdetail::color(k)) + "\" stroke-width=\"1.5\"/>\n";
        svg += "<text x=\"" + num(W - mr - 8) + "\" y=\"" + num(mt + 16 + 16 * double(k)) +
               "\" font-size=\"12\" text-anchor=\"end\" fill=\"" +
               std::string(svgdetail::color(k)) + "\">" + series[k].label + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace cbs
