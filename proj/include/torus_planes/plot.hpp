#pragma once

// SVG rendering of circles, parallel classes and orbits on the unit-square
// angle chart of the torus.

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "groups.hpp"
#include "homeo.hpp"
#include "planes.hpp"

namespace torus_planes {

struct PlotCircle {
    CircleHomeo graph;
    std::string color = "#1f77b4";
    int samples = 1024;
};

struct PlotClass {
    ParallelClass cls;
    std::string color = "#7f7f7f";
};

struct PlotPoints {
    std::vector<TorusPoint> points;
    std::string color = "#d62728";
};

using PlotObject = std::variant<PlotCircle, PlotClass, PlotPoints>;

using ChartPolyline = std::vector<std::pair<double, double>>;

/// Graph of a circle homeomorphism in the chart [0,1)^2, split wherever
/// consecutive samples jump across a chart seam.
inline std::vector<ChartPolyline> chart_polylines(const CircleHomeo& graph, int samples) {
    samples = std::max(samples, 512);
    std::vector<ChartPolyline> out(1);
    double prev_y = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double s = static_cast<double>(i) / samples;
        double y = graph(ProjPoint::from_chart(s)).chart();
        if (i > 0) {
            const double jump = y - prev_y;
            if (std::abs(jump) > 0.5) {
                // close the current piece on the seam and reopen on the other side
                const double y_end = jump < 0 ? y + 1.0 : y - 1.0;
                const double s_prev = out.back().back().first;
                const double edge = jump < 0 ? 1.0 : 0.0;
                const double w = (edge - prev_y) / (y_end - prev_y);
                const double s_cut = s_prev + w * (s - s_prev);
                out.back().emplace_back(s_cut, edge);
                out.emplace_back();
                out.back().emplace_back(s_cut, 1.0 - edge);
            }
        }
        out.back().emplace_back(s, y);
        prev_y = y;
    }
    return out;
}

inline std::vector<TorusPoint> orbit(const GroupElement& g, const TorusPoint& start, int iterations) {
    std::vector<TorusPoint> pts{start};
    for (int i = 0; i < iterations; ++i) pts.push_back(act(g, pts.back()));
    return pts;
}

namespace detail {

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace detail

inline std::string render_svg(const std::vector<PlotObject>& objects, int size = 512) {
    const double margin = 16.0;
    const double span = size;
    auto px = [&](double s) { return detail::fmt(margin + s * span); };
    auto py = [&](double t) { return detail::fmt(margin + (1.0 - t) * span); };
    std::string out;
    const std::string total = detail::fmt(span + 2 * margin);
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + total + "\" height=\"" + total + "\" viewBox=\"0 0 " +
           total + " " + total + "\">\n";
    out += "<rect x=\"" + px(0) + "\" y=\"" + py(1) + "\" width=\"" + detail::fmt(span) + "\" height=\"" +
           detail::fmt(span) + "\" fill=\"white\" stroke=\"black\"/>\n";
    for (const auto& obj : objects) {
        if (const auto* c = std::get_if<PlotCircle>(&obj)) {
            for (const auto& line : chart_polylines(c->graph, c->samples)) {
                if (line.size() < 2) continue;
                out += "<polyline fill=\"none\" stroke=\"" + c->color + "\" stroke-width=\"1.5\" points=\"";
                for (std::size_t i = 0; i < line.size(); ++i) {
                    if (i) out += ' ';
                    out += px(line[i].first) + "," + py(line[i].second);
                }
                out += "\"/>\n";
            }
        } else if (const auto* k = std::get_if<PlotClass>(&obj)) {
            const double v = k->cls.coordinate.chart();
            if (k->cls.kind == ParallelKind::Plus)
                out += "<line x1=\"" + px(v) + "\" y1=\"" + py(0) + "\" x2=\"" + px(v) + "\" y2=\"" + py(1) +
                       "\" stroke=\"" + k->color + "\" stroke-width=\"1.5\"/>\n";
            else
                out += "<line x1=\"" + px(0) + "\" y1=\"" + py(v) + "\" x2=\"" + px(1) + "\" y2=\"" + py(v) +
                       "\" stroke=\"" + k->color + "\" stroke-width=\"1.5\"/>\n";
        } else if (const auto* p = std::get_if<PlotPoints>(&obj)) {
            for (const auto& pt : p->points)
                out += "<circle cx=\"" + px(pt.x.chart()) + "\" cy=\"" + py(pt.y.chart()) + "\" r=\"2.5\" fill=\"" +
                       p->color + "\"/>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace torus_planes
