#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "riskdyn/errors.hpp"
#include "riskdyn/io_formats.hpp"

namespace riskdyn {

namespace {

constexpr double width = 900.0;
constexpr double panel_height = 260.0;
constexpr double margin_left = 70.0;
constexpr double margin_right = 150.0;
constexpr double margin_top = 30.0;
constexpr double panel_gap = 60.0;
constexpr std::size_t max_points = 2000;

constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo;
    double hi;
};

Range padded(double lo, double hi) {
    if (hi - lo < 1e-12) {
        const double pad = std::max(std::abs(hi) * 0.05, 0.5);
        return {lo - pad, hi + pad};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

struct Panel {
    double top;
    Range x;
    Range y;

    double px(double t) const { return margin_left + (t - x.lo) / (x.hi - x.lo) * (width - margin_left - margin_right); }
    double py(double v) const { return top + panel_height - (v - y.lo) / (y.hi - y.lo) * panel_height; }
};

void draw_axes(std::ostream& out, const Panel& p, const std::string& y_label, bool x_label) {
    const double x0 = margin_left;
    const double x1 = width - margin_right;
    out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(p.top) << "\" width=\"" << fmt(x1 - x0)
        << "\" height=\"" << fmt(panel_height) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = p.y.lo + (p.y.hi - p.y.lo) * i / 4.0;
        const double y = p.py(v);
        out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x1) << "\" y2=\"" << fmt(y)
            << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(y + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
    }
    for (int i = 0; i <= 6; ++i) {
        const double t = p.x.lo + (p.x.hi - p.x.lo) * i / 6.0;
        const double x = p.px(t);
        out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(p.top + panel_height + 15)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_label(t) << "</text>\n";
    }
    out << "<text x=\"18\" y=\"" << fmt(p.top + panel_height / 2) << "\" font-size=\"13\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 18 " << fmt(p.top + panel_height / 2) << ")\">" << escape(y_label) << "</text>\n";
    if (x_label) {
        out << "<text x=\"" << fmt((x0 + x1) / 2) << "\" y=\"" << fmt(p.top + panel_height + 35)
            << "\" font-size=\"13\" text-anchor=\"middle\">time t [s]</text>\n";
    }
}

void draw_series(std::ostream& out, const Panel& p, const Trajectory& traj, const char* colour) {
    const std::size_t n = traj.size();
    const std::size_t stride = std::max<std::size_t>(1, (n + max_points - 1) / max_points);
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < n; k += stride) {
        out << fmt(p.px(traj.time(k))) << ',' << fmt(p.py(traj[k])) << ' ';
    }
    if ((n - 1) % stride != 0) {
        out << fmt(p.px(traj.time(n - 1))) << ',' << fmt(p.py(traj[n - 1]));
    }
    out << "\"/>\n";
}

void draw_window(std::ostream& out, const Panel& p, const PlotWindow& w) {
    const double a = std::clamp(w.start, p.x.lo, p.x.hi);
    const double b = std::clamp(w.end, p.x.lo, p.x.hi);
    if (b <= a) {
        return;
    }
    out << "<rect x=\"" << fmt(p.px(a)) << "\" y=\"" << fmt(p.top) << "\" width=\"" << fmt(p.px(b) - p.px(a))
        << "\" height=\"" << fmt(panel_height) << "\" fill=\"#f2c94c\" fill-opacity=\"0.25\"/>\n";
}

}  // namespace

void emit_plot(std::ostream& out, const std::vector<PlotSeries>& series, std::optional<PlotWindow> disturbance) {
    if (series.empty()) {
        throw ParameterError("nothing to plot");
    }
    const TimeGrid& grid = series.front().risk.grid();
    bool any_energy = false;
    for (const auto& s : series) {
        if (!(s.risk.grid() == grid) || (s.energy && !(s.energy->grid() == grid))) {
            throw ParameterError("plot series '" + s.label + "' is not on the shared time grid");
        }
        any_energy = any_energy || s.energy.has_value();
    }

    const Range x{grid.t_start(), grid.t_end()};
    double r_hi = 1.0;
    double e_lo = std::numeric_limits<double>::infinity();
    double e_hi = -e_lo;
    for (const auto& s : series) {
        for (double v : s.risk.values()) {
            r_hi = std::max(r_hi, v);
        }
        if (s.energy) {
            for (double v : s.energy->values()) {
                e_lo = std::min(e_lo, v);
                e_hi = std::max(e_hi, v);
            }
        }
    }

    std::vector<std::pair<Panel, std::string>> panels;
    double top = margin_top;
    if (any_energy) {
        panels.push_back({Panel{top, x, padded(e_lo, e_hi)}, "energy E [J]"});
        top += panel_height + panel_gap;
    }
    double r_lo = 0.0;
    for (const auto& s : series) {
        for (double v : s.risk.values()) {
            r_lo = std::min(r_lo, v);
        }
    }
    panels.push_back({Panel{top, x, padded(r_lo, r_hi)}, "risk r [-]"});
    const double height = top + panel_height + panel_gap;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
        << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        const auto& [panel, label] = panels[i];
        if (disturbance) {
            draw_window(out, panel, *disturbance);
        }
        draw_axes(out, panel, label, i + 1 == panels.size());
        const bool energy_panel = any_energy && i == 0;
        for (std::size_t j = 0; j < series.size(); ++j) {
            const char* colour = palette[j % std::size(palette)];
            if (energy_panel) {
                if (series[j].energy) {
                    draw_series(out, panel, *series[j].energy, colour);
                }
            } else {
                draw_series(out, panel, series[j].risk, colour);
            }
        }
    }

    const double lx = width - margin_right + 15;
    double ly = margin_top + 10;
    for (std::size_t j = 0; j < series.size(); ++j) {
        out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 20) << "\" y2=\"" << fmt(ly)
            << "\" stroke=\"" << palette[j % std::size(palette)] << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(ly + 4) << "\" font-size=\"12\">"
            << escape(series[j].label) << "</text>\n";
        ly += 18;
    }
    if (disturbance) {
        out << "<rect x=\"" << fmt(lx) << "\" y=\"" << fmt(ly - 6) << "\" width=\"20\" height=\"12\" fill=\"#f2c94c\" "
            << "fill-opacity=\"0.25\"/>\n";
        out << "<text x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(ly + 4) << "\" font-size=\"12\">disturbance</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace riskdyn
