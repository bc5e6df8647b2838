#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tpbsim/csv.hpp"
#include "tpbsim/error.hpp"

namespace tpb {

struct PlotSeries {
    std::string label;  // e.g. "(φ=0.7, β=5)"
    std::vector<double> values;  // y_avg indexed by t
};

struct PlotLayout {
    double width = 720;
    double height = 440;
    double margin_left = 64;
    double margin_right = 190;
    double margin_top = 24;
    double margin_bottom = 52;

    double plot_width() const noexcept { return width - margin_left - margin_right; }
    double plot_height() const noexcept { return height - margin_top - margin_bottom; }
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
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

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Tick spacing from {1, 2, 5} x 10^k giving at most ten intervals.
inline double tick_step(double span) {
    double step = 1.0;
    while (span / step > 10.0) {
        for (double m : {2.0, 2.5, 2.0}) {
            step *= m;
            if (span / step <= 10.0) break;
        }
    }
    return step;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                           "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace detail

/// Line chart of adoption rate against t. The y-axis is fixed to [0,1].
inline std::string render_plot_svg(std::span<const PlotSeries> series, const PlotLayout& layout = {}) {
    using detail::num;
    if (series.empty()) throw ConfigError("render_plot_svg: no series");
    const std::size_t len = series.front().values.size();
    if (len == 0) throw ConfigError("render_plot_svg: empty series");
    for (const auto& s : series)
        if (s.values.size() != len) throw ConfigError("render_plot_svg: series have different lengths");

    const double x0 = layout.margin_left;
    const double y0 = layout.margin_top;
    const double pw = layout.plot_width();
    const double ph = layout.plot_height();
    const double t_max = len > 1 ? static_cast<double>(len - 1) : 1.0;
    auto px = [&](double t) { return x0 + pw * t / t_max; };
    auto py = [&](double v) { return y0 + ph * (1.0 - v); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(layout.width) + "\" height=\"" +
           num(layout.height) + "\" viewBox=\"0 0 " + num(layout.width) + " " + num(layout.height) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(layout.width) + "\" height=\"" + num(layout.height) +
           "\" fill=\"white\"/>\n";

    // grid and y ticks
    for (int k = 0; k <= 4; ++k) {
        const double v = 0.25 * k;
        out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(py(v)) + "\" x2=\"" + num(x0 + pw) + "\" y2=\"" + num(py(v)) +
               "\" stroke=\"#dddddd\"/>\n";
        out += "<text x=\"" + num(x0 - 8) + "\" y=\"" + num(py(v) + 4) + "\" text-anchor=\"end\">" + num(v) + "</text>\n";
    }
    const double step = detail::tick_step(t_max);
    for (double t = 0.0; t <= t_max + 1e-9; t += step) {
        out += "<line x1=\"" + num(px(t)) + "\" y1=\"" + num(y0 + ph) + "\" x2=\"" + num(px(t)) + "\" y2=\"" +
               num(y0 + ph + 5) + "\" stroke=\"black\"/>\n";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", t);
        out += "<text x=\"" + num(px(t)) + "\" y=\"" + num(y0 + ph + 19) + "\" text-anchor=\"middle\">" + buf +
               "</text>\n";
    }
    out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y0) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(x0 + pw / 2) + "\" y=\"" + num(layout.height - 10) +
           "\" text-anchor=\"middle\">t</text>\n";
    out += "<text x=\"16\" y=\"" + num(y0 + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           num(y0 + ph / 2) + ")\">y_avg</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = detail::kPalette[k % std::size(detail::kPalette)];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t t = 0; t < len; ++t) {
            if (t > 0) out += ' ';
            out += num(px(static_cast<double>(t))) + "," + num(py(series[k].values[t]));
        }
        out += "\"/>\n";
    }

    // legend
    const double lx = x0 + pw + 16;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = detail::kPalette[k % std::size(detail::kPalette)];
        const double ly = y0 + 12 + 20.0 * static_cast<double>(k);
        out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 24) + "\" y2=\"" + num(ly) +
               "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(lx + 30) + "\" y=\"" + num(ly + 4) + "\">" + detail::xml_escape(series[k].label) +
               "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

inline void render_plot_svg(std::span<const PlotSeries> series, const std::filesystem::path& path) {
    write_file(path, render_plot_svg(series));
}

// Legend label for a parameter pair, e.g. "(φ=0.7, β=5)".
inline std::string phi_beta_label(double phi, double beta) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(\xCF\x86=%g, \xCE\xB2=%g)", phi, beta);
    return buf;
}

}  // namespace tpb
